#include "cli.hpp"

#include "ilr/io.hpp"
#include "ilr/rng.hpp"
#include "ilr/sweep.hpp"
#include "ilr/verification.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>

namespace ilr::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Settings {
  int states = 5;
  int actions = 3;
  int branching = 2;
  std::uint64_t seed = 0;
  double eta = 0.5;
  double delta = 0.2;
  double epsilon = 0.1;
  int trials = 1;
  long samples = 1;
  long samples_override = 1;
  int rewards = 100;
  int max_tau = 2;
  std::string method = "ilr";
  std::string expert;
  std::string reward_style = "uniform";
  std::string out;
  std::string csv;
  std::string mdp;
  std::string config;
  std::string check;
  bool with_expert = false;
  std::vector<double> fractions;
  std::vector<std::string> methods;
  std::vector<double> expert_probs;
};

/// Options of one subcommand, keyed by config-file name (long flag with '_').
class OptionSet {
 public:
  explicit OptionSet(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& flags, T& target, const std::string& help) {
    CLI::Option* opt = app_->add_option(flags, target, help);
    remember(opt);
    return opt;
  }

  CLI::Option* flag(const std::string& flags, bool& target, const std::string& help) {
    CLI::Option* opt = app_->add_flag(flags, target, help);
    remember(opt);
    return opt;
  }

  bool given(const std::string& key) const {
    const auto it = by_key_.find(key);
    return it != by_key_.end() && it->second->count() > 0;
  }

  /// Applies a JSON config object; keys already set on the command line win.
  void apply_config(const std::string& path) {
    Json doc;
    try {
      doc = Json::parse(read_text_file(path));
    } catch (const Json::parse_error& e) {
      throw FormatError("config '" + path + "': " + e.what());
    }
    if (!doc.is_object()) throw FormatError("config '" + path + "': expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
      const auto it = by_key_.find(key);
      if (it == by_key_.end() || key == "config") {
        throw std::invalid_argument("config '" + path + "': unknown key '" + key + "'");
      }
      CLI::Option* opt = it->second;
      if (opt->count() > 0) continue;
      std::vector<std::string> parts;
      if (value.is_array()) {
        for (const auto& v : value) parts.push_back(scalar(v, key));
      } else {
        parts.push_back(scalar(value, key));
      }
      try {
        opt->add_result(parts);
        opt->run_callback();
      } catch (const CLI::Error& e) {
        throw std::invalid_argument("config '" + path + "': key '" + key + "': " + e.what());
      }
    }
  }

 private:
  void remember(CLI::Option* opt) {
    std::string key = opt->get_name(false, true);
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    for (auto& c : key)
      if (c == '-') c = '_';
    by_key_[key] = opt;
  }

  static std::string scalar(const Json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw std::invalid_argument("config key '" + key + "': unsupported value " + v.dump());
  }

  CLI::App* app_;
  std::map<std::string, CLI::Option*> by_key_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

ExpertSpec expert_for(const FiniteMdp& mdp, const std::string& kind, std::uint64_t seed) {
  if (kind == "random") return make_expert(mdp, derive_seed(seed, 0));
  if (kind == "optimal") {
    try {
      return make_optimal_expert(mdp);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string(e.what()) + "; try --expert random");
    }
  }
  throw std::invalid_argument("unknown expert kind '" + kind + "' (expected optimal|random)");
}

FiniteMdp load_mdp(const std::string& path) {
  require(!path.empty(), "an MDP file is required (--mdp)");
  return mdp_from_json(read_text_file(path));
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

std::vector<double> default_fractions() {
  std::vector<double> f;
  for (int k = 8; k >= 0; --k) f.push_back(std::ldexp(1.0, -k));
  return f;
}

// --- Commands -----------------------------------------------------------------

RandomMdpSpec generator_spec(const Settings& s) {
  RandomMdpSpec spec;
  spec.num_states = s.states;
  spec.num_actions = s.actions;
  spec.branching = s.branching;
  spec.reward_style = reward_style_from_string(s.reward_style);
  spec.seed = s.seed;
  return spec;
}

void check_generator_flags(const Settings& s) {
  require(s.states >= 1, "--states must be >= 1");
  require(s.actions >= 1, "--actions must be >= 1");
  require(s.branching >= 1, "--branching must be >= 1");
  require(s.branching <= s.states, "branching exceeds states (" + std::to_string(s.branching) +
                                       " > " + std::to_string(s.states) + ")");
}

int cmd_gen_mdp(const Settings& s, std::ostream& out) {
  check_generator_flags(s);
  const FiniteMdp mdp = generate_random_mdp(generator_spec(s));
  emit(s.out, mdp_to_json(mdp), out);
  if (s.with_expert) {
    const ExpertSpec expert = make_expert(mdp, derive_seed(s.seed, 1));
    out << "expert_actions:";
    for (int a : expert.policy.actions()) out << ' ' << a;
    out << "\ntau_mix: " << expert.tau_mix() << "\n";
  }
  return kExitPass;
}

int cmd_imitate(const Settings& s, const OptionSet& opts, std::ostream& out) {
  const FiniteMdp mdp = load_mdp(s.mdp);
  const long n = opts.given("samples") ? s.samples : 10000;
  require(n >= 1, "--samples must be >= 1");
  const Method method = method_from_string(s.method);

  const ExpertSpec expert = expert_for(mdp, s.expert.empty() ? "random" : s.expert, s.seed);
  const ExpertDataset data = sample_trajectory(mdp, expert.policy, n, derive_seed(s.seed, 1));
  const Policy policy = method == Method::ilr ? ilr(mdp, data).policy : behavioral_cloning(mdp, data);
  const OccupancyDistribution occ = policy_occupancy(mdp, policy);
  const RewardTable extrinsic = extrinsic_reward(mdp);

  Json doc;
  doc["method"] = to_string(method);
  doc["n_samples"] = n;
  doc["seed"] = s.seed;
  doc["expert_actions"] = expert.policy.actions();
  doc["tau_mix"] = expert.tau_mix();
  doc["policy"] = Json::parse(policy_to_json(policy));
  doc["intrinsic_gain"] = expected_reward(occ, intrinsic_reward(mdp, data.support()));
  doc["extrinsic_gain"] = expected_reward(occ, extrinsic);
  doc["expert_gain"] = expected_reward(expert.occupancy, extrinsic);
  doc["tv_to_expert"] = total_variation(expert.occupancy, occ);
  doc["ergodic"] = is_ergodic_policy(mdp, policy);
  emit(s.out, doc.dump(2) + "\n", out);
  return kExitPass;
}

int cmd_verify(const Settings& s, const OptionSet& opts, std::ostream& out) {
  auto trials = [&](int fallback) {
    const int t = opts.given("trials") ? s.trials : fallback;
    require(t >= 1, "--trials must be >= 1");
    return t;
  };
  auto states = [&](int fallback) { return opts.given("states") ? s.states : fallback; };
  require(s.states >= 1 && s.actions >= 1, "--states and --actions must be >= 1");

  // Instance for the single-MDP checks: a file, or a generated fast-mixing one.
  auto instance = [&](int default_states) {
    if (!s.mdp.empty()) {
      FiniteMdp mdp = load_mdp(s.mdp);
      ExpertSpec expert = make_expert(mdp, derive_seed(s.seed, 0));
      return Instance{std::move(mdp), std::move(expert), s.seed};
    }
    Settings g = s;
    g.states = states(default_states);
    if (!opts.given("branching")) g.branching = std::min(2, g.states);
    check_generator_flags(g);
    return generate_instance(generator_spec(g), s.max_tau);
  };

  VerificationReport report;
  const std::string& check = s.check;
  if (check == "tv-duality") {
    const int support = states(12);
    require(support <= kTvOracleMaxSupport, "--states must be <= 20 for tv-duality");
    report = check_tv_duality(trials(1000), support, s.seed);
  } else if (check == "lemma3") {
    report = check_lemma3(trials(200), states(15), s.seed);
  } else if (check == "lemma5") {
    report = check_lemma5_suite(trials(100), s.seed, s.states, s.actions);
  } else if (check == "lemma7") {
    require(s.rewards >= 1, "--rewards must be >= 1");
    report = check_lemma7_suite(trials(50), s.rewards, s.seed, s.states, s.actions);
  } else if (check == "prop1") {
    require(s.eta > 0.0 && s.eta <= 1.0, "--eta must lie in (0, 1]");
    require(s.delta > 0.0 && s.delta < 1.0, "--delta must lie in (0, 1)");
    const Instance inst = instance(5);
    const VerificationPlan plan = plan_from_proposition1(inst.mdp, inst.expert, s.eta, s.delta,
                                                         trials(50), derive_seed(s.seed, 2));
    Proposition1Options options;
    if (opts.given("samples_override")) {
      require(s.samples_override >= 1, "--samples-override must be >= 1");
      options.samples_override = s.samples_override;
    } else {
      require(plan.n_required <= 50'000'000,
              "required sample size " + std::to_string(plan.n_required) +
                  " is too large; pass --samples-override");
    }
    report = check_proposition1(inst.mdp, inst.expert, plan, options);
  } else if (check == "lemma4") {
    require(s.epsilon > 0.0, "--epsilon must be positive");
    const Instance inst = instance(2);
    const long n = opts.given("samples") ? s.samples : 1000;
    require(n >= 1, "--samples must be >= 1");
    report = check_lemma4(inst.mdp, inst.expert, n, s.epsilon, trials(500), s.seed);
  } else if (check == "stochastic-demo") {
    const long n = opts.given("samples") ? s.samples : 10000;
    require(n >= 1, "--samples must be >= 1");
    report = stochastic_expert_demo(
        s.seed, s.expert_probs.empty() ? std::vector<double>{0.5, 0.5} : s.expert_probs, n);
  } else {
    throw std::invalid_argument("unknown check '" + check + "'");
  }

  if (!s.out.empty()) {
    write_text_file(s.out, report_to_json(report));
    std::filesystem::path csv = s.csv.empty() ? std::filesystem::path(s.out).replace_extension(".csv")
                                              : std::filesystem::path(s.csv);
    write_text_file(csv, records_to_csv(report.records));
  } else if (!s.csv.empty()) {
    write_text_file(s.csv, records_to_csv(report.records));
  }
  out << report.check_name << ": " << report.successes << "/" << report.trials
      << " satisfied (rate " << format_double(report.empirical_rate) << ", required "
      << format_double(report.required_rate) << ", slack " << format_double(report.slack)
      << ") " << (report.pass ? "PASS" : "FAIL") << "\n";
  if (!report.note.empty()) out << report.note << "\n";
  return report.pass ? kExitPass : kExitVerificationFailed;
}

int cmd_sweep(const Settings& s, const OptionSet& opts, std::ostream& out) {
  const FiniteMdp mdp = load_mdp(s.mdp);
  SweepSpec spec;
  spec.fractions = s.fractions.empty() ? default_fractions() : s.fractions;
  if (!s.methods.empty()) {
    spec.methods.clear();
    for (const auto& m : s.methods) spec.methods.push_back(method_from_string(m));
  }
  spec.trials = opts.given("trials") ? s.trials : 20;
  spec.max_samples = opts.given("samples") ? s.samples : 2000;
  spec.seed = derive_seed(s.seed, 1);
  const ExpertSpec expert = expert_for(mdp, s.expert.empty() ? "optimal" : s.expert, s.seed);
  emit(s.out, sweep_to_csv(run_sweep(mdp, expert, spec)), out);
  return kExitPass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Imitation learning by reinforcement learning on tabular average-reward MDPs"};
  app.require_subcommand(1);
  Settings s;

  CLI::App* gen = app.add_subcommand("gen-mdp", "Generate a random communicating MDP");
  CLI::App* imitate = app.add_subcommand("imitate", "Imitate a sampled expert on an MDP file");
  CLI::App* verify = app.add_subcommand("verify", "Run a verification check");
  CLI::App* sweep = app.add_subcommand("sweep", "Dataset-size sweep of ILR and BC");

  std::map<CLI::App*, OptionSet> sets;
  for (CLI::App* sub : {gen, imitate, verify, sweep}) {
    OptionSet& o = sets.emplace(sub, OptionSet(sub)).first->second;
    o.add("--seed", s.seed, "Master seed");
    o.add("-o,--out", s.out, "Output path (stdout if omitted)");
    o.add("--config", s.config, "JSON config file; flags override its keys");
  }
  for (CLI::App* sub : {gen, verify}) {
    OptionSet& o = sets.at(sub);
    o.add("--states", s.states, "Number of states");
    o.add("--actions", s.actions, "Number of actions");
    o.add("--branching", s.branching, "Successors per state-action pair");
  }
  for (CLI::App* sub : {imitate, verify, sweep}) {
    OptionSet& o = sets.at(sub);
    o.add("--mdp", s.mdp, "MDP file");
    o.add("--samples", s.samples, "Number of expert samples");
  }
  for (CLI::App* sub : {verify, sweep}) sets.at(sub).add("--trials", s.trials, "Number of trials");
  sets.at(imitate).add("--expert", s.expert, "random (default) or optimal");
  sets.at(sweep).add("--expert", s.expert, "optimal (default) or random");

  sets.at(gen).add("--reward-style", s.reward_style, "uniform or sparse");
  sets.at(gen).flag("--with-expert", s.with_expert, "Also sample an expert and print tau_mix");
  sets.at(imitate).add("--method", s.method, "ilr or bc");

  OptionSet& v = sets.at(verify);
  verify->add_option("check", s.check,
                     "lemma3|lemma4|lemma5|lemma7|prop1|tv-duality|stochastic-demo")
      ->required();
  v.add("--eta", s.eta, "Target accuracy");
  v.add("--delta", s.delta, "Failure probability");
  v.add("--epsilon", s.epsilon, "Concentration slack for lemma4");
  v.add("--samples-override", s.samples_override, "Samples per trial instead of the required N");
  v.add("--rewards", s.rewards, "Random rewards per policy for lemma7");
  v.add("--max-tau", s.max_tau, "Largest expert mixing time for generated instances");
  v.add("--csv", s.csv, "Per-trial CSV path (default: --out with .csv)");
  v.add("--expert-probs", s.expert_probs, "Expert action distribution for stochastic-demo")
      ->delimiter(',');

  OptionSet& w = sets.at(sweep);
  w.add("--fractions", s.fractions, "Dataset fractions in (0, 1]")->delimiter(',');
  w.add("--methods", s.methods, "Methods (ilr,bc)")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInvalidInput;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    OptionSet& opts = sets.at(active);
    if (!s.config.empty()) opts.apply_config(s.config);
    if (active == gen) return cmd_gen_mdp(s, out);
    if (active == imitate) return cmd_imitate(s, opts, out);
    if (active == verify) return cmd_verify(s, opts, out);
    return cmd_sweep(s, opts, out);
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
}

}  // namespace ilr::cli
