#include "ilr/verification.hpp"

#include "ilr/parallel.hpp"
#include "ilr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ilr {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Fills row (s,a) of a transition tensor with `branching` distinct successors
// and Dirichlet(1) weights.
void random_row(CounterRng& rng, int num_states, int branching, std::span<double> row) {
  std::vector<int> order(num_states);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < branching; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(num_states - i)));
    std::swap(order[i], order[j]);
  }
  std::vector<double> w(branching);
  double total = 0.0;
  for (int i = 0; i < branching; ++i) {
    w[i] = -std::log1p(-rng.uniform());
    total += w[i];
  }
  if (!(total > 0.0)) {
    std::fill(w.begin(), w.end(), 1.0);
    total = branching;
  }
  std::fill(row.begin(), row.end(), 0.0);
  for (int i = 0; i < branching; ++i) row[order[i]] = w[i] / total;
}

}  // namespace

// --- Random instances ---------------------------------------------------------

std::string to_string(RewardStyle style) {
  return style == RewardStyle::uniform ? "uniform" : "sparse";
}

RewardStyle reward_style_from_string(const std::string& name) {
  if (name == "uniform") return RewardStyle::uniform;
  if (name == "sparse") return RewardStyle::sparse;
  throw std::invalid_argument("unknown reward style '" + name + "' (expected uniform|sparse)");
}

FiniteMdp generate_random_mdp(const RandomMdpSpec& spec) {
  if (spec.num_states < 1 || spec.num_actions < 1) {
    throw std::invalid_argument("generate_random_mdp: state and action counts must be positive");
  }
  if (spec.branching < 1) throw std::invalid_argument("generate_random_mdp: branching must be >= 1");
  if (spec.branching > spec.num_states) {
    throw std::invalid_argument("generate_random_mdp: branching exceeds states (" +
                                std::to_string(spec.branching) + " > " +
                                std::to_string(spec.num_states) + ")");
  }
  const int n = spec.num_states;
  const int m = spec.num_actions;
  for (int attempt = 0; attempt < std::max(1, spec.max_rejections); ++attempt) {
    CounterRng rng(attempt == 0 ? spec.seed : derive_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
    std::vector<double> t(static_cast<std::size_t>(n) * m * n, 0.0);
    std::vector<double> r(static_cast<std::size_t>(n) * m, 0.0);
    for (int s = 0; s < n; ++s)
      for (int a = 0; a < m; ++a) {
        const std::size_t off = (static_cast<std::size_t>(s) * m + a) * n;
        random_row(rng, n, spec.branching, {t.data() + off, static_cast<std::size_t>(n)});
      }
    for (auto& x : r) {
      x = spec.reward_style == RewardStyle::uniform ? rng.uniform()
                                                    : (rng.uniform() < 0.2 ? 1.0 : 0.0);
    }
    FiniteMdp mdp(n, m, std::move(t), std::move(r), 0);
    if (!spec.ensure_communicating || is_communicating(mdp)) return mdp;
  }
  throw std::runtime_error("generate_random_mdp: no communicating MDP within " +
                           std::to_string(spec.max_rejections) + " rejections");
}

MarkovChain random_ergodic_chain(int num_states, int branching, std::uint64_t seed) {
  if (num_states < 1) throw std::invalid_argument("random_ergodic_chain: empty chain");
  // A single successor per row gives a permutation-like chain that is never
  // aperiodic on two or more states.
  const int b = std::clamp(branching, num_states > 1 ? 2 : 1, num_states);
  for (std::uint64_t attempt = 0; attempt < 100000; ++attempt) {
    CounterRng rng(derive_seed(seed, attempt));
    Eigen::MatrixXd p(num_states, num_states);
    std::vector<double> row(num_states);
    for (int s = 0; s < num_states; ++s) {
      random_row(rng, num_states, b, row);
      for (int j = 0; j < num_states; ++j) p(s, j) = row[j];
    }
    MarkovChain chain(std::move(p));
    if (chain_structure(chain).ergodic()) return chain;
  }
  throw std::runtime_error("random_ergodic_chain: rejection budget exhausted");
}

std::vector<double> random_distribution(int size, std::uint64_t seed, double sparsity) {
  if (size < 1) throw std::invalid_argument("random_distribution: empty support");
  CounterRng rng(seed);
  std::vector<double> p(size);
  double total = 0.0;
  for (auto& x : p) {
    x = -std::log1p(-rng.uniform());
    if (sparsity > 0.0 && rng.uniform() < sparsity) x = 0.0;
    total += x;
  }
  if (!(total > 0.0)) {
    p[rng.below(static_cast<std::uint64_t>(size))] = 1.0;
    total = 1.0;
  }
  for (auto& x : p) x /= total;
  return p;
}

RewardTable random_reward(int num_states, int num_actions, std::uint64_t seed, int index) {
  CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(index)));
  Eigen::MatrixXd r(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a)
      r(s, a) = index % 2 == 0 ? rng.uniform() : (rng.uniform() < 0.5 ? 1.0 : 0.0);
  return RewardTable(std::move(r), "extrinsic");
}

Instance generate_instance(RandomMdpSpec base, int max_tau, int max_tries) {
  const std::uint64_t root = base.seed;
  for (int k = 0; k < max_tries; ++k) {
    base.seed = derive_seed(root, static_cast<std::uint64_t>(k));
    try {
      FiniteMdp mdp = generate_random_mdp(base);
      ExpertSpec expert = make_expert(mdp, derive_seed(base.seed, 1), 200);
      if (expert.mixing.tail_certified && expert.tau_mix() <= max_tau) {
        return Instance{std::move(mdp), std::move(expert), base.seed};
      }
    } catch (const std::runtime_error&) {
      // no communicating MDP or no ergodic expert for this seed; draw again
    }
  }
  throw std::runtime_error("generate_instance: no instance with tau_mix <= " +
                           std::to_string(max_tau) + " in " + std::to_string(max_tries) +
                           " tries");
}

Instance generate_optimal_instance(RandomMdpSpec base, int max_tau, int max_tries) {
  const std::uint64_t root = base.seed;
  for (int k = 0; k < max_tries; ++k) {
    base.seed = derive_seed(root, static_cast<std::uint64_t>(k));
    std::optional<FiniteMdp> mdp;
    try {
      mdp = generate_random_mdp(base);
    } catch (const std::runtime_error&) {
      continue;
    }
    try {
      ExpertSpec expert = make_optimal_expert(*mdp);
      if (expert.mixing.tail_certified && expert.tau_mix() <= max_tau) {
        return Instance{std::move(*mdp), std::move(expert), base.seed};
      }
    } catch (const std::invalid_argument&) {
      // the optimal policy is not ergodic for this seed
    }
  }
  throw std::runtime_error("generate_optimal_instance: no instance with an ergodic optimal "
                           "policy and tau_mix <= " + std::to_string(max_tau) + " in " +
                           std::to_string(max_tries) + " tries");
}

// --- Plans and reports --------------------------------------------------------

long proposition1_sample_size(int num_states, int tau_mix, double eta, double delta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (num_states < 1 || tau_mix < 0) throw std::invalid_argument("invalid |S| or tau_mix");
  if (tau_mix == 0) return 1;
  const double base = std::max(800.0 * num_states, 450.0 * std::log(2.0 / delta));
  const double tau = tau_mix;
  return static_cast<long>(std::ceil(base * tau * tau * tau / (eta * eta)));
}

VerificationPlan plan_from_proposition1(int num_states, int tau_mix, double eta, double delta,
                                        int n_trials, std::uint64_t master_seed) {
  VerificationPlan plan;
  plan.eta = eta;
  plan.delta = delta;
  plan.n_required = proposition1_sample_size(num_states, tau_mix, eta, delta);
  plan.epsilon = eta / (2.0 + 8.0 * tau_mix);
  plan.kappa_bound =
      plan.epsilon + std::sqrt(8.0 * num_states * tau_mix / static_cast<double>(plan.n_required));
  plan.n_trials = n_trials;
  plan.master_seed = master_seed;
  plan.tau_mix = tau_mix;
  plan.num_states = num_states;
  return plan;
}

VerificationPlan plan_from_proposition1(const FiniteMdp& mdp, const ExpertSpec& expert,
                                        double eta, double delta, int n_trials,
                                        std::uint64_t master_seed) {
  return plan_from_proposition1(mdp.num_states(), expert.tau_mix(), eta, delta, n_trials,
                                master_seed);
}

double success_slack(double required_rate, int trials) {
  if (trials <= 0) return 0.0;
  const double r = std::clamp(required_rate, 0.0, 1.0);
  return 3.0 * std::sqrt(r * (1.0 - r) / trials);
}

VerificationReport make_report(std::string check_name, double required_rate,
                               std::vector<TrialRecord> records) {
  VerificationReport rep;
  rep.check_name = std::move(check_name);
  rep.required_rate = std::clamp(required_rate, 0.0, 1.0);
  rep.trials = static_cast<int>(records.size());
  rep.successes = static_cast<int>(
      std::count_if(records.begin(), records.end(), [](const TrialRecord& r) { return r.satisfied; }));
  rep.empirical_rate =
      rep.trials > 0 ? static_cast<double>(rep.successes) / rep.trials : 1.0;
  rep.slack = success_slack(rep.required_rate, rep.trials);
  rep.pass = rep.empirical_rate >= rep.required_rate - rep.slack;
  rep.records = std::move(records);
  return rep;
}

// --- Checks -------------------------------------------------------------------

VerificationReport check_proposition1(const FiniteMdp& mdp, const ExpertSpec& expert,
                                      const VerificationPlan& plan,
                                      const Proposition1Options& options) {
  const long n_samples = options.samples_override.value_or(plan.n_required);
  if (n_samples < 1) throw std::invalid_argument("check_proposition1: sample count must be >= 1");
  const int n = mdp.num_states();
  const int m = mdp.num_actions();

  auto records = parallel_map(static_cast<std::size_t>(plan.n_trials), [&](std::size_t i) {
    TrialRecord rec;
    rec.trial = static_cast<int>(i);
    rec.seed = derive_seed(plan.master_seed, i);
    rec.bound = plan.eta;
    try {
      std::vector<StateAction> support;
      if (!options.empty_support) {
        support = sample_trajectory(mdp, expert.policy, n_samples, rec.seed).support();
      }
      const IlrResult res = ilr_from_support(mdp, support, options.solver_tol);
      const OccupancyDistribution occ = policy_occupancy(mdp, res.policy);
      rec.measured = total_variation(expert.occupancy, occ);
      double worst_regret = -1.0;
      for (int j = 0; j < options.n_random_rewards; ++j) {
        const RewardTable r = random_reward(n, m, rec.seed, j);
        worst_regret =
            std::max(worst_regret, expected_reward(expert.occupancy, r) - expected_reward(occ, r));
      }
      const bool tv_ok = rec.measured <= plan.eta;
      const bool regret_ok = worst_regret <= plan.eta;
      const bool ergodic = res.result.ergodic_under_policy;
      rec.satisfied = tv_ok && regret_ok && ergodic && !support.empty();
      std::string note;
      if (support.empty()) note += "empty dataset support; ";
      if (!ergodic) note += "imitation chain not ergodic; ";
      if (!regret_ok) note += "regret " + fmt(worst_regret) + " exceeds eta; ";
      if (!note.empty()) note.resize(note.size() - 2);
      rec.note = note;
    } catch (const std::exception& e) {
      rec.satisfied = false;
      rec.note = std::string("solver failure: ") + e.what();
    }
    return rec;
  });

  auto rep = make_report("prop1", 1.0 - plan.delta, std::move(records));
  rep.details = {{"eta", plan.eta},
                 {"delta", plan.delta},
                 {"epsilon", plan.epsilon},
                 {"kappa_bound", plan.kappa_bound},
                 {"n_required", static_cast<double>(plan.n_required)},
                 {"n_samples", static_cast<double>(n_samples)},
                 {"tau_mix", static_cast<double>(plan.tau_mix)},
                 {"num_states", static_cast<double>(n)}};
  return rep;
}

VerificationReport check_lemma4(const FiniteMdp& mdp, const ExpertSpec& expert, long n_samples,
                                double epsilon, int n_trials, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("check_lemma4: n_samples must be >= 1");
  const int tau = expert.tau_mix();
  const double bound =
      epsilon + std::sqrt(8.0 * mdp.num_states() * tau / static_cast<double>(n_samples));
  const double required =
      tau == 0 ? 1.0
               : 1.0 - 2.0 * std::exp(-epsilon * epsilon * static_cast<double>(n_samples) /
                                      (4.5 * tau));

  auto records = parallel_map(static_cast<std::size_t>(n_trials), [&](std::size_t i) {
    TrialRecord rec;
    rec.trial = static_cast<int>(i);
    rec.seed = derive_seed(seed, i);
    const auto data = sample_trajectory(mdp, expert.policy, n_samples, rec.seed);
    rec.measured = total_variation(expert.occupancy, data.histogram());
    rec.bound = bound;
    rec.satisfied = rec.measured <= bound;
    return rec;
  });
  auto rep = make_report("lemma4", required, std::move(records));
  rep.details = {{"epsilon", epsilon},
                 {"n_samples", static_cast<double>(n_samples)},
                 {"tau_mix", static_cast<double>(tau)},
                 {"tv_bound", bound},
                 {"violation_probability_bound", 1.0 - rep.required_rate}};
  return rep;
}

Lemma5Outcome check_lemma5(const FiniteMdp& mdp, const ExpertSpec& expert,
                           const ExpertDataset& dataset, double solver_tol) {
  Lemma5Outcome out;
  out.kappa_realized = total_variation(expert.occupancy, dataset.histogram());
  const IlrResult res = ilr(mdp, dataset, solver_tol);
  out.intrinsic_gain = res.intrinsic_gain;
  out.imitation_ergodic = res.result.ergodic_under_policy;
  out.satisfied = out.intrinsic_gain >= 1.0 - out.kappa_realized - kExactCheckTol;
  return out;
}

VerificationReport check_lemma7(const FiniteMdp& mdp, const ExpertSpec& expert,
                                const Policy& policy, std::span<const StateAction> support,
                                int n_random_rewards, std::uint64_t seed) {
  if (!is_ergodic_policy(mdp, policy)) {
    throw std::invalid_argument("check_lemma7: policy does not induce an ergodic chain");
  }
  for (const auto& [s, a] : support) {
    if (expert.policy.action(s) != a) {
      throw std::invalid_argument("check_lemma7: support pair (" + std::to_string(s) + "," +
                                  std::to_string(a) + ") is not an expert pair");
    }
  }
  const RewardTable r_int = intrinsic_reward(mdp, support);
  const OccupancyDistribution occ = policy_occupancy(mdp, policy);
  const double kappa = 1.0 - expected_reward(occ, r_int);
  const double tau = expert.tau_mix();

  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(n_random_rewards));
  for (int j = 0; j < n_random_rewards; ++j) {
    const RewardTable r = random_reward(mdp.num_states(), mdp.num_actions(), seed, j);
    TrialRecord rec;
    rec.trial = j;
    rec.seed = derive_seed(seed, static_cast<std::uint64_t>(j));
    rec.measured = expected_reward(occ, r);
    rec.bound = (1.0 - kappa) * expected_reward(expert.occupancy, r) - 4.0 * tau * kappa;
    rec.satisfied = rec.measured >= rec.bound - kExactCheckTol;
    records.push_back(std::move(rec));
  }
  auto rep = make_report("lemma7", 1.0, std::move(records));
  rep.details = {{"kappa", kappa}, {"tau_mix", tau}};
  return rep;
}

VerificationReport check_lemma7(const FiniteMdp& mdp, const ExpertSpec& expert,
                                const Policy& policy, int n_random_rewards, std::uint64_t seed) {
  std::vector<StateAction> support;
  for (int s = 0; s < mdp.num_states(); ++s) support.push_back({s, expert.policy.action(s)});
  return check_lemma7(mdp, expert, policy, support, n_random_rewards, seed);
}

VerificationReport stochastic_expert_demo(std::uint64_t seed, std::vector<double> expert_probs,
                                          long n_samples) {
  const int m = static_cast<int>(expert_probs.size());
  if (m < 1) throw std::invalid_argument("stochastic_expert_demo: empty expert distribution");
  // One state; every action loops back to it.
  const FiniteMdp mdp(1, m, std::vector<double>(static_cast<std::size_t>(m), 1.0),
                      std::vector<double>(static_cast<std::size_t>(m), 0.0), 0);
  Eigen::MatrixXd probs(1, m);
  for (int a = 0; a < m; ++a) probs(0, a) = expert_probs[a];
  const Policy expert(std::move(probs));

  const auto data = sample_trajectory(mdp, expert, n_samples, seed);
  const IlrResult res = ilr(mdp, data);
  const auto rho_e = occupancy_from_state_dist(StateDistribution::point_mass(1, 0), expert);
  const auto rho_i = policy_occupancy(mdp, res.policy);

  TrialRecord rec;
  rec.seed = seed;
  rec.measured = total_variation(rho_e, rho_i);
  rec.bound = kStochasticDemoFloor;
  rec.satisfied = rec.measured >= kStochasticDemoFloor - 1e-12;
  rec.note = expert.is_deterministic()
                 ? "deterministic expert: not a counterexample"
                 : "stochastic expert: a deterministic imitation policy cannot match it";
  auto rep = make_report("stochastic-demo", 1.0, {rec});
  rep.note = rec.note;
  rep.details = {{"tv_expert_imitation", rec.measured},
                 {"imitation_action", static_cast<double>(res.policy.action(0))},
                 {"support_size", static_cast<double>(data.support().size())},
                 {"n_samples", static_cast<double>(n_samples)}};
  return rep;
}

// --- Suites -------------------------------------------------------------------

VerificationReport check_tv_duality(int n_pairs, int max_support, std::uint64_t seed) {
  if (max_support < 1 || max_support > kTvOracleMaxSupport) {
    throw std::invalid_argument("check_tv_duality: max_support must lie in [1, 20]");
  }
  auto records = parallel_map(static_cast<std::size_t>(n_pairs), [&](std::size_t i) {
    TrialRecord rec;
    rec.trial = static_cast<int>(i);
    rec.seed = derive_seed(seed, i);
    CounterRng rng(rec.seed);
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_support)));
    const double sparsity = i % 2 == 0 ? 0.0 : 0.3;
    const auto p = random_distribution(k, derive_seed(rec.seed, 1), sparsity);
    const auto q = random_distribution(k, derive_seed(rec.seed, 2), sparsity);

    const double tv = total_variation(p, q);
    const auto sup = tv_sup_oracle(p, q);
    const double identity_gap = std::abs(tv - sup.value);

    // The set where p exceeds q realizes the supremum.
    double maximizer_gap = 0.0;
    for (int x = 0; x < k; ++x)
      if (p[x] > q[x]) maximizer_gap += p[x] - q[x];
    const bool maximizer_ok = std::abs(maximizer_gap - tv) <= 1e-12;

    std::vector<double> v(k);
    double ev = 0.0;
    for (int x = 0; x < k; ++x) {
      v[x] = rng.uniform();
      ev += (p[x] - q[x]) * v[x];
    }
    const bool bounded_ok = std::abs(ev) <= 2.0 * tv + 1e-12;

    rec.measured = identity_gap;
    rec.bound = 1e-12;
    rec.satisfied = identity_gap <= 1e-12 && maximizer_ok && bounded_ok;
    if (!maximizer_ok) rec.note = "indicator of {p > q} does not attain TV";
    if (!bounded_ok) rec.note = "|E_p v - E_q v| exceeds 2 TV";
    return rec;
  });
  return make_report("tv-duality", 1.0, std::move(records));
}

VerificationReport check_lemma3(int n_chains, int max_states, std::uint64_t seed) {
  if (max_states < 1) throw std::invalid_argument("check_lemma3: max_states must be >= 1");
  auto records = parallel_map(static_cast<std::size_t>(n_chains), [&](std::size_t i) {
    TrialRecord rec;
    rec.trial = static_cast<int>(i);
    rec.seed = derive_seed(seed, i);
    CounterRng rng(rec.seed);
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_states)));
    const int branching = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const MarkovChain chain = random_ergodic_chain(n, branching, derive_seed(rec.seed, 1));
    const MixingProfile prof = certified_mixing_profile(chain);
    rec.bound = 2.0 * prof.tau_mix;
    if (!prof.tail_certified) {
      rec.note = "tail not certified";
      return rec;
    }
    double worst = 0.0;
    for (int s = 0; s < n; ++s) {
      worst = std::max(worst, tv_decay_sum(chain, StateDistribution::point_mass(n, s), prof));
    }
    Eigen::VectorXd mixed = Eigen::Map<const Eigen::VectorXd>(
        random_distribution(n, derive_seed(rec.seed, 2)).data(), n);
    worst = std::max(worst, tv_decay_sum(chain, StateDistribution(mixed), prof));

    bool submultiplicative = true;
    if (prof.tau_mix > 0) {
      for (int l = 1; static_cast<long>(l) * prof.tau_mix <= prof.t_cap; ++l) {
        if (prof.d_curve[static_cast<std::size_t>(l) * prof.tau_mix] > std::ldexp(1.0, -l)) {
          submultiplicative = false;
          break;
        }
      }
    }
    rec.measured = worst;
    rec.satisfied = worst <= rec.bound && submultiplicative;
    if (!submultiplicative) rec.note = "d(l tau) > 2^-l";
    return rec;
  });
  return make_report("lemma3", 1.0, std::move(records));
}

VerificationReport check_lemma5_suite(int n_triples, std::uint64_t seed, int num_states,
                                      int num_actions) {
  auto records = parallel_map(static_cast<std::size_t>(n_triples), [&](std::size_t i) {
    TrialRecord rec;
    rec.trial = static_cast<int>(i);
    rec.seed = derive_seed(seed, i);
    CounterRng rng(rec.seed);
    RandomMdpSpec spec;
    spec.num_states = num_states;
    spec.num_actions = num_actions;
    // Deterministic dynamics (one successor) admit no ergodic deterministic expert.
    spec.branching = num_states == 1 ? 1 : 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(num_states - 1)));
    spec.seed = derive_seed(rec.seed, 1);
    const Instance inst = generate_instance(spec, 1000);
    // Log-uniform dataset size in [1, 2000].
    const long n = std::max(1L, std::lround(std::exp(rng.uniform() * std::log(2000.0))));
    const auto data = sample_trajectory(inst.mdp, inst.expert.policy, n, derive_seed(rec.seed, 2));
    const Lemma5Outcome out = check_lemma5(inst.mdp, inst.expert, data);
    rec.measured = out.intrinsic_gain;
    rec.bound = 1.0 - out.kappa_realized;
    rec.satisfied = out.satisfied;
    rec.note = "n=" + std::to_string(n) + (out.imitation_ergodic ? "" : " non-ergodic imitation");
    return rec;
  });
  return make_report("lemma5", 1.0, std::move(records));
}

VerificationReport check_lemma7_suite(int n_policies, int n_random_rewards, std::uint64_t seed,
                                      int num_states, int num_actions) {
  auto records = parallel_map(static_cast<std::size_t>(n_policies), [&](std::size_t i) {
    const std::uint64_t pseed = derive_seed(seed, i);
    CounterRng rng(pseed);
    RandomMdpSpec spec;
    spec.num_states = num_states;
    spec.num_actions = num_actions;
    // Deterministic dynamics (one successor) admit no ergodic deterministic expert.
    spec.branching = num_states == 1 ? 1 : 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(num_states - 1)));
    spec.seed = derive_seed(pseed, 1);
    const Instance inst = generate_instance(spec, 1000);
    const int n = num_states;
    const int m = num_actions;

    // Partial expert support from a short demonstration.
    const long n_demo = 1 + static_cast<long>(rng.below(40));
    const auto data = sample_trajectory(inst.mdp, inst.expert.policy, n_demo, derive_seed(pseed, 2));
    std::vector<StateAction> support = data.support();
    if (rng.uniform() < 0.3) {
      support.clear();
      for (int s = 0; s < n; ++s) support.push_back({s, inst.expert.policy.action(s)});
    }

    std::optional<Policy> policy;
    std::string kind;
    if (i % 3 == 0) {
      const IlrResult res = ilr_from_support(inst.mdp, support);
      if (res.result.ergodic_under_policy) {
        policy = res.policy;
        kind = "reduction";
      }
    }
    for (int attempt = 0; !policy && attempt < 10000; ++attempt) {
      if (i % 3 == 2) {
        Eigen::MatrixXd probs(n, m);
        for (int s = 0; s < n; ++s) {
          const auto row = random_distribution(m, rng.next_u64(), 0.3);
          for (int a = 0; a < m; ++a) probs(s, a) = row[a];
        }
        Policy candidate(std::move(probs));
        if (is_ergodic_policy(inst.mdp, candidate)) {
          policy = std::move(candidate);
          kind = "stochastic";
        }
      } else {
        std::vector<int> actions(n);
        for (auto& a : actions) a = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
        Policy candidate = Policy::deterministic(actions, m);
        if (is_ergodic_policy(inst.mdp, candidate)) {
          policy = std::move(candidate);
          kind = "deterministic";
        }
      }
    }
    if (!policy) {
      policy = inst.expert.policy;
      kind = "expert";
    }

    const auto rep = check_lemma7(inst.mdp, inst.expert, *policy, support, n_random_rewards,
                                  derive_seed(pseed, 3));
    TrialRecord rec;
    rec.trial = static_cast<int>(i);
    rec.seed = pseed;
    rec.measured = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.records) rec.measured = std::min(rec.measured, r.measured - r.bound);
    rec.bound = -kExactCheckTol;
    rec.satisfied = rep.successes == rep.trials;
    rec.note = kind + " policy, " + std::to_string(rep.successes) + "/" +
               std::to_string(rep.trials) + " rewards";
    return rec;
  });
  auto rep = make_report("lemma7", 1.0, std::move(records));
  rep.details = {{"rewards_per_policy", static_cast<double>(n_random_rewards)}};
  return rep;
}

}  // namespace ilr
