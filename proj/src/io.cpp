#include "ilr/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ilr {

using Json = nlohmann::ordered_json;

namespace {

Json parse(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

void require_keys(const Json& doc, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const char* what) {
  if (!doc.is_object()) throw FormatError(std::string(what) + ": expected a JSON object");
  for (const auto& key : required)
    if (!doc.contains(key)) throw FormatError(std::string(what) + ": missing field '" + key + "'");
  for (const auto& [key, value] : doc.items())
    if (!required.contains(key) && !optional.contains(key))
      throw FormatError(std::string(what) + ": unknown field '" + key + "'");
}

template <class T>
T field(const Json& doc, const char* key, const char* what) {
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string(what) + ": field '" + key + "': " + e.what());
  }
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json pairs_json(std::span<const StateAction> pairs) {
  Json out = Json::array();
  for (const auto& [s, a] : pairs) out.push_back({s, a});
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// --- MDP ----------------------------------------------------------------------

std::string mdp_to_json(const FiniteMdp& mdp) {
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  Json t = Json::array();
  Json r = Json::array();
  for (int s = 0; s < n; ++s) {
    Json ts = Json::array();
    Json rs = Json::array();
    for (int a = 0; a < m; ++a) {
      const auto row = mdp.transition_row(s, a);
      ts.push_back(Json(std::vector<double>(row.begin(), row.end())));
      rs.push_back(mdp.reward(s, a));
    }
    t.push_back(std::move(ts));
    r.push_back(std::move(rs));
  }
  Json doc;
  doc["num_states"] = n;
  doc["num_actions"] = m;
  doc["transitions"] = std::move(t);
  doc["rewards"] = std::move(r);
  doc["initial_state"] = mdp.initial_state();
  return doc.dump(2) + "\n";
}

FiniteMdp mdp_from_json(const std::string& text) {
  constexpr const char* what = "MDP file";
  const Json doc = parse(text, what);
  require_keys(doc, {"num_states", "num_actions", "transitions", "rewards", "initial_state"}, {},
               what);
  const int n = field<int>(doc, "num_states", what);
  const int m = field<int>(doc, "num_actions", what);
  if (n < 1 || m < 1) throw FormatError("MDP file: num_states and num_actions must be positive");
  const auto t = field<std::vector<std::vector<std::vector<double>>>>(doc, "transitions", what);
  const auto r = field<std::vector<std::vector<double>>>(doc, "rewards", what);
  if (static_cast<int>(t.size()) != n || static_cast<int>(r.size()) != n) {
    throw FormatError("MDP file: transitions/rewards must have num_states entries");
  }
  std::vector<double> flat_t;
  std::vector<double> flat_r;
  flat_t.reserve(static_cast<std::size_t>(n) * m * n);
  for (int s = 0; s < n; ++s) {
    if (static_cast<int>(t[s].size()) != m || static_cast<int>(r[s].size()) != m) {
      throw FormatError("MDP file: state " + std::to_string(s) + " must have num_actions entries");
    }
    for (int a = 0; a < m; ++a) {
      if (static_cast<int>(t[s][a].size()) != n) {
        throw FormatError("MDP file: transition row (" + std::to_string(s) + "," +
                          std::to_string(a) + ") must have num_states entries");
      }
      flat_t.insert(flat_t.end(), t[s][a].begin(), t[s][a].end());
      flat_r.push_back(r[s][a]);
    }
  }
  FiniteMdp mdp(n, m, std::move(flat_t), std::move(flat_r), field<int>(doc, "initial_state", what));
  require_valid(mdp);
  return mdp;
}

// --- Dataset ------------------------------------------------------------------

std::string dataset_to_json(const ExpertDataset& dataset) {
  Json doc;
  doc["seed"] = dataset.seed();
  doc["N"] = dataset.size();
  doc["num_states"] = dataset.num_states();
  doc["num_actions"] = dataset.num_actions();
  doc["trajectory"] = pairs_json(dataset.trajectory());
  doc["support"] = pairs_json(dataset.support());
  doc["histogram"] = matrix_json(dataset.histogram().probs());
  return doc.dump() + "\n";
}

ExpertDataset dataset_from_json(const std::string& text) {
  constexpr const char* what = "dataset file";
  const Json doc = parse(text, what);
  require_keys(doc, {"seed", "N", "num_states", "num_actions", "trajectory"},
               {"support", "histogram"}, what);
  const auto raw = field<std::vector<std::pair<int, int>>>(doc, "trajectory", what);
  const long n = field<long>(doc, "N", what);
  if (n != static_cast<long>(raw.size())) {
    throw FormatError("dataset file: N = " + std::to_string(n) + " but trajectory has " +
                      std::to_string(raw.size()) + " pairs");
  }
  std::vector<StateAction> traj;
  traj.reserve(raw.size());
  for (const auto& [s, a] : raw) traj.push_back({s, a});
  ExpertDataset data = ExpertDataset::from_trajectory(
      std::move(traj), field<int>(doc, "num_states", what), field<int>(doc, "num_actions", what),
      field<std::uint64_t>(doc, "seed", what));

  if (doc.contains("support")) {
    const auto stored = field<std::vector<std::pair<int, int>>>(doc, "support", what);
    std::vector<StateAction> pairs;
    for (const auto& [s, a] : stored) pairs.push_back({s, a});
    std::sort(pairs.begin(), pairs.end());
    if (pairs != data.support()) throw FormatError("dataset file: stored support does not match trajectory");
  }
  if (doc.contains("histogram")) {
    const auto stored = field<std::vector<std::vector<double>>>(doc, "histogram", what);
    const auto& h = data.histogram().probs();
    bool ok = static_cast<Eigen::Index>(stored.size()) == h.rows();
    for (Eigen::Index s = 0; ok && s < h.rows(); ++s) {
      ok = static_cast<Eigen::Index>(stored[s].size()) == h.cols();
      for (Eigen::Index a = 0; ok && a < h.cols(); ++a) ok = std::abs(stored[s][a] - h(s, a)) <= 1e-12;
    }
    if (!ok) throw FormatError("dataset file: stored histogram does not match trajectory");
  }
  return data;
}

// --- Reports ------------------------------------------------------------------

std::string policy_to_json(const Policy& policy) {
  Json doc;
  doc["num_states"] = policy.num_states();
  doc["num_actions"] = policy.num_actions();
  doc["deterministic"] = policy.is_deterministic();
  if (policy.is_deterministic()) doc["actions"] = policy.actions();
  doc["action_probs"] = matrix_json(policy.action_probs());
  return doc.dump(2) + "\n";
}

std::string mixing_to_json(const MixingProfile& profile) {
  Json doc;
  doc["tau_mix"] = profile.tau_mix;
  doc["t_cap"] = profile.t_cap;
  doc["tail_certified"] = profile.tail_certified;
  doc["stationary"] = std::vector<double>(profile.stationary.values().begin(),
                                          profile.stationary.values().end());
  doc["d_curve"] = profile.d_curve;
  return doc.dump(2) + "\n";
}

std::string report_to_json(const VerificationReport& report) {
  Json doc;
  doc["check"] = report.check_name;
  doc["pass"] = report.pass;
  doc["trials"] = report.trials;
  doc["successes"] = report.successes;
  doc["empirical_rate"] = report.empirical_rate;
  doc["required_rate"] = report.required_rate;
  doc["slack"] = report.slack;
  Json details = Json::object();
  for (const auto& [key, value] : report.details) details[key] = value;
  doc["details"] = std::move(details);
  if (!report.note.empty()) doc["note"] = report.note;
  Json records = Json::array();
  for (const auto& r : report.records) {
    Json rec;
    rec["trial"] = r.trial;
    rec["seed"] = r.seed;
    rec["measured"] = r.measured;
    rec["bound"] = r.bound;
    rec["satisfied"] = r.satisfied;
    if (!r.note.empty()) rec["note"] = r.note;
    records.push_back(std::move(rec));
  }
  doc["records"] = std::move(records);
  return doc.dump(2) + "\n";
}

std::string records_to_csv(std::span<const TrialRecord> records) {
  std::string out = "trial,seed,measured,bound,satisfied\n";
  for (const auto& r : records) {
    out += std::to_string(r.trial) + "," + std::to_string(r.seed) + "," +
           format_double(r.measured) + "," + format_double(r.bound) + "," +
           (r.satisfied ? "1" : "0") + "\n";
  }
  return out;
}

// --- Files --------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace ilr
