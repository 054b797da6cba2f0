#include "ilr/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ilr {

namespace {

std::string fmt_num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void check_stochastic_rows(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + ": invalid entry " + fmt_num(v) +
                                    " at (" + std::to_string(r) + "," + std::to_string(c) + ")");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTol) {
      throw std::invalid_argument(std::string(what) + ": row " + std::to_string(r) +
                                  " sums to " + fmt_num(sum));
    }
  }
}

void check_distribution(std::span<const double> values, const char* what) {
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": invalid entry " + fmt_num(v));
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kStochasticTol) {
    throw std::invalid_argument(std::string(what) + ": sums to " + fmt_num(sum));
  }
}

}  // namespace

FiniteMdp::FiniteMdp(int num_states, int num_actions, std::vector<double> transitions,
                     std::vector<double> rewards, int initial_state)
    : num_states_(num_states),
      num_actions_(num_actions),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)),
      initial_state_(initial_state) {
  if (num_states <= 0 || num_actions <= 0) {
    throw DimensionError("FiniteMdp: state and action counts must be positive");
  }
  const auto sa = static_cast<std::size_t>(num_states) * static_cast<std::size_t>(num_actions);
  if (transitions_.size() != sa * static_cast<std::size_t>(num_states)) {
    throw DimensionError("FiniteMdp: transition tensor has " +
                         std::to_string(transitions_.size()) + " entries, expected " +
                         std::to_string(sa * num_states));
  }
  if (rewards_.size() != sa) {
    throw DimensionError("FiniteMdp: reward table has " + std::to_string(rewards_.size()) +
                         " entries, expected " + std::to_string(sa));
  }
}

FiniteMdp FiniteMdp::from_nested(const Tensor3& transitions, const Table& rewards,
                                 int initial_state) {
  const int n = static_cast<int>(transitions.size());
  if (n == 0 || transitions.front().empty()) {
    throw DimensionError("FiniteMdp: empty transition tensor");
  }
  const int m = static_cast<int>(transitions.front().size());
  std::vector<double> flat_t;
  flat_t.reserve(static_cast<std::size_t>(n) * m * n);
  for (int s = 0; s < n; ++s) {
    if (static_cast<int>(transitions[s].size()) != m) {
      throw DimensionError("FiniteMdp: state " + std::to_string(s) + " has " +
                           std::to_string(transitions[s].size()) + " actions, expected " +
                           std::to_string(m));
    }
    for (int a = 0; a < m; ++a) {
      if (static_cast<int>(transitions[s][a].size()) != n) {
        throw DimensionError("FiniteMdp: transition row (" + std::to_string(s) + "," +
                             std::to_string(a) + ") has wrong length");
      }
      flat_t.insert(flat_t.end(), transitions[s][a].begin(), transitions[s][a].end());
    }
  }
  if (static_cast<int>(rewards.size()) != n) {
    throw DimensionError("FiniteMdp: reward table has wrong number of states");
  }
  std::vector<double> flat_r;
  flat_r.reserve(static_cast<std::size_t>(n) * m);
  for (int s = 0; s < n; ++s) {
    if (static_cast<int>(rewards[s].size()) != m) {
      throw DimensionError("FiniteMdp: reward row " + std::to_string(s) + " has wrong length");
    }
    flat_r.insert(flat_r.end(), rewards[s].begin(), rewards[s].end());
  }
  return FiniteMdp(n, m, std::move(flat_t), std::move(flat_r), initial_state);
}

ValidationOutcome validate_mdp(const FiniteMdp& mdp) {
  ValidationOutcome out;
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < m; ++a) {
      const std::string at = "(" + std::to_string(s) + "," + std::to_string(a) + ")";
      double sum = 0.0;
      const auto row = mdp.transition_row(s, a);
      for (int next = 0; next < n; ++next) {
        const double p = row[next];
        if (!std::isfinite(p) || p < 0.0) {
          out.violations.push_back("negative or non-finite probability " + fmt_num(p) + " at " +
                                   "(" + std::to_string(s) + "," + std::to_string(a) + "," +
                                   std::to_string(next) + ")");
        }
        sum += p;
      }
      if (!(std::abs(sum - 1.0) <= kStochasticTol)) {
        out.violations.push_back("row sum " + fmt_num(sum) + " at " + at);
      }
      const double r = mdp.reward(s, a);
      if (!(r >= 0.0 && r <= 1.0)) {
        out.violations.push_back("reward out of [0,1] at " + at + ": " + fmt_num(r));
      }
    }
  }
  if (mdp.initial_state() < 0 || mdp.initial_state() >= n) {
    out.violations.push_back("initial state " + std::to_string(mdp.initial_state()) +
                             " out of range [0," + std::to_string(n) + ")");
  }
  return out;
}

void require_valid(const FiniteMdp& mdp) {
  const auto outcome = validate_mdp(mdp);
  if (outcome.ok()) return;
  std::string msg = "invalid MDP:";
  for (const auto& v : outcome.violations) msg += "\n  " + v;
  throw std::invalid_argument(msg);
}

// --- Policy -----------------------------------------------------------------

Policy::Policy(Eigen::MatrixXd action_probs) : probs_(std::move(action_probs)) {
  if (probs_.rows() == 0 || probs_.cols() == 0) {
    throw DimensionError("Policy: empty action table");
  }
  check_stochastic_rows(probs_, "Policy");
  deterministic_ = true;
  for (Eigen::Index s = 0; s < probs_.rows() && deterministic_; ++s) {
    int ones = 0;
    for (Eigen::Index a = 0; a < probs_.cols(); ++a) {
      const double p = probs_(s, a);
      if (p == 1.0) {
        ++ones;
      } else if (p != 0.0) {
        deterministic_ = false;
        break;
      }
    }
    if (ones != 1) deterministic_ = false;
  }
}

Policy Policy::deterministic(std::span<const int> actions, int num_actions) {
  if (actions.empty() || num_actions <= 0) throw DimensionError("Policy: empty policy");
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(actions.size()), num_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= num_actions) {
      throw std::invalid_argument("Policy: action " + std::to_string(actions[s]) +
                                  " out of range at state " + std::to_string(s));
    }
    probs(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
  }
  return Policy(std::move(probs));
}

Policy Policy::uniform(int num_states, int num_actions) {
  return Policy(Eigen::MatrixXd::Constant(num_states, num_actions, 1.0 / num_actions));
}

int Policy::action(int s) const {
  if (!deterministic_) throw std::logic_error("Policy::action: policy is stochastic");
  Eigen::Index a = 0;
  probs_.row(s).maxCoeff(&a);
  return static_cast<int>(a);
}

std::vector<int> Policy::actions() const {
  std::vector<int> out(static_cast<std::size_t>(num_states()));
  for (int s = 0; s < num_states(); ++s) out[s] = action(s);
  return out;
}

// --- Distributions ----------------------------------------------------------

MarkovChain::MarkovChain(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw DimensionError("MarkovChain: matrix must be square and non-empty");
  }
  check_stochastic_rows(matrix_, "MarkovChain");
}

StateDistribution::StateDistribution(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw DimensionError("StateDistribution: empty");
  check_distribution(values(), "StateDistribution");
}

StateDistribution StateDistribution::point_mass(int num_states, int s) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(num_states);
  p[s] = 1.0;
  return StateDistribution(std::move(p));
}

StateDistribution StateDistribution::uniform(int num_states) {
  return StateDistribution(Eigen::VectorXd::Constant(num_states, 1.0 / num_states));
}

OccupancyDistribution::OccupancyDistribution(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw DimensionError("OccupancyDistribution: empty");
  check_distribution(values(), "OccupancyDistribution");
}

StateDistribution OccupancyDistribution::state_marginal() const {
  return StateDistribution(probs_.rowwise().sum());
}

RewardTable::RewardTable(Eigen::MatrixXd values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  if (values_.size() == 0) throw DimensionError("RewardTable: empty");
  for (Eigen::Index s = 0; s < values_.rows(); ++s) {
    for (Eigen::Index a = 0; a < values_.cols(); ++a) {
      const double r = values_(s, a);
      if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument("RewardTable: reward out of [0,1] at (" + std::to_string(s) +
                                    "," + std::to_string(a) + "): " + fmt_num(r));
      }
    }
  }
}

RewardTable extrinsic_reward(const FiniteMdp& mdp) {
  Eigen::MatrixXd r(mdp.num_states(), mdp.num_actions());
  for (int s = 0; s < mdp.num_states(); ++s)
    for (int a = 0; a < mdp.num_actions(); ++a) r(s, a) = mdp.reward(s, a);
  return RewardTable(std::move(r), "extrinsic");
}

// --- Composition ------------------------------------------------------------

MarkovChain induced_chain(const FiniteMdp& mdp, const Policy& policy) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw DimensionError("induced_chain: policy is " + std::to_string(policy.num_states()) + "x" +
                         std::to_string(policy.num_actions()) + ", MDP is " +
                         std::to_string(mdp.num_states()) + "x" +
                         std::to_string(mdp.num_actions()));
  }
  const int n = mdp.num_states();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    if (policy.is_deterministic()) {
      const auto row = mdp.transition_row(s, policy.action(s));
      for (int next = 0; next < n; ++next) p(s, next) = row[next];
      continue;
    }
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const double w = policy.prob(s, a);
      if (w == 0.0) continue;
      const auto row = mdp.transition_row(s, a);
      for (int next = 0; next < n; ++next) p(s, next) += w * row[next];
    }
  }
  return MarkovChain(std::move(p));
}

OccupancyDistribution occupancy_from_state_dist(const StateDistribution& rho_s,
                                                const Policy& policy) {
  if (rho_s.size() != policy.num_states()) {
    throw DimensionError("occupancy_from_state_dist: distribution over " +
                         std::to_string(rho_s.size()) + " states, policy over " +
                         std::to_string(policy.num_states()));
  }
  Eigen::MatrixXd occ = policy.action_probs();
  for (int s = 0; s < rho_s.size(); ++s) occ.row(s) *= rho_s[s];
  return OccupancyDistribution(std::move(occ));
}

double expected_reward(const OccupancyDistribution& occ, const RewardTable& reward) {
  if (occ.num_states() != reward.num_states() || occ.num_actions() != reward.num_actions()) {
    throw DimensionError("expected_reward: occupancy and reward shapes differ");
  }
  const double v = occ.probs().cwiseProduct(reward.values()).sum();
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace ilr
