#pragma once

#include <Eigen/Dense>

#include <compare>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ilr {

/// Absolute tolerance for every "sums to one" check on constructed inputs.
inline constexpr double kStochasticTol = 1e-12;

/// Thrown when two objects that must share a state or action space do not.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StateAction {
  int state = 0;
  int action = 0;
  auto operator<=>(const StateAction&) const = default;
};

/// Finite average-reward MDP (S, A, T, R, s1).
///
/// Construction only checks shapes. Probability and reward ranges are checked
/// by validate_mdp() so that malformed models can be inspected rather than
/// rejected outright; loaders call require_valid().
class FiniteMdp {
 public:
  using Tensor3 = std::vector<std::vector<std::vector<double>>>;
  using Table = std::vector<std::vector<double>>;

  /// `transitions` is flattened as [s][a][s'] and `rewards` as [s][a].
  FiniteMdp(int num_states, int num_actions, std::vector<double> transitions,
            std::vector<double> rewards, int initial_state);

  static FiniteMdp from_nested(const Tensor3& transitions, const Table& rewards,
                               int initial_state);

  int num_states() const noexcept { return num_states_; }
  int num_actions() const noexcept { return num_actions_; }
  int initial_state() const noexcept { return initial_state_; }

  double transition(int s, int a, int next) const {
    return transitions_[offset(s, a) + static_cast<std::size_t>(next)];
  }
  std::span<const double> transition_row(int s, int a) const {
    return {transitions_.data() + offset(s, a), static_cast<std::size_t>(num_states_)};
  }
  double reward(int s, int a) const {
    return rewards_[static_cast<std::size_t>(s) * num_actions_ + a];
  }

  const std::vector<double>& flat_transitions() const noexcept { return transitions_; }
  const std::vector<double>& flat_rewards() const noexcept { return rewards_; }

  bool operator==(const FiniteMdp&) const = default;

 private:
  std::size_t offset(int s, int a) const {
    return (static_cast<std::size_t>(s) * num_actions_ + a) * num_states_;
  }

  int num_states_;
  int num_actions_;
  std::vector<double> transitions_;
  std::vector<double> rewards_;
  int initial_state_;
};

struct ValidationOutcome {
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Lists every broken invariant: negative or non-normalized transition rows,
/// rewards outside [0,1], and an out-of-range initial state.
ValidationOutcome validate_mdp(const FiniteMdp& mdp);

/// Throws std::invalid_argument carrying all violations when the MDP is invalid.
void require_valid(const FiniteMdp& mdp);

/// Stationary policy pi(a|s), stored as a |S| x |A| row-stochastic matrix.
class Policy {
 public:
  explicit Policy(Eigen::MatrixXd action_probs);

  static Policy deterministic(std::span<const int> actions, int num_actions);
  static Policy uniform(int num_states, int num_actions);

  int num_states() const noexcept { return static_cast<int>(probs_.rows()); }
  int num_actions() const noexcept { return static_cast<int>(probs_.cols()); }
  double prob(int s, int a) const { return probs_(s, a); }
  const Eigen::MatrixXd& action_probs() const noexcept { return probs_; }

  /// True iff every row is an indicator vector.
  bool is_deterministic() const noexcept { return deterministic_; }

  /// Chosen action at `s`; throws std::logic_error for stochastic policies.
  int action(int s) const;
  std::vector<int> actions() const;

  bool operator==(const Policy& other) const { return probs_ == other.probs_; }

 private:
  Eigen::MatrixXd probs_;
  bool deterministic_ = false;
};

/// Row-stochastic transition matrix over states.
class MarkovChain {
 public:
  explicit MarkovChain(Eigen::MatrixXd matrix);

  int num_states() const noexcept { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  double operator()(int s, int next) const { return matrix_(s, next); }

 private:
  Eigen::MatrixXd matrix_;
};

class StateDistribution {
 public:
  explicit StateDistribution(Eigen::VectorXd probs);

  static StateDistribution point_mass(int num_states, int s);
  static StateDistribution uniform(int num_states);

  int size() const noexcept { return static_cast<int>(probs_.size()); }
  double operator[](int s) const { return probs_[s]; }
  const Eigen::VectorXd& probs() const noexcept { return probs_; }
  std::span<const double> values() const noexcept {
    return {probs_.data(), static_cast<std::size_t>(probs_.size())};
  }

 private:
  Eigen::VectorXd probs_;
};

/// Distribution over state-action pairs, stored as a |S| x |A| matrix.
class OccupancyDistribution {
 public:
  explicit OccupancyDistribution(Eigen::MatrixXd probs);

  int num_states() const noexcept { return static_cast<int>(probs_.rows()); }
  int num_actions() const noexcept { return static_cast<int>(probs_.cols()); }
  double operator()(int s, int a) const { return probs_(s, a); }
  const Eigen::MatrixXd& probs() const noexcept { return probs_; }
  std::span<const double> values() const noexcept {
    return {probs_.data(), static_cast<std::size_t>(probs_.size())};
  }

  /// Marginal over actions.
  StateDistribution state_marginal() const;

 private:
  Eigen::MatrixXd probs_;
};

/// Bounded reward r(s,a) in [0,1] with a free-text label.
class RewardTable {
 public:
  RewardTable(Eigen::MatrixXd values, std::string label);

  int num_states() const noexcept { return static_cast<int>(values_.rows()); }
  int num_actions() const noexcept { return static_cast<int>(values_.cols()); }
  double operator()(int s, int a) const { return values_(s, a); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::string& label() const noexcept { return label_; }

 private:
  Eigen::MatrixXd values_;
  std::string label_;
};

/// The MDP's own reward table, labelled "extrinsic".
RewardTable extrinsic_reward(const FiniteMdp& mdp);

/// P[s][s'] = sum_a pi(a|s) T(s'|s,a). Rows of deterministic policies are
/// copied verbatim from T.
MarkovChain induced_chain(const FiniteMdp& mdp, const Policy& policy);

/// rho(s,a) = rho_S(s) pi(a|s).
OccupancyDistribution occupancy_from_state_dist(const StateDistribution& rho_s,
                                                const Policy& policy);

/// E_occ[r], clamped into [0,1] against rounding.
double expected_reward(const OccupancyDistribution& occ, const RewardTable& reward);

}  // namespace ilr
