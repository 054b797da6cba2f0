#pragma once

#include "ilr/chain.hpp"
#include "ilr/mdp.hpp"

#include <stdexcept>
#include <vector>

namespace ilr {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveResult {
  Policy policy;
  /// Expected per-step reward of `policy` from the initial state, evaluated
  /// exactly on the untransformed MDP.
  double gain = 0.0;
  long iterations = 0;
  double span_residual = 0.0;
  bool ergodic_under_policy = false;
  /// Whether the self-loop transform was switched on after oscillation.
  bool aperiodicity_transform = false;
};

inline constexpr double kDefaultSolverTol = 1e-11;
inline constexpr long kDefaultSolverMaxIters = 2'000'000;
/// Self-loop weight of the aperiodicity transform.
inline constexpr double kSelfLoopWeight = 0.01;
/// Q-values within this margin of the maximum count as tied; the lowest
/// action index among them is chosen.
inline constexpr double kGreedyTieEps = 1e-9;

/// Every state reachable from every other through the union of all actions'
/// positive-probability edges.
bool is_communicating(const FiniteMdp& mdp);

/// Relative value iteration
///   h_{k+1}(s) = max_a [r(s,a) + sum_s' T(s'|s,a) h_k(s')] - (same)(s1)
/// stopped once the span of successive differences is <= tol. If the span
/// stalls (periodic dynamics) the iteration switches to the MDP whose actions
/// keep a self-loop of weight 0.01; gains and greedy policies are unchanged by
/// that transform.
///
/// Throws SolverError after max_iters, or when the span stalls on a
/// non-communicating MDP whose optimal gain depends on the start state.
SolveResult solve_average_reward(const FiniteMdp& mdp, const RewardTable& reward,
                                 double tol = kDefaultSolverTol,
                                 long max_iters = kDefaultSolverMaxIters);

/// Cesaro-limit state distribution of the policy's chain started at s1.
StateDistribution policy_state_distribution(const FiniteMdp& mdp, const Policy& policy);

/// rho^pi(s,a) from s1.
OccupancyDistribution policy_occupancy(const FiniteMdp& mdp, const Policy& policy);

/// Expected per-step reward of `policy` from s1. Uses the stationary law for
/// irreducible chains and otherwise weights each reachable recurrent class by
/// its absorption probability.
double policy_gain(const FiniteMdp& mdp, const RewardTable& reward, const Policy& policy);

/// Irreducible and aperiodic induced chain.
bool is_ergodic_policy(const FiniteMdp& mdp, const Policy& policy);

struct EnumerationResult {
  double best_gain = 0.0;
  /// All deterministic policies within 1e-9 of best_gain, in lexicographic
  /// order of their action vectors.
  std::vector<Policy> best_policies;
};

inline constexpr long kMaxEnumeratedPolicies = 1'000'000;

/// Brute-force oracle over all |A|^|S| deterministic policies.
EnumerationResult enumerate_optimal(const FiniteMdp& mdp, const RewardTable& reward);

}  // namespace ilr
