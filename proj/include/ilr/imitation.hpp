#pragma once

#include "ilr/chain.hpp"
#include "ilr/mdp.hpp"
#include "ilr/solver.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace ilr {

/// A deterministic expert whose induced chain is irreducible and aperiodic,
/// together with its stationary quantities and mixing profile.
struct ExpertSpec {
  Policy policy;
  MarkovChain chain;
  StateDistribution stationary;
  OccupancyDistribution occupancy;
  MixingProfile mixing;

  int tau_mix() const noexcept { return mixing.tau_mix; }
};

/// Builds the ExpertSpec of a given policy. Throws std::invalid_argument if the
/// policy is stochastic or its chain is not ergodic.
ExpertSpec make_expert_from_policy(const FiniteMdp& mdp, const Policy& policy);

/// Rejection-samples uniformly random deterministic policies until one induces
/// an ergodic chain. Throws std::runtime_error("no ergodic deterministic policy
/// found") after max_attempts.
ExpertSpec make_expert(const FiniteMdp& mdp, std::uint64_t rng_seed, int max_attempts = 1000);

/// Expert that follows the extrinsic-reward optimal policy returned by the
/// solver. Throws std::invalid_argument if that policy's chain is not ergodic.
ExpertSpec make_optimal_expert(const FiniteMdp& mdp);

/// Demonstration trajectory (s_1, a_1), ..., (s_N, a_N) with its histogram and
/// support. Always non-empty.
class ExpertDataset {
 public:
  static ExpertDataset from_trajectory(std::vector<StateAction> trajectory, int num_states,
                                       int num_actions, std::uint64_t seed);

  const std::vector<StateAction>& trajectory() const noexcept { return trajectory_; }
  const OccupancyDistribution& histogram() const noexcept { return histogram_; }
  const StateDistribution& state_histogram() const noexcept { return state_histogram_; }
  /// Visited pairs in increasing (state, action) order.
  const std::vector<StateAction>& support() const noexcept { return support_; }
  std::uint64_t seed() const noexcept { return seed_; }
  long size() const noexcept { return static_cast<long>(trajectory_.size()); }
  int num_states() const noexcept { return histogram_.num_states(); }
  int num_actions() const noexcept { return histogram_.num_actions(); }

  /// The first n pairs, as used for fractional datasets.
  ExpertDataset prefix(long n) const;

 private:
  ExpertDataset(std::vector<StateAction> trajectory, OccupancyDistribution histogram,
                StateDistribution state_histogram, std::vector<StateAction> support,
                std::uint64_t seed);

  std::vector<StateAction> trajectory_;
  OccupancyDistribution histogram_;
  StateDistribution state_histogram_;
  std::vector<StateAction> support_;
  std::uint64_t seed_;
};

/// Rolls out `policy` from the initial state for n_steps. Step t consumes the
/// counter-based draws 2t (action) and 2t+1 (next state) of the seed's stream.
ExpertDataset sample_trajectory(const FiniteMdp& mdp, const Policy& policy, long n_steps,
                                std::uint64_t rng_seed);

struct TrajectoryReturn {
  double total = 0.0;
  double per_step = 0.0;
};

TrajectoryReturn trajectory_return(std::span<const StateAction> trajectory,
                                   const RewardTable& reward);

/// r(s,a) = 1 if (s,a) is in the support, else 0. Labelled "intrinsic".
RewardTable intrinsic_reward(const FiniteMdp& mdp, std::span<const StateAction> support);

struct IlrResult {
  Policy policy;
  /// E_{rho^I}[R_int], evaluated exactly from s1.
  double intrinsic_gain = 0.0;
  SolveResult result;
};

/// Imitation by a single average-reward solve on the indicator reward of the
/// dataset support. The extrinsic reward stored in the MDP is never read.
IlrResult ilr(const FiniteMdp& mdp, const ExpertDataset& dataset,
              double solver_tol = kDefaultSolverTol);

/// Same reduction for an explicit support set (may be empty).
IlrResult ilr_from_support(const FiniteMdp& mdp, std::span<const StateAction> support,
                           double solver_tol = kDefaultSolverTol);

/// Majority action per visited state (lowest index on ties); uniform over all
/// actions at unvisited states.
Policy behavioral_cloning(const FiniteMdp& mdp, const ExpertDataset& dataset);

struct StreakDecomposition {
  /// streak length -> number of maximal agreeing runs of that length
  std::map<long, long> streak_counts;
  long disagreement_count = 0;
  double agreement_fraction = 0.0;

  long streak_total() const;
  long agreeing_steps() const;
};

/// Splits a trajectory into maximal runs where a_t equals the deterministic
/// reference action at s_t. Throws std::invalid_argument for a stochastic
/// reference.
StreakDecomposition streak_decompose(std::span<const StateAction> trajectory,
                                     const Policy& reference);

}  // namespace ilr
