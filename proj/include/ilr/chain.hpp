#pragma once

#include "ilr/mdp.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ilr {

/// Raised when a chain does not meet the structural precondition of an analysis
/// (reducible, periodic, or insufficient horizon).
class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChainStructure {
  bool irreducible = false;
  /// Period of the single recurrent class when irreducible; otherwise the
  /// period of the first recurrent class (see class_periods for all of them).
  int period = 1;
  /// Closed communicating classes, each sorted, ordered by smallest member.
  std::vector<std::vector<int>> recurrent_classes;
  std::vector<int> class_periods;
  /// States outside every recurrent class.
  std::vector<int> transient_states;

  bool aperiodic() const noexcept { return period == 1; }
  bool ergodic() const noexcept { return irreducible && period == 1; }
};

/// Strongly connected components of the positive-probability edge graph and
/// period by BFS level-difference gcd.
ChainStructure chain_structure(const MarkovChain& chain);

/// Formats recurrent classes as "{0,1} {3}" for error messages.
std::string describe_classes(const std::vector<std::vector<int>>& classes);

/// Unique rho with rho P = rho for an irreducible chain, by a direct solve of
/// the balance equations with one equation replaced by normalization.
/// Throws ChainError for reducible chains or a failed residual check.
StateDistribution stationary_distribution(const MarkovChain& chain);

/// (1/n) sum_{i<n} start P^i.
StateDistribution cesaro_average(const MarkovChain& chain, const StateDistribution& start,
                                 long n_terms);

/// Exact Cesaro limit of start P^i for an arbitrary finite chain: mass
/// absorbed into each recurrent class times that class's stationary law.
StateDistribution limiting_distribution(const MarkovChain& chain, const StateDistribution& start);

/// Half the L1 distance. Throws DimensionError on size mismatch.
double total_variation(std::span<const double> p, std::span<const double> q);
double total_variation(const StateDistribution& p, const StateDistribution& q);
double total_variation(const OccupancyDistribution& p, const OccupancyDistribution& q);

struct TvSupResult {
  double value = 0.0;
  /// Bit x set iff element x belongs to the maximizing subset.
  std::uint32_t subset = 0;
};

inline constexpr int kTvOracleMaxSupport = 20;

/// sup_M |p(M) - q(M)| by enumerating all 2^|X| subsets. |X| <= 20.
TvSupResult tv_sup_oracle(std::span<const double> p, std::span<const double> q);

/// Mixing-time threshold on the worst-case TV distance to stationarity.
inline constexpr double kMixingThreshold = 0.25;
/// d(t_cap) below this makes the geometric tail negligible.
inline constexpr double kTailCertifyLevel = 1e-9;

struct MixingProfile {
  int tau_mix = 0;
  /// d(t) = max_s TV(delta_s P^t, rho) for t = 0..t_cap.
  std::vector<double> d_curve;
  int t_cap = 0;
  bool tail_certified = false;
  StateDistribution stationary = StateDistribution::point_mass(1, 0);
};

/// Exact d(t) by iterating P^t from every indicator start.
/// Throws ChainError for reducible or periodic chains, or when d never
/// reaches 1/4 within t_cap.
MixingProfile mixing_profile(const MarkovChain& chain, int t_cap);

/// mixing_profile with t_cap chosen as the first t at which the tail is
/// certified, searching up to `max_cap`. The result is uncertified only if
/// max_cap was hit.
MixingProfile certified_mixing_profile(const MarkovChain& chain, int max_cap = 1 << 16);

/// Upper estimate of sum_{t>=0} TV(start P^t, rho): the exact partial sum to
/// t_cap plus the tail bound TV(start P^t_cap, rho) * 2 * tau_mix.
double tv_decay_sum(const MarkovChain& chain, const StateDistribution& start,
                    const MixingProfile& profile);

}  // namespace ilr
