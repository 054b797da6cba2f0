#include "ilr/imitation.hpp"

#include "ilr/rng.hpp"

#include <algorithm>
#include <numeric>

namespace ilr {

ExpertSpec make_expert_from_policy(const FiniteMdp& mdp, const Policy& policy) {
  if (!policy.is_deterministic()) {
    throw std::invalid_argument("make_expert_from_policy: expert policy must be deterministic");
  }
  MarkovChain chain = induced_chain(mdp, policy);
  const auto structure = chain_structure(chain);
  if (!structure.ergodic()) {
    throw std::invalid_argument("make_expert_from_policy: expert chain is not irreducible and "
                                "aperiodic (recurrent classes " +
                                describe_classes(structure.recurrent_classes) + ", period " +
                                std::to_string(structure.period) + ")");
  }
  MixingProfile mixing = certified_mixing_profile(chain);
  StateDistribution stationary = mixing.stationary;
  OccupancyDistribution occupancy = occupancy_from_state_dist(stationary, policy);
  return ExpertSpec{policy, std::move(chain), std::move(stationary), std::move(occupancy),
                    std::move(mixing)};
}

ExpertSpec make_expert(const FiniteMdp& mdp, std::uint64_t rng_seed, int max_attempts) {
  require_valid(mdp);
  CounterRng rng(rng_seed);
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  std::vector<int> actions(n);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    for (int s = 0; s < n; ++s) actions[s] = static_cast<int>(rng.below(m));
    const Policy candidate = Policy::deterministic(actions, m);
    if (chain_structure(induced_chain(mdp, candidate)).ergodic()) {
      return make_expert_from_policy(mdp, candidate);
    }
  }
  throw std::runtime_error("make_expert: no ergodic deterministic policy found in " +
                           std::to_string(max_attempts) + " attempts");
}

ExpertSpec make_optimal_expert(const FiniteMdp& mdp) {
  require_valid(mdp);
  return make_expert_from_policy(mdp, solve_average_reward(mdp, extrinsic_reward(mdp)).policy);
}

// --- Dataset ----------------------------------------------------------------

ExpertDataset::ExpertDataset(std::vector<StateAction> trajectory, OccupancyDistribution histogram,
                             StateDistribution state_histogram, std::vector<StateAction> support,
                             std::uint64_t seed)
    : trajectory_(std::move(trajectory)),
      histogram_(std::move(histogram)),
      state_histogram_(std::move(state_histogram)),
      support_(std::move(support)),
      seed_(seed) {}

ExpertDataset ExpertDataset::from_trajectory(std::vector<StateAction> trajectory, int num_states,
                                             int num_actions, std::uint64_t seed) {
  if (trajectory.empty()) throw std::invalid_argument("ExpertDataset: empty trajectory");
  if (num_states <= 0 || num_actions <= 0) throw DimensionError("ExpertDataset: empty spaces");
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(num_states, num_actions);
  for (const auto& [s, a] : trajectory) {
    if (s < 0 || s >= num_states || a < 0 || a >= num_actions) {
      throw std::out_of_range("ExpertDataset: pair (" + std::to_string(s) + "," +
                              std::to_string(a) + ") out of range");
    }
    counts(s, a) += 1.0;
  }
  const double n = static_cast<double>(trajectory.size());
  std::vector<StateAction> support;
  Eigen::VectorXd state_counts = Eigen::VectorXd::Zero(num_states);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) {
      if (counts(s, a) > 0.0) support.push_back({s, a});
      state_counts[s] += counts(s, a);
    }
  return ExpertDataset(std::move(trajectory), OccupancyDistribution(counts / n),
                       StateDistribution(state_counts / n), std::move(support), seed);
}

ExpertDataset ExpertDataset::prefix(long n) const {
  if (n < 1 || n > size()) {
    throw std::out_of_range("ExpertDataset::prefix: length " + std::to_string(n) +
                            " outside [1, " + std::to_string(size()) + "]");
  }
  return from_trajectory({trajectory_.begin(), trajectory_.begin() + n}, num_states(),
                         num_actions(), seed_);
}

ExpertDataset sample_trajectory(const FiniteMdp& mdp, const Policy& policy, long n_steps,
                                std::uint64_t rng_seed) {
  if (n_steps < 1) throw std::invalid_argument("sample_trajectory: n_steps must be >= 1");
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw DimensionError("sample_trajectory: policy shape does not match MDP");
  }
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  // Row-major copy so each state's action distribution is contiguous.
  std::vector<double> pi(static_cast<std::size_t>(n) * m);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m; ++a) pi[static_cast<std::size_t>(s) * m + a] = policy.prob(s, a);

  const CounterRng rng(rng_seed);
  std::vector<StateAction> traj;
  traj.reserve(static_cast<std::size_t>(n_steps));
  int s = mdp.initial_state();
  for (long t = 0; t < n_steps; ++t) {
    const auto step = static_cast<std::uint64_t>(t);
    const std::span<const double> row(pi.data() + static_cast<std::size_t>(s) * m,
                                      static_cast<std::size_t>(m));
    const int a = static_cast<int>(sample_index(row, rng.uniform_at(2 * step)));
    traj.push_back({s, a});
    s = static_cast<int>(sample_index(mdp.transition_row(s, a), rng.uniform_at(2 * step + 1)));
  }
  return ExpertDataset::from_trajectory(std::move(traj), n, m, rng_seed);
}

TrajectoryReturn trajectory_return(std::span<const StateAction> trajectory,
                                   const RewardTable& reward) {
  TrajectoryReturn out;
  for (const auto& [s, a] : trajectory) out.total += reward(s, a);
  if (!trajectory.empty()) out.per_step = out.total / static_cast<double>(trajectory.size());
  return out;
}

// --- Reduction --------------------------------------------------------------

RewardTable intrinsic_reward(const FiniteMdp& mdp, std::span<const StateAction> support) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(mdp.num_states(), mdp.num_actions());
  for (const auto& [s, a] : support) {
    if (s < 0 || s >= mdp.num_states() || a < 0 || a >= mdp.num_actions()) {
      throw std::out_of_range("intrinsic_reward: pair (" + std::to_string(s) + "," +
                              std::to_string(a) + ") out of range");
    }
    r(s, a) = 1.0;
  }
  return RewardTable(std::move(r), "intrinsic");
}

IlrResult ilr_from_support(const FiniteMdp& mdp, std::span<const StateAction> support,
                           double solver_tol) {
  const RewardTable r_int = intrinsic_reward(mdp, support);
  SolveResult result = solve_average_reward(mdp, r_int, solver_tol);
  return IlrResult{result.policy, result.gain, std::move(result)};
}

IlrResult ilr(const FiniteMdp& mdp, const ExpertDataset& dataset, double solver_tol) {
  if (dataset.num_states() != mdp.num_states() || dataset.num_actions() != mdp.num_actions()) {
    throw DimensionError("ilr: dataset shape does not match MDP");
  }
  return ilr_from_support(mdp, dataset.support(), solver_tol);
}

Policy behavioral_cloning(const FiniteMdp& mdp, const ExpertDataset& dataset) {
  if (dataset.num_states() != mdp.num_states() || dataset.num_actions() != mdp.num_actions()) {
    throw DimensionError("behavioral_cloning: dataset shape does not match MDP");
  }
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  std::vector<std::vector<long>> counts(n, std::vector<long>(m, 0));
  for (const auto& [s, a] : dataset.trajectory()) ++counts[s][a];

  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(n, m);
  for (int s = 0; s < n; ++s) {
    const auto it = std::max_element(counts[s].begin(), counts[s].end());
    if (*it == 0) {
      probs.row(s).setConstant(1.0 / m);
    } else {
      probs(s, static_cast<int>(it - counts[s].begin())) = 1.0;
    }
  }
  return Policy(std::move(probs));
}

// --- Streaks ----------------------------------------------------------------

long StreakDecomposition::streak_total() const {
  long total = 0;
  for (const auto& [len, count] : streak_counts) total += count;
  return total;
}

long StreakDecomposition::agreeing_steps() const {
  long total = 0;
  for (const auto& [len, count] : streak_counts) total += len * count;
  return total;
}

StreakDecomposition streak_decompose(std::span<const StateAction> trajectory,
                                     const Policy& reference) {
  if (!reference.is_deterministic()) {
    throw std::invalid_argument("streak_decompose: reference policy must be deterministic");
  }
  const auto expert_actions = reference.actions();
  StreakDecomposition out;
  long run = 0;
  for (const auto& [s, a] : trajectory) {
    if (a == expert_actions[s]) {
      ++run;
      continue;
    }
    ++out.disagreement_count;
    if (run > 0) ++out.streak_counts[run];
    run = 0;
  }
  if (run > 0) ++out.streak_counts[run];
  if (!trajectory.empty()) {
    out.agreement_fraction =
        static_cast<double>(out.agreeing_steps()) / static_cast<double>(trajectory.size());
  }
  return out;
}

}  // namespace ilr
