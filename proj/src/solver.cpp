#include "ilr/solver.hpp"

#include "ilr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace ilr {

namespace {

void check_reward_shape(const FiniteMdp& mdp, const RewardTable& reward, const char* where) {
  if (reward.num_states() != mdp.num_states() || reward.num_actions() != mdp.num_actions()) {
    throw DimensionError(std::string(where) + ": reward table shape does not match MDP");
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

bool is_communicating(const FiniteMdp& mdp) {
  const int n = mdp.num_states();
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const auto row = mdp.transition_row(s, a);
      for (int next = 0; next < n; ++next)
        if (row[next] > 0.0) adj(s, next) = 1.0;
    }
  // Row-normalize so the union graph can reuse the chain SCC analysis.
  for (int s = 0; s < n; ++s) adj.row(s) /= adj.row(s).sum();
  return chain_structure(MarkovChain(std::move(adj))).irreducible;
}

SolveResult solve_average_reward(const FiniteMdp& mdp, const RewardTable& reward, double tol,
                                 long max_iters) {
  check_reward_shape(mdp, reward, "solve_average_reward");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_average_reward: tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("solve_average_reward: max_iters must be >= 1");

  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  const int ref = mdp.initial_state();
  const auto& flat = mdp.flat_transitions();
  const Eigen::MatrixXd& r = reward.values();

  std::vector<double> h(n, 0.0), v(n, 0.0);
  bool transformed = false;
  const double keep = 1.0 - kSelfLoopWeight;

  auto q_value = [&](int s, int a, const std::vector<double>& values) {
    const double* row = flat.data() + (static_cast<std::size_t>(s) * m + a) * n;
    double expect = 0.0;
    for (int next = 0; next < n; ++next) expect += row[next] * values[next];
    if (transformed) return r(s, a) + keep * expect + kSelfLoopWeight * values[s];
    return r(s, a) + expect;
  };

  const long window = std::max(200L, 20L * n);
  double best_span = std::numeric_limits<double>::infinity();
  long last_improvement = 0;
  double span = std::numeric_limits<double>::infinity();
  long k = 0;
  std::optional<bool> communicating;

  while (true) {
    if (k >= max_iters) {
      throw SolverError("solve_average_reward: max_iters = " + std::to_string(max_iters) +
                        " exceeded with span " + fmt(span));
    }
    ++k;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < m; ++a) best = std::max(best, q_value(s, a, h));
      v[s] = best;
      const double diff = best - h[s];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    span = hi - lo;
    const double offset = v[ref];
    for (int s = 0; s < n; ++s) h[s] = v[s] - offset;
    if (span <= tol) break;

    if (span < best_span * (1.0 - 1e-3)) {
      best_span = span;
      last_improvement = k;
    } else if (k - last_improvement > window) {
      if (!transformed) {
        transformed = true;
        best_span = std::numeric_limits<double>::infinity();
        last_improvement = k;
      } else {
        if (!communicating) communicating = is_communicating(mdp);
        if (!*communicating) {
          throw SolverError(
              "solve_average_reward: non-communicating MDP, relative value iteration stalled "
              "with span " + fmt(span) + " (optimal gain depends on the start state)");
        }
        last_improvement = k;
      }
    }
  }

  std::vector<int> actions(n, 0);
  for (int s = 0; s < n; ++s) {
    std::vector<double> q(m);
    for (int a = 0; a < m; ++a) q[a] = q_value(s, a, h);
    const double best = *std::max_element(q.begin(), q.end());
    for (int a = 0; a < m; ++a) {
      if (q[a] >= best - kGreedyTieEps) {
        actions[s] = a;
        break;
      }
    }
  }

  Policy policy = Policy::deterministic(actions, m);
  SolveResult out{policy, 0.0, k, span, false, transformed};
  out.gain = policy_gain(mdp, reward, policy);
  out.ergodic_under_policy = is_ergodic_policy(mdp, policy);
  return out;
}

StateDistribution policy_state_distribution(const FiniteMdp& mdp, const Policy& policy) {
  const MarkovChain chain = induced_chain(mdp, policy);
  const auto start = StateDistribution::point_mass(mdp.num_states(), mdp.initial_state());
  return limiting_distribution(chain, start);
}

OccupancyDistribution policy_occupancy(const FiniteMdp& mdp, const Policy& policy) {
  return occupancy_from_state_dist(policy_state_distribution(mdp, policy), policy);
}

double policy_gain(const FiniteMdp& mdp, const RewardTable& reward, const Policy& policy) {
  check_reward_shape(mdp, reward, "policy_gain");
  return expected_reward(policy_occupancy(mdp, policy), reward);
}

bool is_ergodic_policy(const FiniteMdp& mdp, const Policy& policy) {
  return chain_structure(induced_chain(mdp, policy)).ergodic();
}

EnumerationResult enumerate_optimal(const FiniteMdp& mdp, const RewardTable& reward) {
  check_reward_shape(mdp, reward, "enumerate_optimal");
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  long total = 1;
  for (int s = 0; s < n; ++s) {
    total *= m;
    if (total > kMaxEnumeratedPolicies) {
      throw std::invalid_argument("enumerate_optimal: |A|^|S| exceeds " +
                                  std::to_string(kMaxEnumeratedPolicies));
    }
  }

  // Index i encodes the action vector in base |A| with state 0 most significant,
  // so increasing i is lexicographic order.
  auto decode = [&](long index) {
    std::vector<int> actions(n);
    for (int s = n - 1; s >= 0; --s) {
      actions[s] = static_cast<int>(index % m);
      index /= m;
    }
    return actions;
  };

  const std::size_t n_chunks = static_cast<std::size_t>(std::min<long>(total, 64));
  const long chunk = (total + static_cast<long>(n_chunks) - 1) / static_cast<long>(n_chunks);
  const auto gains = parallel_map(n_chunks, [&](std::size_t c) {
    std::vector<double> g;
    const long begin = static_cast<long>(c) * chunk;
    const long end = std::min(total, begin + chunk);
    for (long i = begin; i < end; ++i) {
      const auto actions = decode(i);
      g.push_back(policy_gain(mdp, reward, Policy::deterministic(actions, m)));
    }
    return g;
  });

  EnumerationResult out;
  out.best_gain = -1.0;
  for (const auto& g : gains)
    for (double x : g) out.best_gain = std::max(out.best_gain, x);
  long index = 0;
  for (const auto& g : gains)
    for (double x : g) {
      if (x >= out.best_gain - 1e-9) out.best_policies.push_back(Policy::deterministic(decode(index), m));
      ++index;
    }
  return out;
}

}  // namespace ilr
