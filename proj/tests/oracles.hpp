#pragma once

// Reference computations for the tests. They use different algorithms from the
// library (subset enumeration, repeated squaring, plain loops) on purpose.

#include "ilr/mdp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double tv_by_subsets(const std::vector<double>& p, const std::vector<double>& q) {
  const int k = static_cast<int>(p.size());
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    double diff = 0.0;
    for (int x = 0; x < k; ++x)
      if (mask & (1u << x)) diff += p[x] - q[x];
    best = std::max(best, std::abs(diff));
  }
  return best;
}

/// (1/n) sum_{t<n} P^t for n = 2^doublings, via A_{2n} = (A_n + A_n P^n) / 2.
inline Eigen::MatrixXd cesaro_matrix(const Eigen::MatrixXd& p, int doublings = 40) {
  Eigen::MatrixXd avg = Eigen::MatrixXd::Identity(p.rows(), p.cols());
  Eigen::MatrixXd power = p;
  for (int k = 0; k < doublings; ++k) {
    avg = 0.5 * (avg + avg * power);
    power = power * power;
    // Squaring doubles any row-sum drift, so renormalize.
    for (Eigen::Index i = 0; i < power.rows(); ++i) power.row(i) /= power.row(i).sum();
  }
  return avg;
}

inline Eigen::MatrixXd chain_matrix(const ilr::FiniteMdp& mdp, const std::vector<int>& actions) {
  const int n = mdp.num_states();
  Eigen::MatrixXd p(n, n);
  for (int s = 0; s < n; ++s)
    for (int next = 0; next < n; ++next) p(s, next) = mdp.transition(s, actions[s], next);
  return p;
}

inline double gain(const ilr::FiniteMdp& mdp, const Eigen::MatrixXd& reward,
                   const std::vector<int>& actions) {
  const Eigen::MatrixXd avg = cesaro_matrix(chain_matrix(mdp, actions));
  double g = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s) g += avg(mdp.initial_state(), s) * reward(s, actions[s]);
  return g;
}

/// Best gain over all deterministic policies from the initial state.
inline double best_gain(const ilr::FiniteMdp& mdp, const Eigen::MatrixXd& reward) {
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  std::vector<int> actions(n, 0);
  double best = -1.0;
  while (true) {
    best = std::max(best, gain(mdp, reward, actions));
    int s = n - 1;
    while (s >= 0 && ++actions[s] == m) actions[s--] = 0;
    if (s < 0) break;
  }
  return best;
}

/// d(t) = max_s TV(delta_s P^t, rho) by plain row propagation.
inline std::vector<double> d_curve(const Eigen::MatrixXd& p, const std::vector<double>& rho,
                                   int t_max) {
  const int n = static_cast<int>(p.rows());
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (int s = 0; s < n; ++s) rows[s][s] = 1.0;
  std::vector<double> d;
  for (int t = 0; t <= t_max; ++t) {
    double worst = 0.0;
    for (int s = 0; s < n; ++s) {
      double l1 = 0.0;
      for (int j = 0; j < n; ++j) l1 += std::abs(rows[s][j] - rho[j]);
      worst = std::max(worst, 0.5 * l1);
    }
    d.push_back(worst);
    for (int s = 0; s < n; ++s) {
      std::vector<double> next(n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) next[j] += rows[s][i] * p(i, j);
      rows[s] = next;
    }
  }
  return d;
}

}  // namespace oracle
