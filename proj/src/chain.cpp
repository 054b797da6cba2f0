#include "ilr/chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace ilr {

namespace {

// Iterative Tarjan over the positive-probability edges of P.
std::vector<std::vector<int>> strongly_connected_components(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  std::vector<std::vector<int>> components;
  int counter = 0;

  struct Frame {
    int v;
    int next;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < n) {
        const int w = f.next++;
        if (p(f.v, w) <= 0.0) continue;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const int v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w = -1;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
    }
  }
  return components;
}

int class_period(const Eigen::MatrixXd& p, const std::vector<int>& members) {
  const int n = static_cast<int>(p.rows());
  std::vector<int> level(n, -1);
  std::vector<bool> in_class(n, false);
  for (int s : members) in_class[s] = true;
  std::queue<int> frontier;
  level[members.front()] = 0;
  frontier.push(members.front());
  int g = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < n; ++v) {
      if (p(u, v) <= 0.0 || !in_class[v]) continue;
      if (level[v] == -1) {
        level[v] = level[u] + 1;
        frontier.push(v);
      } else {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return g == 0 ? 1 : g;
}

// Stationary law of the closed sub-chain on `members`.
Eigen::VectorXd restricted_stationary(const Eigen::MatrixXd& p, const std::vector<int>& members) {
  const auto k = static_cast<Eigen::Index>(members.size());
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) a(j, i) = p(members[i], members[j]);
  a -= Eigen::MatrixXd::Identity(k, k);
  a.row(k - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  b[k - 1] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw ChainError("stationary_distribution: singular balance system");
  Eigen::VectorXd rho = lu.solve(b);
  for (Eigen::Index i = 0; i < k; ++i) rho[i] = std::max(rho[i], 0.0);
  rho /= rho.sum();
  return rho;
}

double tv_dense(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  return std::min(1.0, 0.5 * (p - q).cwiseAbs().sum());
}

MixingProfile run_mixing(const MarkovChain& chain, int t_cap, bool stop_when_certified) {
  const auto structure = chain_structure(chain);
  if (!structure.irreducible) {
    throw ChainError("mixing_profile: chain is reducible, recurrent classes " +
                     describe_classes(structure.recurrent_classes));
  }
  if (!structure.aperiodic()) {
    throw ChainError("mixing_profile: chain is periodic with period " +
                     std::to_string(structure.period));
  }
  if (t_cap < 0) throw std::invalid_argument("mixing_profile: t_cap must be non-negative");

  MixingProfile prof;
  prof.stationary = stationary_distribution(chain);
  const Eigen::MatrixXd& p = chain.matrix();
  const Eigen::VectorXd& rho = prof.stationary.probs();
  const Eigen::Index n = p.rows();

  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  auto worst = [&]() {
    double d = 0.0;
    for (Eigen::Index s = 0; s < n; ++s)
      d = std::max(d, tv_dense(power.row(s).transpose(), rho));
    return d;
  };

  int tau = -1;
  prof.d_curve.push_back(worst());
  if (prof.d_curve.back() <= kMixingThreshold) tau = 0;
  int t = 0;
  while (t < t_cap) {
    if (stop_when_certified && tau >= 0 && prof.d_curve.back() < kTailCertifyLevel) break;
    power = (power * p).eval();
    ++t;
    prof.d_curve.push_back(worst());
    if (tau < 0 && prof.d_curve.back() <= kMixingThreshold) tau = t;
  }
  if (tau < 0) {
    throw ChainError("mixing_profile: d(t) stays above 1/4 up to t_cap = " +
                     std::to_string(t_cap) + "; increase t_cap");
  }
  prof.tau_mix = tau;
  prof.t_cap = t;
  prof.tail_certified = prof.d_curve.back() < kTailCertifyLevel;
  return prof;
}

}  // namespace

ChainStructure chain_structure(const MarkovChain& chain) {
  const Eigen::MatrixXd& p = chain.matrix();
  const int n = chain.num_states();
  const auto components = strongly_connected_components(p);

  std::vector<int> comp_of(n, -1);
  for (std::size_t c = 0; c < components.size(); ++c)
    for (int s : components[c]) comp_of[s] = static_cast<int>(c);

  ChainStructure out;
  std::vector<bool> recurrent(n, false);
  for (std::size_t c = 0; c < components.size(); ++c) {
    bool closed = true;
    for (int s : components[c]) {
      for (int v = 0; v < n && closed; ++v)
        if (p(s, v) > 0.0 && comp_of[v] != static_cast<int>(c)) closed = false;
    }
    if (!closed) continue;
    out.recurrent_classes.push_back(components[c]);
    for (int s : components[c]) recurrent[s] = true;
  }
  std::sort(out.recurrent_classes.begin(), out.recurrent_classes.end());
  for (const auto& cls : out.recurrent_classes) out.class_periods.push_back(class_period(p, cls));
  for (int s = 0; s < n; ++s)
    if (!recurrent[s]) out.transient_states.push_back(s);

  out.irreducible = out.recurrent_classes.size() == 1 &&
                    static_cast<int>(out.recurrent_classes.front().size()) == n;
  out.period = out.class_periods.front();
  return out;
}

std::string describe_classes(const std::vector<std::vector<int>>& classes) {
  std::ostringstream os;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (c) os << ' ';
    os << '{';
    for (std::size_t i = 0; i < classes[c].size(); ++i) os << (i ? "," : "") << classes[c][i];
    os << '}';
  }
  return os.str();
}

StateDistribution stationary_distribution(const MarkovChain& chain) {
  const auto structure = chain_structure(chain);
  if (!structure.irreducible) {
    throw ChainError("stationary_distribution: chain is reducible, recurrent classes " +
                     describe_classes(structure.recurrent_classes));
  }
  const int n = chain.num_states();
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  Eigen::VectorXd rho = restricted_stationary(chain.matrix(), all);
  const double residual = (chain.matrix().transpose() * rho - rho).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    throw ChainError("stationary_distribution: residual " + std::to_string(residual) +
                     " exceeds 1e-10");
  }
  return StateDistribution(std::move(rho));
}

StateDistribution cesaro_average(const MarkovChain& chain, const StateDistribution& start,
                                 long n_terms) {
  if (n_terms < 1) throw std::invalid_argument("cesaro_average: n_terms must be >= 1");
  if (start.size() != chain.num_states()) throw DimensionError("cesaro_average: size mismatch");
  const Eigen::MatrixXd pt = chain.matrix().transpose();
  Eigen::VectorXd current = start.probs();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(current.size());
  for (long i = 0; i < n_terms; ++i) {
    acc += current;
    if (i + 1 < n_terms) current = (pt * current).eval();
  }
  acc /= static_cast<double>(n_terms);
  acc /= acc.sum();
  return StateDistribution(std::move(acc));
}

StateDistribution limiting_distribution(const MarkovChain& chain, const StateDistribution& start) {
  if (start.size() != chain.num_states()) {
    throw DimensionError("limiting_distribution: size mismatch");
  }
  const auto structure = chain_structure(chain);
  const Eigen::MatrixXd& p = chain.matrix();
  const int n = chain.num_states();
  const auto& classes = structure.recurrent_classes;
  const auto n_classes = static_cast<Eigen::Index>(classes.size());

  std::vector<int> class_of(n, -1);
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (int s : classes[c]) class_of[s] = static_cast<int>(c);

  Eigen::VectorXd class_mass = Eigen::VectorXd::Zero(n_classes);
  for (int s = 0; s < n; ++s)
    if (class_of[s] >= 0) class_mass[class_of[s]] += start[s];

  const auto& transient = structure.transient_states;
  if (!transient.empty()) {
    const auto k = static_cast<Eigen::Index>(transient.size());
    Eigen::MatrixXd q(k, k);
    Eigen::MatrixXd to_class = Eigen::MatrixXd::Zero(k, n_classes);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) q(i, j) = p(transient[i], transient[j]);
      for (int v = 0; v < n; ++v)
        if (class_of[v] >= 0) to_class(i, class_of[v]) += p(transient[i], v);
    }
    const Eigen::MatrixXd absorb =
        (Eigen::MatrixXd::Identity(k, k) - q).fullPivLu().solve(to_class);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double w = start[transient[i]];
      if (w != 0.0) class_mass += w * absorb.row(i).transpose();
    }
  }

  Eigen::VectorXd rho = Eigen::VectorXd::Zero(n);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const double mass = class_mass[static_cast<Eigen::Index>(c)];
    if (mass <= 0.0) continue;
    const Eigen::VectorXd local = restricted_stationary(p, classes[c]);
    for (std::size_t i = 0; i < classes[c].size(); ++i)
      rho[classes[c][i]] += mass * local[static_cast<Eigen::Index>(i)];
  }
  for (int s = 0; s < n; ++s) rho[s] = std::max(rho[s], 0.0);
  rho /= rho.sum();
  return StateDistribution(std::move(rho));
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DimensionError("total_variation: sizes " + std::to_string(p.size()) + " and " +
                         std::to_string(q.size()));
  }
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * l1);
}

double total_variation(const StateDistribution& p, const StateDistribution& q) {
  return total_variation(p.values(), q.values());
}

double total_variation(const OccupancyDistribution& p, const OccupancyDistribution& q) {
  if (p.num_states() != q.num_states() || p.num_actions() != q.num_actions()) {
    throw DimensionError("total_variation: occupancy shapes differ");
  }
  return total_variation(p.values(), q.values());
}

TvSupResult tv_sup_oracle(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("tv_sup_oracle: size mismatch");
  if (p.size() > static_cast<std::size_t>(kTvOracleMaxSupport)) {
    throw std::invalid_argument("tv_sup_oracle: support of " + std::to_string(p.size()) +
                                " exceeds " + std::to_string(kTvOracleMaxSupport));
  }
  // The complement of M flips the sign of p(M) - q(M), so the signed maximum
  // equals the supremum of the absolute gap.
  TvSupResult best;
  const std::uint32_t n_subsets = 1u << p.size();
  for (std::uint32_t mask = 1; mask < n_subsets; ++mask) {
    double gap = 0.0;
    for (std::uint32_t bits = mask; bits; bits &= bits - 1) {
      const int x = std::countr_zero(bits);
      gap += p[x] - q[x];
    }
    if (gap > best.value) {
      best.value = gap;
      best.subset = mask;
    }
  }
  return best;
}

MixingProfile mixing_profile(const MarkovChain& chain, int t_cap) {
  return run_mixing(chain, t_cap, false);
}

MixingProfile certified_mixing_profile(const MarkovChain& chain, int max_cap) {
  return run_mixing(chain, max_cap, true);
}

double tv_decay_sum(const MarkovChain& chain, const StateDistribution& start,
                    const MixingProfile& profile) {
  if (!profile.tail_certified) {
    throw ChainError("tv_decay_sum: mixing profile tail is not certified (d(t_cap) = " +
                     std::to_string(profile.d_curve.back()) + ")");
  }
  if (start.size() != chain.num_states() || profile.stationary.size() != chain.num_states()) {
    throw DimensionError("tv_decay_sum: size mismatch");
  }
  const Eigen::MatrixXd pt = chain.matrix().transpose();
  const Eigen::VectorXd& rho = profile.stationary.probs();
  Eigen::VectorXd current = start.probs();
  double sum = 0.0;
  double last = 0.0;
  for (int t = 0; t <= profile.t_cap; ++t) {
    last = tv_dense(current, rho);
    sum += last;
    if (t < profile.t_cap) current = (pt * current).eval();
  }
  // TV(mu P^{T+k}, rho) <= TV(mu P^T, rho) * max_{x,y} TV(P^k(x,.), P^k(y,.)),
  // and the latter sums to at most 2 tau_mix over k.
  return sum + last * 2.0 * profile.tau_mix;
}

}  // namespace ilr
