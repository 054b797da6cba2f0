#pragma once

#include "ilr/imitation.hpp"
#include "ilr/mdp.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ilr {

enum class Method { ilr, bc };

std::string to_string(Method method);
/// Accepts "ilr"/"ILR" and "bc"/"BC".
Method method_from_string(const std::string& name);

struct SweepRow {
  double dataset_fraction = 0.0;
  long n_samples = 0;
  Method method = Method::ilr;
  double extrinsic_gain = 0.0;
  double expert_gain = 0.0;
  double tv_to_expert = 0.0;
  /// Gain of the learned policy on the indicator reward of the dataset support.
  double intrinsic_gain = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kSweepSchemaVersion = 1;

struct SweepSpec {
  std::vector<double> fractions;
  std::vector<Method> methods{Method::ilr, Method::bc};
  int trials = 1;
  /// Length of the full trajectory; fraction f uses its first max(1, round(f * max_samples)) pairs.
  long max_samples = 1000;
  std::uint64_t seed = 0;
};

/// One row per (fraction, method, trial), ordered by trial, then fraction, then
/// method. Trial t draws one trajectory of max_samples pairs from
/// derive_seed(seed, t) and evaluates every prefix on it.
std::vector<SweepRow> run_sweep(const FiniteMdp& mdp, const ExpertSpec& expert,
                                const SweepSpec& spec);

/// "# schema-version: 1", the fixed header and one line per row.
std::string sweep_to_csv(std::span<const SweepRow> rows);

}  // namespace ilr
