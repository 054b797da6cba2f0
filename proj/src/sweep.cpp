#include "ilr/sweep.hpp"

#include "ilr/io.hpp"
#include "ilr/parallel.hpp"
#include "ilr/rng.hpp"

#include <cmath>

namespace ilr {

std::string to_string(Method method) { return method == Method::ilr ? "ILR" : "BC"; }

Method method_from_string(const std::string& name) {
  if (name == "ilr" || name == "ILR") return Method::ilr;
  if (name == "bc" || name == "BC") return Method::bc;
  throw std::invalid_argument("unknown method '" + name + "' (expected ilr|bc)");
}

std::vector<SweepRow> run_sweep(const FiniteMdp& mdp, const ExpertSpec& expert,
                                const SweepSpec& spec) {
  if (spec.fractions.empty()) throw std::invalid_argument("run_sweep: no fractions given");
  for (double f : spec.fractions)
    if (!(f > 0.0 && f <= 1.0))
      throw std::invalid_argument("run_sweep: fraction " + format_double(f) + " outside (0, 1]");
  if (spec.methods.empty()) throw std::invalid_argument("run_sweep: no methods given");
  if (spec.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
  if (spec.max_samples < 1) throw std::invalid_argument("run_sweep: max_samples must be >= 1");

  const RewardTable extrinsic = extrinsic_reward(mdp);
  const double expert_gain = expected_reward(expert.occupancy, extrinsic);

  auto per_trial = parallel_map(static_cast<std::size_t>(spec.trials), [&](std::size_t t) {
    const std::uint64_t seed = derive_seed(spec.seed, t);
    const ExpertDataset full = sample_trajectory(mdp, expert.policy, spec.max_samples, seed);
    std::vector<SweepRow> rows;
    for (double f : spec.fractions) {
      const long n = std::max(1L, std::lround(f * static_cast<double>(spec.max_samples)));
      const ExpertDataset data = full.prefix(n);
      const RewardTable r_int = intrinsic_reward(mdp, data.support());
      for (Method method : spec.methods) {
        const Policy policy =
            method == Method::ilr ? ilr(mdp, data).policy : behavioral_cloning(mdp, data);
        const OccupancyDistribution occ = policy_occupancy(mdp, policy);
        SweepRow row;
        row.dataset_fraction = f;
        row.n_samples = n;
        row.method = method;
        row.extrinsic_gain = expected_reward(occ, extrinsic);
        row.expert_gain = expert_gain;
        row.tv_to_expert = total_variation(expert.occupancy, occ);
        row.intrinsic_gain = expected_reward(occ, r_int);
        row.trial = static_cast<int>(t);
        row.seed = seed;
        rows.push_back(row);
      }
    }
    return rows;
  });

  std::vector<SweepRow> rows;
  for (auto& batch : per_trial) rows.insert(rows.end(), batch.begin(), batch.end());
  return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::string out = "# schema-version: " + std::to_string(kSweepSchemaVersion) + "\n";
  out += "dataset_fraction,n_samples,method,extrinsic_gain,expert_gain,tv_to_expert,"
         "intrinsic_gain,trial,seed\n";
  for (const auto& r : rows) {
    out += format_double(r.dataset_fraction) + "," + std::to_string(r.n_samples) + "," +
           to_string(r.method) + "," + format_double(r.extrinsic_gain) + "," +
           format_double(r.expert_gain) + "," + format_double(r.tv_to_expert) + "," +
           format_double(r.intrinsic_gain) + "," + std::to_string(r.trial) + "," +
           std::to_string(r.seed) + "\n";
  }
  return out;
}

}  // namespace ilr
