#pragma once

#include "ilr/chain.hpp"
#include "ilr/imitation.hpp"
#include "ilr/mdp.hpp"
#include "ilr/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ilr {

// --- Random instances ---------------------------------------------------------

enum class RewardStyle { uniform, sparse };

std::string to_string(RewardStyle style);
RewardStyle reward_style_from_string(const std::string& name);

/// Garnet-style generator parameters.
struct RandomMdpSpec {
  int num_states = 5;
  int num_actions = 3;
  /// Number of distinct successors of each (s,a); 1 <= branching <= num_states.
  int branching = 2;
  RewardStyle reward_style = RewardStyle::uniform;
  bool ensure_communicating = true;
  std::uint64_t seed = 0;
  int max_rejections = 10000;
};

/// Each (s,a) gets `branching` distinct uniformly chosen successors with
/// Dirichlet(1,...,1) weights. Uniform rewards are U[0,1]; sparse rewards are
/// 1 with probability 0.2 and 0 otherwise. The initial state is 0.
/// Rejection-samples (derived seeds) until the action-union graph is strongly
/// connected when ensure_communicating is set.
FiniteMdp generate_random_mdp(const RandomMdpSpec& spec);

/// Random row-stochastic matrix with `branching` successors per row, resampled
/// until irreducible and aperiodic.
MarkovChain random_ergodic_chain(int num_states, int branching, std::uint64_t seed);

/// Random probability vector (Dirichlet(1)); with `sparsity` > 0 each entry is
/// zeroed with that probability (at least one entry is kept).
std::vector<double> random_distribution(int size, std::uint64_t seed, double sparsity = 0.0);

/// Random reward in [0,1]^{S x A}. Even indices are uniform, odd indices are
/// 0/1 indicator rewards, so suites exercise both smooth and extreme rewards.
RewardTable random_reward(int num_states, int num_actions, std::uint64_t seed, int index);

struct Instance {
  FiniteMdp mdp;
  ExpertSpec expert;
  std::uint64_t seed = 0;
};

/// Draws generated MDPs (seeds derived from base.seed) until one admits an
/// ergodic deterministic expert with tau_mix <= max_tau.
Instance generate_instance(RandomMdpSpec base, int max_tau, int max_tries = 1000);

/// Like generate_instance, but the expert is the extrinsic-optimal policy
/// (make_optimal_expert), so learners can at best tie it.
Instance generate_optimal_instance(RandomMdpSpec base, int max_tau, int max_tries = 1000);

// --- Plans and reports --------------------------------------------------------

struct VerificationPlan {
  double eta = 0.5;
  double delta = 0.1;
  /// eta / (2 + 8 tau_mix)
  double epsilon = 0.0;
  /// epsilon + sqrt(8 |S| tau_mix / N)
  double kappa_bound = 0.0;
  /// ceil(max{800|S|, 450 ln(2/delta)} tau_mix^3 / eta^2), or 1 when tau_mix = 0.
  long n_required = 1;
  int n_trials = 50;
  std::uint64_t master_seed = 0;
  int tau_mix = 0;
  int num_states = 1;
};

long proposition1_sample_size(int num_states, int tau_mix, double eta, double delta);

VerificationPlan plan_from_proposition1(int num_states, int tau_mix, double eta, double delta,
                                        int n_trials = 50, std::uint64_t master_seed = 0);
VerificationPlan plan_from_proposition1(const FiniteMdp& mdp, const ExpertSpec& expert,
                                        double eta, double delta, int n_trials = 50,
                                        std::uint64_t master_seed = 0);

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  double measured = 0.0;
  double bound = 0.0;
  bool satisfied = false;
  std::string note;
};

struct VerificationReport {
  std::string check_name;
  int trials = 0;
  int successes = 0;
  double empirical_rate = 0.0;
  double required_rate = 1.0;
  /// 3 sqrt(r (1 - r) / trials) for required rate r.
  double slack = 0.0;
  bool pass = false;
  std::vector<TrialRecord> records;
  /// Free-form scalar context (plan constants, tau_mix, ...), in insertion order.
  std::vector<std::pair<std::string, double>> details;
  std::string note;
};

double success_slack(double required_rate, int trials);

/// Fills trials, successes, empirical_rate, slack and pass from the records.
VerificationReport make_report(std::string check_name, double required_rate,
                               std::vector<TrialRecord> records);

// --- Checks -------------------------------------------------------------------

struct Proposition1Options {
  int n_random_rewards = 20;
  /// Run with this many samples instead of plan.n_required.
  std::optional<long> samples_override;
  /// Replace every dataset with an empty support (degenerate input).
  bool empty_support = false;
  double solver_tol = kDefaultSolverTol;
};

/// Per trial: sample plan.n_required expert steps, run the reduction and count a
/// success iff TV(rho^E, rho^I) <= eta, the imitation chain is ergodic, and
/// every random extrinsic reward has regret <= eta. Required rate is 1 - delta.
VerificationReport check_proposition1(const FiniteMdp& mdp, const ExpertSpec& expert,
                                      const VerificationPlan& plan,
                                      const Proposition1Options& options = {});

/// Per trial: success iff TV(rho^E, rho_hat) <= epsilon + sqrt(8|S|tau/N).
/// Required rate is 1 - 2 exp(-epsilon^2 N / (4.5 tau)).
VerificationReport check_lemma4(const FiniteMdp& mdp, const ExpertSpec& expert, long n_samples,
                                double epsilon, int n_trials, std::uint64_t seed);

struct Lemma5Outcome {
  double kappa_realized = 0.0;
  double intrinsic_gain = 0.0;
  bool satisfied = false;
  bool imitation_ergodic = false;
};

/// Rounding margin for exact inequality checks.
inline constexpr double kExactCheckTol = 1e-9;

Lemma5Outcome check_lemma5(const FiniteMdp& mdp, const ExpertSpec& expert,
                           const ExpertDataset& dataset, double solver_tol = kDefaultSolverTol);

/// kappa = 1 - E_{rho^pi}[R_int] for the indicator reward of `support`
/// (a subset of the expert's state-action support). For each random
/// extrinsic R: success iff E_pi[R] >= (1 - kappa) E_E[R] - 4 tau_mix kappa.
/// Throws std::invalid_argument if `policy` is not ergodic.
VerificationReport check_lemma7(const FiniteMdp& mdp, const ExpertSpec& expert,
                                const Policy& policy, std::span<const StateAction> support,
                                int n_random_rewards, std::uint64_t seed);

/// check_lemma7 against the full expert support {(s, pi_E(s))}.
VerificationReport check_lemma7(const FiniteMdp& mdp, const ExpertSpec& expert,
                                const Policy& policy, int n_random_rewards, std::uint64_t seed);

/// One-state, two-action MDP with a (possibly stochastic) expert. Passes when
/// TV(rho^E, rho^I) >= 0.1, i.e. when the deterministic imitation policy fails
/// to reproduce the expert.
VerificationReport stochastic_expert_demo(std::uint64_t seed,
                                          std::vector<double> expert_probs = {0.5, 0.5},
                                          long n_samples = 10000);

inline constexpr double kStochasticDemoFloor = 0.1;

// --- Suites over random instances -----------------------------------------------

/// TV identity, the indicator-maximizer property and |dE[v]| <= 2 TV on random
/// pairs with support <= max_support.
VerificationReport check_tv_duality(int n_pairs, int max_support, std::uint64_t seed);

/// tv_decay_sum <= 2 tau_mix from every indicator start and d(l tau) <= 2^-l on
/// random ergodic chains with 1..max_states states.
VerificationReport check_lemma3(int n_chains, int max_states, std::uint64_t seed);

/// check_lemma5 over random (MDP, expert, dataset) triples with dataset sizes
/// spread from a single step to full coverage.
VerificationReport check_lemma5_suite(int n_triples, std::uint64_t seed, int num_states = 5,
                                      int num_actions = 3);

/// check_lemma7 over random ergodic policies (reduction outputs on partial
/// datasets, random deterministic and random stochastic policies). One record
/// per policy; it is satisfied iff every reward satisfies the bound, and
/// `measured` is the smallest margin E_pi[R] - bound.
VerificationReport check_lemma7_suite(int n_policies, int n_random_rewards, std::uint64_t seed,
                                      int num_states = 5, int num_actions = 3);

}  // namespace ilr
