#include "ilr/verification.hpp"
#include "ilr/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <queue>

using namespace ilr;

namespace {

bool strongly_connected(const FiniteMdp& mdp) {
  const int n = mdp.num_states();
  auto reach = [&](bool reverse) {
    std::vector<bool> seen(n, false);
    std::queue<int> todo;
    todo.push(0);
    seen[0] = true;
    while (!todo.empty()) {
      const int u = todo.front();
      todo.pop();
      for (int v = 0; v < n; ++v) {
        bool edge = false;
        for (int a = 0; a < mdp.num_actions(); ++a)
          edge = edge || (reverse ? mdp.transition(v, a, u) : mdp.transition(u, a, v)) > 0.0;
        if (edge && !seen[v]) {
          seen[v] = true;
          todo.push(v);
        }
      }
    }
    return std::count(seen.begin(), seen.end(), true) == n;
  };
  return reach(false) && reach(true);
}

// Action 0 stays or moves forward along a cycle with probability 1/2 each;
// action 1 does the same backwards.
FiniteMdp lazy_cycle(int n) {
  std::vector<double> t(static_cast<std::size_t>(n) * 2 * n, 0.0);
  for (int s = 0; s < n; ++s) {
    t[(s * 2 + 0) * n + s] += 0.5;
    t[(s * 2 + 0) * n + (s + 1) % n] += 0.5;
    t[(s * 2 + 1) * n + s] += 0.5;
    t[(s * 2 + 1) * n + (s + n - 1) % n] += 0.5;
  }
  std::vector<double> r(static_cast<std::size_t>(n) * 2);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.1 * static_cast<double>(i % 7);
  return FiniteMdp(n, 2, t, r, 0);
}

}  // namespace

TEST_CASE("required sample size") {
  CHECK(proposition1_sample_size(5, 1, 0.5, 0.1) == 16000);
  CHECK(proposition1_sample_size(5, 2, 0.5, 0.1) == 128000);
  CHECK(proposition1_sample_size(1, 0, 0.5, 0.1) == 1);
  // The log term dominates for tiny delta on one state.
  CHECK(proposition1_sample_size(1, 1, 1.0, 1e-6) ==
        static_cast<long>(std::ceil(450.0 * std::log(2e6))));
  CHECK_THROWS(proposition1_sample_size(5, 1, 0.0, 0.1));
  CHECK_THROWS(proposition1_sample_size(5, 1, 0.5, 1.0));

  const auto plan = plan_from_proposition1(5, 1, 0.5, 0.1, 50, 7);
  CHECK(plan.n_required == 16000);
  CHECK(plan.epsilon == doctest::Approx(0.05));
  CHECK(plan.kappa_bound == doctest::Approx(0.05 + std::sqrt(40.0 / 16000.0)));
}

TEST_CASE("report arithmetic") {
  CHECK(success_slack(0.8, 50) == doctest::Approx(3.0 * std::sqrt(0.16 / 50.0)));
  CHECK(success_slack(1.0, 50) == 0.0);
  std::vector<TrialRecord> recs(10);
  for (int i = 0; i < 7; ++i) recs[i].satisfied = true;
  const auto rep = make_report("x", 0.8, recs);
  CHECK(rep.successes == 7);
  CHECK(rep.empirical_rate == doctest::Approx(0.7));
  CHECK(rep.pass == (0.7 >= 0.8 - success_slack(0.8, 10)));
}

TEST_CASE("random MDP generator") {
  RandomMdpSpec spec;
  spec.num_states = 6;
  spec.num_actions = 2;
  spec.branching = 6;
  spec.seed = 3;
  spec.max_rejections = 1;
  const auto full = generate_random_mdp(spec);
  CHECK(strongly_connected(full));
  CHECK(validate_mdp(full).ok());

  spec.num_states = 3;
  spec.branching = 1;
  spec.max_rejections = 10000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    spec.seed = seed;
    const auto mdp = generate_random_mdp(spec);
    CHECK(strongly_connected(mdp));
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < 2; ++a) {
        const auto row = mdp.transition_row(s, a);
        CHECK(std::count_if(row.begin(), row.end(), [](double p) { return p > 0.0; }) == 1);
      }
  }

  spec.branching = 2;
  spec.reward_style = RewardStyle::sparse;
  const auto a = generate_random_mdp(spec);
  const auto b = generate_random_mdp(spec);
  CHECK(a == b);
  for (double r : a.flat_rewards()) CHECK((r == 0.0 || r == 1.0));

  spec.branching = 4;
  CHECK_THROWS_WITH_AS(generate_random_mdp(spec), doctest::Contains("branching exceeds states"),
                       std::invalid_argument);
}

TEST_CASE("random chains and distributions") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(chain_structure(random_ergodic_chain(7, 1, seed)).ergodic());
    const auto p = random_distribution(9, seed, 0.5);
    double total = 0.0;
    for (double x : p) total += x;
    CHECK(total == doctest::Approx(1.0));
  }
  const auto r0 = random_reward(3, 2, 5, 0);
  const auto r1 = random_reward(3, 2, 5, 1);
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < 2; ++a) CHECK((r1(s, a) == 0.0 || r1(s, a) == 1.0));
  CHECK(r0.values() != random_reward(3, 2, 5, 2).values());
}

TEST_CASE("end-to-end check on a fast-mixing instance") {
  RandomMdpSpec spec;
  spec.branching = 5;
  spec.seed = 11;
  const auto inst = generate_instance(spec, 1);
  REQUIRE(inst.expert.tau_mix() == 1);
  const auto plan = plan_from_proposition1(inst.mdp, inst.expert, 0.5, 0.1, 50, 5);
  CHECK(plan.n_required == 16000);
  const auto rep = check_proposition1(inst.mdp, inst.expert, plan);
  CHECK(rep.trials == 50);
  CHECK(rep.empirical_rate >= 0.9 - rep.slack);
  CHECK(rep.pass);
  CHECK(check_proposition1(inst.mdp, inst.expert, plan).records.size() == 50);

  SUBCASE("eta = 1 satisfies the TV clause in every trial") {
    auto loose = plan_from_proposition1(inst.mdp, inst.expert, 1.0, 0.1, 10, 5);
    const auto r = check_proposition1(inst.mdp, inst.expert, loose);
    for (const auto& rec : r.records) CHECK(rec.measured <= 1.0);
  }
  SUBCASE("empty support is recorded as failure") {
    Proposition1Options opts;
    opts.empty_support = true;
    auto small = plan_from_proposition1(inst.mdp, inst.expert, 0.5, 0.1, 5, 5);
    const auto r = check_proposition1(inst.mdp, inst.expert, small, opts);
    CHECK(r.successes == 0);
    CHECK_FALSE(r.pass);
    CHECK(r.records[0].note.find("empty") != std::string::npos);
  }
}

TEST_CASE("concentration check") {
  const FiniteMdp two(2, 1, {0.9, 0.1, 0.2, 0.8}, {0, 0}, 0);
  const auto expert = make_expert(two, 0);
  const auto big = check_lemma4(two, expert, 1000000, 0.05, 8, 1);
  CHECK(big.required_rate > 0.999);
  CHECK(big.pass);
  for (const auto& r : big.records) CHECK(r.measured < 0.2 * r.bound);

  const auto loose = check_lemma4(two, expert, 10, 1.0, 50, 2);
  CHECK(loose.successes == 50);

  const FiniteMdp single(1, 1, {1.0}, {0.5}, 0);
  const auto trivial = check_lemma4(single, make_expert(single, 0), 5, 0.01, 10, 3);
  CHECK(trivial.pass);
  for (const auto& r : trivial.records) CHECK(r.measured == 0.0);
}

TEST_CASE("intrinsic gain lower bound") {
  const auto mdp = lazy_cycle(5);
  const auto expert = make_expert_from_policy(mdp, Policy::deterministic(std::vector<int>(5, 0), 2));
  const auto full = sample_trajectory(mdp, expert.policy, 5000, 1);
  const auto out = check_lemma5(mdp, expert, full);
  CHECK(out.intrinsic_gain == doctest::Approx(1.0));
  CHECK(out.satisfied);
  CHECK(out.kappa_realized < 0.05);

  const auto one = sample_trajectory(mdp, expert.policy, 1, 1);
  const auto single = check_lemma5(mdp, expert, one);
  CHECK(single.kappa_realized == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(single.satisfied);

  const auto suite = check_lemma5_suite(10, 4);
  CHECK(suite.successes == 10);
}

TEST_CASE("extrinsic performance bound") {
  const auto mdp = lazy_cycle(4);
  const auto expert = make_expert_from_policy(mdp, Policy::deterministic(std::vector<int>(4, 0), 2));

  const auto same = check_lemma7(mdp, expert, expert.policy, 50, 1);
  CHECK(same.details[0].second == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(same.successes == 50);

  // Walking backwards avoids every expert pair.
  const auto away = Policy::deterministic(std::vector<int>(4, 1), 2);
  REQUIRE(is_ergodic_policy(mdp, away));
  const auto avoid = check_lemma7(mdp, expert, away, 50, 2);
  CHECK(avoid.details[0].second == doctest::Approx(1.0));
  CHECK(avoid.successes == 50);

  // Reduction output on half of the expert support.
  const std::vector<StateAction> half{{0, 0}, {1, 0}};
  const auto res = ilr_from_support(mdp, half);
  REQUIRE(res.result.ergodic_under_policy);
  const auto rep = check_lemma7(mdp, expert, res.policy, half, 100, 3);
  CHECK(rep.successes == 100);

  CHECK_THROWS_AS(check_lemma7(mdp, expert, Policy::deterministic(std::vector<int>{1, 0, 0, 0}, 2), 5, 1),
                  std::invalid_argument);
  const auto suite = check_lemma7_suite(6, 20, 9);
  CHECK(suite.successes == 6);
}

TEST_CASE("stochastic expert demonstration") {
  const auto coin = stochastic_expert_demo(1);
  CHECK(coin.records[0].measured == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(coin.records[0].measured - 0.5) <= 1e-9);
  CHECK(coin.pass);

  const auto det = stochastic_expert_demo(1, {1.0, 0.0});
  CHECK(det.records[0].measured == doctest::Approx(0.0));
  CHECK_FALSE(det.pass);
  CHECK(det.note.find("not a counterexample") != std::string::npos);

  const auto skew = stochastic_expert_demo(2, {0.9, 0.1});
  CHECK(skew.records[0].measured == doctest::Approx(0.1));
}

TEST_CASE("small suites") {
  CHECK(check_tv_duality(100, 12, 1).pass);
  CHECK(check_lemma3(20, 8, 1).pass);
  CHECK_THROWS(check_tv_duality(1, 21, 1));
}
