#include "ilr/imitation.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace ilr;

namespace {

// Action 0 moves to the other state, action 1 stays.
FiniteMdp flip_stay() {
  return FiniteMdp::from_nested({{{0, 1}, {1, 0}}, {{1, 0}, {0, 1}}}, {{0.2, 0.6}, {0.9, 0.1}}, 0);
}

std::vector<StateAction> pairs(std::initializer_list<std::pair<int, int>> xs) {
  std::vector<StateAction> out;
  for (const auto& [s, a] : xs) out.push_back({s, a});
  return out;
}

}  // namespace

TEST_CASE("make_expert") {
  SUBCASE("every policy mixes in one step") {
    const auto mdp = FiniteMdp::from_nested({{{0.5, 0.5}, {0.5, 0.5}}, {{0.5, 0.5}, {0.5, 0.5}}},
                                            {{0, 0}, {0, 0}}, 0);
    const auto expert = make_expert(mdp, 1, 1);
    CHECK(expert.tau_mix() == 1);
    CHECK(expert.stationary[0] == doctest::Approx(0.5));
  }
  SUBCASE("only one ergodic policy") {
    const auto mdp = FiniteMdp::from_nested({{{1, 0}, {0.2, 0.8}}, {{0, 1}, {0.8, 0.2}}},
                                            {{0, 0}, {0, 0}}, 0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      CHECK(make_expert(mdp, seed).policy.actions() == std::vector<int>{1, 1});
    }
  }
  SUBCASE("no ergodic policy") {
    const auto mdp = FiniteMdp::from_nested({{{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}}, {{0, 0}, {0, 0}}, 0);
    try {
      make_expert(mdp, 0, 50);
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("no ergodic deterministic policy found") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(make_expert_from_policy(flip_stay(), Policy::uniform(2, 2)), std::invalid_argument);
  // Flip everywhere is periodic.
  CHECK_THROWS_AS(make_expert_from_policy(flip_stay(), Policy::deterministic(std::vector<int>{0, 0}, 2)),
                  std::invalid_argument);
}

TEST_CASE("trajectory sampling") {
  const auto mdp = flip_stay();
  const auto flip = Policy::deterministic(std::vector<int>{0, 0}, 2);
  const auto data = sample_trajectory(mdp, flip, 4, 11);
  CHECK(data.trajectory() == pairs({{0, 0}, {1, 0}, {0, 0}, {1, 0}}));
  CHECK(data.state_histogram()[0] == 0.5);
  CHECK(data.support() == pairs({{0, 0}, {1, 0}}));

  const auto one = sample_trajectory(mdp, flip, 1, 11);
  CHECK(one.histogram()(0, 0) == 1.0);
  CHECK(one.size() == 1);

  CHECK(sample_trajectory(mdp, Policy::uniform(2, 2), 500, 5).trajectory() ==
        sample_trajectory(mdp, Policy::uniform(2, 2), 500, 5).trajectory());
  CHECK(sample_trajectory(mdp, Policy::uniform(2, 2), 500, 5).trajectory() !=
        sample_trajectory(mdp, Policy::uniform(2, 2), 500, 6).trajectory());
  CHECK_THROWS(sample_trajectory(mdp, flip, 0, 1));
}

TEST_CASE("long run empirical state frequencies") {
  const FiniteMdp mdp(2, 1, {0.9, 0.1, 0.2, 0.8}, {0, 0}, 0);
  const auto data = sample_trajectory(mdp, Policy::deterministic(std::vector<int>{0, 0}, 1), 1000000, 2024);
  const double tv = total_variation(
      data.state_histogram(), StateDistribution((Eigen::VectorXd(2) << 2.0 / 3.0, 1.0 / 3.0).finished()));
  CHECK(tv <= 0.01);
  // Regression value for this seed.
  CHECK(tv == doctest::Approx(0.0022306666666666308).epsilon(1e-12));
}

TEST_CASE("dataset construction") {
  CHECK_THROWS_AS(ExpertDataset::from_trajectory({}, 2, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(ExpertDataset::from_trajectory(pairs({{2, 0}}), 2, 2, 0), std::out_of_range);
  const auto data = ExpertDataset::from_trajectory(pairs({{0, 1}, {1, 0}, {0, 1}}), 2, 2, 9);
  CHECK(data.histogram()(0, 1) == doctest::Approx(2.0 / 3.0));
  const auto pre = data.prefix(2);
  CHECK(pre.size() == 2);
  CHECK(pre.histogram()(0, 1) == 0.5);
  CHECK_THROWS_AS(data.prefix(4), std::out_of_range);
  const auto ret = trajectory_return(data.trajectory(), extrinsic_reward(flip_stay()));
  CHECK(ret.total == doctest::Approx(0.6 + 0.9 + 0.6));
  CHECK(ret.per_step == doctest::Approx(0.7));
}

TEST_CASE("intrinsic reward") {
  const auto mdp = FiniteMdp(3, 2, std::vector<double>(18, 1.0 / 3.0), std::vector<double>(6, 0.0), 0);
  const auto r = intrinsic_reward(mdp, pairs({{0, 1}, {2, 0}}));
  CHECK(r.label() == "intrinsic");
  CHECK(r(0, 1) == 1.0);
  CHECK(r(0, 0) == 0.0);
  CHECK(r(2, 0) == 1.0);
  CHECK(r.values().sum() == 2.0);
  CHECK(intrinsic_reward(mdp, {}).values().sum() == 0.0);
  CHECK(intrinsic_reward(mdp, pairs({{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}})).values().minCoeff() == 1.0);
  CHECK_THROWS_AS(intrinsic_reward(mdp, pairs({{0, 2}})), std::out_of_range);
}

TEST_CASE("reduction") {
  SUBCASE("full expert cycle is recovered") {
    // Deterministic dynamics on 3 states: action 0 advances the cycle, action 1 stays.
    std::vector<double> t(3 * 2 * 3, 0.0);
    for (int s = 0; s < 3; ++s) {
      t[(s * 2 + 0) * 3 + (s + 1) % 3] = 1.0;
      t[(s * 2 + 1) * 3 + s] = 1.0;
    }
    const FiniteMdp mdp(3, 2, t, std::vector<double>(6, 0.5), 0);
    const auto expert = Policy::deterministic(std::vector<int>{0, 0, 0}, 2);
    const auto data = sample_trajectory(mdp, expert, 6, 0);
    const auto res = ilr::ilr(mdp, data);
    CHECK(res.intrinsic_gain == doctest::Approx(1.0));
    CHECK(res.policy.actions() == expert.actions());
  }
  SUBCASE("single self-loop pair") {
    const auto mdp = flip_stay();
    const auto res = ilr::ilr(mdp, ExpertDataset::from_trajectory(pairs({{0, 1}}), 2, 2, 0));
    CHECK(res.policy.action(0) == 1);
    CHECK(res.intrinsic_gain == doctest::Approx(1.0));
  }
  SUBCASE("pair that leaves its state forever") {
    // 0 -> 1 -> 2 with 2 absorbing; action 1 at 0 stays.
    const auto mdp = FiniteMdp::from_nested({{{0, 1, 0}, {1, 0, 0}}, {{0, 0, 1}, {0, 0, 1}}, {{0, 0, 1}, {0, 0, 1}}},
                                            {{0, 0}, {0, 0}, {0, 0}}, 0);
    const auto res = ilr::ilr(mdp, ExpertDataset::from_trajectory(pairs({{0, 0}}), 3, 2, 0));
    CHECK(res.intrinsic_gain == 0.0);
    CHECK_FALSE(res.result.ergodic_under_policy);
  }
  SUBCASE("extrinsic reward is ignored") {
    auto mdp = flip_stay();
    const auto data = ExpertDataset::from_trajectory(pairs({{0, 0}, {1, 1}}), 2, 2, 0);
    const auto other = FiniteMdp(2, 2, mdp.flat_transitions(), {1, 1, 1, 1}, 0);
    CHECK(ilr::ilr(mdp, data).policy == ilr::ilr(other, data).policy);
  }
}

TEST_CASE("behavioral cloning") {
  const auto mdp = FiniteMdp(4, 4, std::vector<double>(64, 0.25), std::vector<double>(16, 0.0), 0);
  const auto data = ExpertDataset::from_trajectory(pairs({{0, 2}, {1, 1}, {0, 2}, {2, 3}, {1, 0}}), 4, 4, 0);
  const auto bc = behavioral_cloning(mdp, data);
  CHECK(bc.prob(0, 2) == 1.0);
  CHECK(bc.prob(1, 0) == 1.0);  // tie between 0 and 1
  CHECK(bc.prob(2, 3) == 1.0);
  for (int a = 0; a < 4; ++a) CHECK(bc.prob(3, a) == 0.25);

  const auto expert = Policy::deterministic(std::vector<int>{3, 1, 2, 0}, 4);
  const auto full = sample_trajectory(mdp, expert, 200, 3);
  CHECK(behavioral_cloning(mdp, full) == expert);
}

TEST_CASE("streak decomposition") {
  const auto ref = Policy::deterministic(std::vector<int>{0, 1}, 2);
  const auto agree = streak_decompose(pairs({{0, 0}, {1, 1}, {0, 0}}), ref);
  CHECK(agree.disagreement_count == 0);
  CHECK(agree.streak_counts == std::map<long, long>{{3, 1}});
  CHECK(agree.agreement_fraction == 1.0);

  const auto mixed = streak_decompose(pairs({{0, 0}, {1, 1}, {0, 1}, {1, 1}}), ref);
  CHECK(mixed.disagreement_count == 1);
  CHECK(mixed.streak_counts == std::map<long, long>{{1, 1}, {2, 1}});
  CHECK(mixed.streak_total() <= mixed.disagreement_count + 1);
  CHECK(mixed.agreeing_steps() + mixed.disagreement_count == 4);

  const auto none = streak_decompose(pairs({{0, 1}, {1, 0}}), ref);
  CHECK(none.streak_counts.empty());
  CHECK(none.disagreement_count == 2);
  CHECK_THROWS_AS(streak_decompose(pairs({{0, 0}}), Policy::uniform(2, 2)), std::invalid_argument);
}

TEST_CASE("state and state-action histograms are equally far from a deterministic expert") {
  const auto mdp = FiniteMdp::from_nested({{{0.5, 0.5}, {0.1, 0.9}}, {{0.7, 0.3}, {0.4, 0.6}}},
                                          {{0, 0}, {0, 0}}, 0);
  const auto expert = make_expert_from_policy(mdp, Policy::deterministic(std::vector<int>{1, 0}, 2));
  for (long n : {1L, 7L, 100L, 5000L}) {
    const auto data = sample_trajectory(mdp, expert.policy, n, static_cast<std::uint64_t>(n));
    CHECK(total_variation(data.state_histogram(), expert.stationary) ==
          doctest::Approx(total_variation(data.histogram(), expert.occupancy)).epsilon(1e-15));
    CHECK(total_variation(data.histogram().state_marginal(), data.state_histogram()) <= 1e-12);
  }
}

TEST_CASE("streak accounting on random trajectories") {
  const auto mdp = FiniteMdp(3, 3, std::vector<double>(27, 1.0 / 3.0), std::vector<double>(9, 0.0), 0);
  const auto ref = Policy::deterministic(std::vector<int>{0, 1, 2}, 3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const long n = 1 + static_cast<long>(seed * 7);
    const auto data = sample_trajectory(mdp, Policy::uniform(3, 3), n, seed);
    const auto d = streak_decompose(data.trajectory(), ref);
    CHECK(d.agreeing_steps() + d.disagreement_count == n);
    CHECK(d.streak_total() <= d.disagreement_count + 1);
  }
}
