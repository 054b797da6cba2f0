#include "ilr/mdp.hpp"

#include <doctest.h>

#include <algorithm>

using namespace ilr;

namespace {

FiniteMdp two_state() {
  return FiniteMdp::from_nested({{{0.3, 0.7}, {1.0, 0.0}}, {{0.5, 0.5}, {0.0, 1.0}}},
                                {{0.1, 0.2}, {0.3, 0.4}}, 0);
}

bool mentions(const ValidationOutcome& v, const std::string& text) {
  return std::any_of(v.violations.begin(), v.violations.end(),
                     [&](const std::string& m) { return m.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("valid MDP passes validation") {
  CHECK(validate_mdp(two_state()).ok());
  CHECK_NOTHROW(require_valid(two_state()));
}

TEST_CASE("row sums and reward bounds are reported") {
  auto bad_row = FiniteMdp::from_nested({{{0.5, 0.4}, {1.0, 0.0}}, {{0.5, 0.5}, {0.0, 1.0}}},
                                        {{0.1, 0.2}, {0.3, 0.4}}, 0);
  const auto v1 = validate_mdp(bad_row);
  CHECK_FALSE(v1.ok());
  CHECK(mentions(v1, "row sum 0.9 at (0,0)"));

  auto bad_reward = FiniteMdp::from_nested({{{0.3, 0.7}, {1.0, 0.0}}, {{0.5, 0.5}, {0.0, 1.0}}},
                                           {{0.1, 0.2}, {1.5, 0.4}}, 0);
  const auto v2 = validate_mdp(bad_reward);
  CHECK(mentions(v2, "reward out of [0,1] at (1,0)"));
  CHECK_THROWS_AS(require_valid(bad_reward), std::invalid_argument);

  auto negative = FiniteMdp::from_nested({{{1.2, -0.2}}, {{0.0, 1.0}}}, {{0.0}, {0.0}}, 0);
  CHECK_FALSE(validate_mdp(negative).ok());
}

TEST_CASE("shape mismatches are rejected at construction") {
  CHECK_THROWS_AS(FiniteMdp(2, 2, std::vector<double>(7, 0.0), std::vector<double>(4, 0.0), 0),
                  DimensionError);
  CHECK_THROWS(FiniteMdp::from_nested({{{1.0}}, {{1.0, 0.0}}}, {{0.0}, {0.0}}, 0));
}

TEST_CASE("initial state must be in range") {
  auto mdp = FiniteMdp(1, 1, {1.0}, {0.0}, 3);
  CHECK_FALSE(validate_mdp(mdp).ok());
}

TEST_CASE("policies validate their rows") {
  Eigen::MatrixXd bad(1, 2);
  bad << 0.6, 0.6;
  CHECK_THROWS(Policy(bad));
  Eigen::MatrixXd neg(1, 2);
  neg << 1.5, -0.5;
  CHECK_THROWS(Policy(neg));

  const std::vector<int> acts{1, 0};
  const auto det = Policy::deterministic(acts, 2);
  CHECK(det.is_deterministic());
  CHECK(det.action(0) == 1);
  CHECK(det.actions() == acts);
  const auto uni = Policy::uniform(2, 2);
  CHECK_FALSE(uni.is_deterministic());
  CHECK_THROWS_AS(uni.action(0), std::logic_error);
  CHECK_THROWS(Policy::deterministic(std::vector<int>{2}, 2));
}

TEST_CASE("induced chain") {
  const auto mdp = two_state();
  SUBCASE("action 0 everywhere copies T[.][0][.]") {
    const auto chain = induced_chain(mdp, Policy::deterministic(std::vector<int>{0, 0}, 2));
    CHECK(chain(0, 0) == 0.3);
    CHECK(chain(0, 1) == 0.7);
    CHECK(chain(1, 0) == 0.5);
    CHECK(chain(1, 1) == 0.5);
  }
  SUBCASE("uniform policy averages the actions") {
    const auto chain = induced_chain(mdp, Policy::uniform(2, 2));
    CHECK(chain(0, 0) == doctest::Approx(0.65).epsilon(1e-15));
    CHECK(chain(0, 1) == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(chain(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(chain(1, 1) == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("swap everywhere is a permutation") {
    const auto swap = FiniteMdp::from_nested({{{1, 0}, {0, 1}}, {{0, 1}, {1, 0}}},
                                             {{0, 0}, {0, 0}}, 0);
    const auto chain = induced_chain(swap, Policy::deterministic(std::vector<int>{1, 1}, 2));
    CHECK(chain.matrix() == (Eigen::MatrixXd(2, 2) << 0, 1, 1, 0).finished());
  }
  CHECK_THROWS_AS(induced_chain(mdp, Policy::uniform(3, 2)), DimensionError);
}

TEST_CASE("occupancy from a state distribution") {
  const auto det = Policy::deterministic(std::vector<int>{1, 0}, 2);
  const auto o1 = occupancy_from_state_dist(StateDistribution::point_mass(2, 0), det);
  CHECK(o1(0, 1) == 1.0);
  CHECK(o1.probs().sum() == 1.0);

  const auto o2 = occupancy_from_state_dist(StateDistribution::uniform(2), Policy::uniform(2, 2));
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a) CHECK(o2(s, a) == doctest::Approx(0.25));

  const auto o3 = occupancy_from_state_dist(
      StateDistribution((Eigen::VectorXd(2) << 2.0 / 3.0, 1.0 / 3.0).finished()), det);
  CHECK(o3(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(o3(1, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(o3.state_marginal()[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("expected reward") {
  Eigen::MatrixXd occ = Eigen::MatrixXd::Zero(2, 2);
  occ(0, 0) = 0.75;
  occ(1, 1) = 0.25;
  const OccupancyDistribution o(occ);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2, 2);
  r(0, 0) = 0.4;
  r(1, 1) = 0.8;
  CHECK(expected_reward(o, RewardTable(r, "test")) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(expected_reward(o, RewardTable(Eigen::MatrixXd::Ones(2, 2), "one")) == doctest::Approx(1.0));
  CHECK(expected_reward(o, RewardTable(Eigen::MatrixXd::Zero(2, 2), "zero")) == 0.0);
  CHECK_THROWS(RewardTable(Eigen::MatrixXd::Constant(1, 1, 1.5), "bad"));
}

TEST_CASE("distributions validate") {
  CHECK_THROWS(StateDistribution((Eigen::VectorXd(2) << 0.5, 0.6).finished()));
  CHECK_THROWS(OccupancyDistribution(Eigen::MatrixXd::Constant(2, 2, 0.3)));
  CHECK_THROWS(MarkovChain((Eigen::MatrixXd(1, 2) << 0.5, 0.5).finished()));
  CHECK(extrinsic_reward(two_state()).label() == "extrinsic");
  CHECK(extrinsic_reward(two_state())(1, 1) == 0.4);
}
