#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nbl/metrics.hpp"
#include "nbl/oracle.hpp"
#include "nbl/strategy.hpp"
#include "specs.hpp"

namespace nbl {
namespace {

TEST(ClosedFormNe, CournotTwoPlayers) {
  const GameSpec spec = testing::cournot_spec(2, {1.0, 2.0}, 0, 1.0, 0.0, 1.0);
  const auto x = true_ne(spec);
  EXPECT_NEAR(x.agent(0)[0], 1.0 / 3, 1e-14);
  EXPECT_NEAR(x.agent(1)[0], 1.0 / 3, 1e-14);
}

TEST(ClosedFormNe, SymmetricCournot) {
  for (std::size_t n : {2, 3, 5, 8}) {
    const GameSpec spec = testing::cournot_spec(n, {0.9, 1.3}, 1, 1.0, 0.0, 1.0);
    const auto x = true_ne(spec);
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_NEAR(x.agent(i)[0], 1.3 / static_cast<double>(n + 1), 1e-14);
  }
}

TEST(ClosedFormNe, AsymmetricCournotSatisfiesFirstOrderConditions) {
  GameSpec spec = testing::cournot_spec(3, {1.0, 2.0}, 1, 1.0, 0.0, 1.0);
  spec.costs.marginal_cost = {0.1, 0.2, 0.3};
  const auto x = true_ne(spec);
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) total += x.agent(i)[0];
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_NEAR(x.agent(i)[0] + total, 2.0 - spec.costs.marginal_cost[i], 1e-14);
}

TEST(ClosedFormNe, BindingBoundFallsBackToIteration) {
  // Interior solution theta/(N+1) = 0.1667 is below the lower bound 0.2.
  const GameSpec spec = testing::cournot_spec(5, {0.8, 1.0}, 1, 1.0, 0.2, 1.0);
  const auto x = true_ne(spec);
  const BeliefVector b = point_mass_belief(2, 1);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(x.agent(i)[0], 0.2, 1e-9);
    EXPECT_NEAR(best_response(spec, i, x, b)[0], x.agent(i)[0], 1e-9);
  }
}

TEST(ClosedFormNe, QuadraticTargetIsClippedTarget) {
  const GameSpec spec = testing::quadratic_identity_spec(3, {0.3, 1.4}, 1, 1.0);
  const auto x = true_ne(spec);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(x.agent(i)[0], 1.0);
}

TEST(NeFixedPoint, MatchesClosedFormWhereJacobiContracts) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> theta(0.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const GameSpec spec = testing::cournot_spec(2, {theta(rng), theta(rng) + 1.0}, 0, 1.0, 0.0,
                                                1.0);
    const BeliefVector b = uniform_belief(2);
    const BeliefVector common[] = {b};
    const NeResult r = ne_fixed_point(spec, common);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(r.residual, 1e-9);
    EXPECT_LT(dist_to_ne(r.profile, closed_form_ne(spec, b)), 1e-9);
  }
}

TEST(NeFixedPoint, ReportsNonConvergence) {
  const GameSpec spec = testing::desk_cournot();
  const BeliefVector common[] = {point_mass_belief(3, 1)};
  NeOptions opts;
  opts.max_iter = 200;
  opts.x0 = testing::scalar_profile({0.1, 0.2, 0.3, 0.4, 0.5});
  const NeResult r = ne_fixed_point(spec, common, opts);
  EXPECT_FALSE(r.converged);
  opts.relaxation = 2.0 / 6.0;
  opts.max_iter = 100'000;
  EXPECT_TRUE(ne_fixed_point(spec, common, opts).converged);
}

TEST(NeFixedPoint, UniqueFromManyStarts) {
  const GameSpec spec = testing::desk_cournot();
  const BeliefVector common[] = {uniform_belief(3)};
  const auto reference = closed_form_ne(spec, common[0]);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  NeOptions opts;
  opts.relaxation = 1.0 / 3;
  for (int start = 0; start < 20; ++start) {
    opts.x0 = testing::scalar_profile({u(rng), u(rng), u(rng), u(rng), u(rng)});
    const NeResult r = ne_fixed_point(spec, common, opts);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(dist_to_ne(r.profile, reference), 1e-8);
  }
}

TEST(ClosedFormNe, VariationalInequalityHolds) {
  // <grad_i u_i(x*), y_i - x*_i> >= 0 for all feasible y_i.
  const GameSpec spec = testing::cournot_spec(4, {0.7, 1.9}, 1, 1.0, 0.3, 0.9);
  const BeliefVector b = point_mass_belief(2, 1);
  const auto x = true_ne(spec);
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.3, 0.9);
  for (std::size_t i = 0; i < 4; ++i) {
    const double g = expected_cost_gradient(spec, i, x, b)[0];
    for (int trial = 0; trial < 200; ++trial)
      EXPECT_GE(g * (u(rng) - x.agent(i)[0]), -1e-9);
  }
}

TEST(BrFlow, ConvergesToEquilibrium) {
  const GameSpec spec = testing::desk_cournot();
  const BeliefVector b = point_mass_belief(3, 1);
  const auto flow = br_flow(spec, b, spec.midpoint_profile(), 0.01, 40.0);
  EXPECT_EQ(flow.trajectory.size(), 4001u);
  EXPECT_LT(flow.terminal_distance, 1e-6);
}

TEST(BrFlow, ValidatesArguments) {
  const GameSpec spec = testing::desk_cournot();
  const BeliefVector b = point_mass_belief(3, 1);
  EXPECT_THROW(br_flow(spec, b, spec.midpoint_profile(), 0.0, 1.0), InvalidInput);
  EXPECT_THROW(br_flow(spec, b, testing::scalar_profile({0, 0, 0, 0, 0}), 0.1, 1.0),
               InvalidInput);
}

TEST(JacobianRadius, CournotAndQuadratic) {
  // Cournot BR Jacobian is -(11^T - I)/2, spectral radius (N - 1)/2.
  const GameSpec desk = testing::desk_cournot();
  const BeliefVector b = point_mass_belief(3, 1);
  EXPECT_NEAR(br_jacobian_spectral_radius(desk, b, true_ne(desk)), 2.0, 1e-6);
  const GameSpec quad = testing::quadratic_identity_spec(3, {0.3, 0.6}, 1, 1.0);
  EXPECT_NEAR(br_jacobian_spectral_radius(quad, point_mass_belief(2, 1), true_ne(quad)), 0.0,
              1e-9);
}

TEST(PointMassBelief, Shape) {
  const auto b = point_mass_belief(3, 2);
  EXPECT_EQ(b.probability(2), 1.0);
  EXPECT_GT(b.probability(0), 0.0);
  EXPECT_LT(b.probability(0), 1e-300);
  EXPECT_THROW(point_mass_belief(3, 3), InvalidInput);
}

}  // namespace
}  // namespace nbl
