#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Dense>

#include "nbl/dynamics.hpp"
#include "nbl/strategy.hpp"
#include "specs.hpp"

namespace nbl {
namespace {

WeightMatrix ring_weights(std::size_t n) {
  return metropolis_weights(generate_graph(GraphKind::Ring, n, 1.0, 1));
}

TEST(StepSchedule, Values) {
  const StepSchedule s{0.5, 1.0};
  EXPECT_DOUBLE_EQ(s.value(0), 0.5);
  EXPECT_DOUBLE_EQ(s.value(1), 0.25);
  EXPECT_DOUBLE_EQ(s.value(3), 0.125);
  const StepSchedule d{0.5, 0.7};
  EXPECT_NEAR(d.value(9), 0.5 / std::pow(10.0, 0.7), 1e-16);
}

TEST(StepSchedule, Validation) {
  EXPECT_NO_THROW((StepSchedule{0.5, 0.7}).validate());
  EXPECT_NO_THROW((StepSchedule{0.5, 1.0}).validate());
  for (const StepSchedule bad :
       {StepSchedule{0.5, 0.4}, StepSchedule{0.5, 0.5}, StepSchedule{0.5, 1.2},
        StepSchedule{0.0, 0.7}, StepSchedule{1.0, 0.7}}) {
    try {
      bad.validate();
      ADD_FAILURE() << "accepted alpha0=" << bad.alpha0 << " gamma=" << bad.gamma;
    } catch (const InvalidInput& e) {
      EXPECT_NE(std::string(e.what()).find("Assumption 4"), std::string::npos);
    }
  }
}

TEST(SimStep, ZeroAlphaFreezesEverything) {
  const GameSpec spec = testing::desk_cournot();
  const WeightMatrix w = ring_weights(5);
  SimState s = initial_state(spec, 3);
  s.profile = testing::scalar_profile({0.1, 0.3, 0.5, 0.7, 0.9});
  const SimState next = sim_step_with_alpha(spec, w, 0.0, s);
  EXPECT_EQ(next.t, 1u);
  EXPECT_EQ(next.profile, s.profile);
  for (const auto& b : next.beliefs)
    for (double p : b.probabilities()) EXPECT_NEAR(p, 1.0 / 3, 1e-15);
}

TEST(SimStep, UsesCurrentProfileForCostsAndBestResponses) {
  const GameSpec spec = testing::desk_cournot();
  const WeightMatrix w = ring_weights(5);
  SimState s = initial_state(spec, 11);
  s.profile = testing::scalar_profile({0.1, 0.3, 0.5, 0.7, 0.9});
  s.t = 4;
  const double alpha = 0.3;
  const SimState next = sim_step_with_alpha(spec, w, alpha, s);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(next.last_costs[i], realized_cost_at(spec, i, s.profile, 11, 4));
    const double br = best_response(spec, i, s.profile, next.beliefs[i])[0];
    EXPECT_NEAR(next.profile.agent(i)[0], (1 - alpha) * s.profile.agent(i)[0] + alpha * br,
                1e-15);
  }
}

TEST(Run, DeterministicForSeed) {
  const GameSpec spec = testing::desk_cournot();
  const WeightMatrix w = ring_weights(5);
  const StepSchedule sched;
  const auto a = run(spec, w, sched, 200, 9);
  const auto b = run(spec, w, sched, 200, 9);
  const auto c = run(spec, w, sched, 200, 10);
  ASSERT_EQ(a.size(), 200u);
  EXPECT_EQ(a.back().profile, b.back().profile);
  for (std::size_t i = 0; i < 5; ++i)
    EXPECT_EQ(a.back().beliefs[i].log_weights(), b.back().beliefs[i].log_weights());
  EXPECT_NE(a.back().profile, c.back().profile);
}

TEST(Run, ThinningKeepsMultiplesAndLast) {
  const GameSpec spec = testing::desk_cournot();
  RunOptions opts;
  opts.thin = 30;
  const auto trace = run(spec, ring_weights(5), StepSchedule{}, 100, 1, opts);
  ASSERT_EQ(trace.size(), 4u);
  EXPECT_EQ(trace[0].t, 30u);
  EXPECT_EQ(trace[2].t, 90u);
  EXPECT_EQ(trace[3].t, 100u);
  EXPECT_TRUE(std::isnan(trace[0].dist_to_ne));
}

TEST(Run, RecordsStepSize) {
  const StepSchedule sched{0.5, 0.7};
  const auto trace = run(testing::desk_cournot(), ring_weights(5), sched, 5, 1);
  for (const auto& rec : trace) EXPECT_DOUBLE_EQ(rec.alpha, sched.value(rec.t - 1));
}

// Log-ratio state phi_i = log mu_i(k) / mu_i(0) obeys
// phi^(T) = sum_{s<T} W^(T-s) alpha(s) l^(s) from uniform priors.
TEST(Run, LogRatiosMatchUnrolledMixingSum) {
  const GameSpec spec = testing::desk_cournot();
  const std::size_t n = spec.n_agents, m = spec.n_params();
  const WeightMatrix w = ring_weights(n);
  const StepSchedule sched{0.5, 0.7};
  const std::uint64_t T = 60;

  std::vector<Eigen::MatrixXd> ll;  // per step, n x m
  std::vector<double> alphas;
  SimState state = initial_state(spec, 21);
  for (std::uint64_t t = 0; t < T; ++t) {
    const double alpha = sched.value(t);
    const SimState next = sim_step_with_alpha(spec, w, alpha, state);
    Eigen::MatrixXd l(n, m);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = clamped_log_likelihoods(spec, i, next.last_costs[i], state.profile);
      for (std::size_t k = 0; k < m; ++k)
        l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
    ll.push_back(l);
    alphas.push_back(alpha);
    state = next;
  }

  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(n, m);
  for (std::uint64_t s = 0; s < T; ++s) {
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (std::uint64_t e = 0; e < T - s; ++e) power = power * w.entries();
    expected += alphas[s] * power * ll[s];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k)
      EXPECT_NEAR(state.beliefs[i].log_ratio(k, 0),
                  expected(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)), 1e-10);
}

TEST(RealizedCost, IndependentAcrossAgentsAndSteps) {
  const GameSpec spec = testing::desk_cournot();
  const auto x = spec.midpoint_profile();
  EXPECT_NE(realized_cost_at(spec, 0, x, 1, 0), realized_cost_at(spec, 1, x, 1, 0));
  EXPECT_NE(realized_cost_at(spec, 0, x, 1, 0), realized_cost_at(spec, 0, x, 1, 1));
  EXPECT_EQ(realized_cost_at(spec, 2, x, 1, 7), realized_cost_at(spec, 2, x, 1, 7));
}

}  // namespace
}  // namespace nbl
