#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nbl/oracle.hpp"
#include "nbl/strategy.hpp"
#include "specs.hpp"

namespace nbl {
namespace {

using testing::scalar_profile;

// Custom-family copy of a built-in spec, so the generic solver sees the same costs.
GameSpec as_custom(const GameSpec& spec) {
  GameSpec copy = spec;
  copy.costs = CostFamily::make_custom(
      {[spec](std::size_t i, const StrategyProfile& x, double theta) {
         return cost_at(spec, i, x, theta);
       },
       [spec](std::size_t i, const StrategyProfile& x, double theta, std::span<double> g) {
         cost_gradient_at(spec, i, x, theta, g);
       }});
  return copy;
}

GameSpec quadratic_2d(std::size_t n) {
  GameSpec spec;
  spec.n_agents = n;
  spec.dim = 2;
  spec.boxes = testing::uniform_boxes(n, -0.5, 0.8, 2);
  std::vector<std::vector<double>> offset, slope;
  for (std::size_t i = 0; i < n; ++i) {
    offset.push_back({0.1 * static_cast<double>(i), -0.2});
    slope.push_back({1.0, 0.5 + 0.1 * static_cast<double>(i)});
  }
  spec.costs = CostFamily::quadratic_target(offset, slope);
  spec.params = ParameterSet{{-0.4, 0.3, 1.1}, 1};
  spec.noise = NoiseModel{0.5, 10.0};
  spec.validate();
  return spec;
}

std::vector<BeliefVector> random_beliefs(std::mt19937_64& rng, std::size_t m, int count) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<BeliefVector> out;
  for (int c = 0; c < count; ++c) {
    std::vector<double> p(m);
    for (auto& v : p) v = u(rng);
    out.push_back(BeliefVector::from_probabilities(p));
  }
  return out;
}

StrategyProfile random_profile(const GameSpec& spec, std::mt19937_64& rng) {
  StrategyProfile x(spec.n_agents, spec.dim);
  for (std::size_t i = 0; i < spec.n_agents; ++i)
    for (std::size_t c = 0; c < spec.dim; ++c) {
      std::uniform_real_distribution<double> u(spec.boxes[i].lower[c], spec.boxes[i].upper[c]);
      x.agent(i)[c] = u(rng);
    }
  return x;
}

TEST(BestResponse, CournotInterior) {
  const GameSpec spec = testing::cournot_spec(2, {1.0, 2.0}, 0, 1.0, 0.0, 1.0);
  const auto br = best_response(spec, 0, scalar_profile({0.9, 1.0 / 3}), point_mass_belief(2, 0));
  EXPECT_NEAR(br[0], 1.0 / 3, 1e-12);
}

TEST(BestResponse, CournotUsesExpectedTheta) {
  const GameSpec spec = testing::cournot_spec(2, {1.0, 2.0}, 0, 1.0, 0.0, 1.0);
  // E[theta] = 1.5, others produce 0.5: (1.5 - 0.5) / 2.
  const auto br = best_response(spec, 1, scalar_profile({0.5, 0.0}), uniform_belief(2));
  EXPECT_NEAR(br[0], 0.5, 1e-15);
}

TEST(BestResponse, CournotClipsToBox) {
  const GameSpec spec = testing::cournot_spec(3, {0.8, 1.0}, 0, 1.0);
  const auto br = best_response(spec, 0, scalar_profile({0.5, 1.0, 1.0}), uniform_belief(2));
  EXPECT_DOUBLE_EQ(br[0], 0.1);
}

TEST(BestResponse, QuadraticIsClippedExpectedTarget) {
  const GameSpec spec = testing::quadratic_identity_spec(2, {0.2, 1.6}, 0, 1.0);
  const double p[] = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(
      best_response(spec, 0, scalar_profile({0, 0}), BeliefVector::from_probabilities(p))[0], 0.9);
  const double q[] = {0.1, 0.9};
  EXPECT_DOUBLE_EQ(
      best_response(spec, 0, scalar_profile({0, 0}), BeliefVector::from_probabilities(q))[0], 1.0);
}

TEST(BestResponse, BeatsRandomFeasiblePoints) {
  std::mt19937_64 rng(23);
  for (const GameSpec& spec : {testing::desk_cournot(), quadratic_2d(3)}) {
    for (const auto& belief : random_beliefs(rng, spec.n_params(), 10)) {
      const StrategyProfile x = random_profile(spec, rng);
      for (std::size_t i = 0; i < spec.n_agents; ++i) {
        StrategyProfile at_br = x;
        const auto br = best_response(spec, i, x, belief);
        std::copy(br.begin(), br.end(), at_br.agent(i).begin());
        const double best = expected_cost(spec, i, at_br, belief);
        for (int trial = 0; trial < 100; ++trial) {
          StrategyProfile other = x;
          const StrategyProfile r = random_profile(spec, rng);
          std::copy(r.agent(i).begin(), r.agent(i).end(), other.agent(i).begin());
          EXPECT_LE(best, expected_cost(spec, i, other, belief) + 1e-12);
        }
      }
    }
  }
}

TEST(ExpectedCostGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(29);
  for (const GameSpec& spec : {testing::desk_cournot(), quadratic_2d(3)}) {
    for (const auto& belief : random_beliefs(rng, spec.n_params(), 10)) {
      const StrategyProfile x = random_profile(spec, rng);
      for (std::size_t i = 0; i < spec.n_agents; ++i) {
        const auto grad = expected_cost_gradient(spec, i, x, belief);
        for (std::size_t c = 0; c < spec.dim; ++c) {
          const double h = 1e-6;
          StrategyProfile up = x, down = x;
          up.agent(i)[c] += h;
          down.agent(i)[c] -= h;
          double fu = 0.0, fd = 0.0;
          const auto p = belief.probabilities();
          for (std::size_t k = 0; k < spec.n_params(); ++k) {
            fu += p[k] * cost_at(spec, i, up, spec.params.values[k]);
            fd += p[k] * cost_at(spec, i, down, spec.params.values[k]);
          }
          EXPECT_NEAR(grad[c], (fu - fd) / (2 * h), 1e-6);
        }
      }
    }
  }
}

TEST(BestResponse, ClosedFormMatchesProjectedGradient) {
  std::mt19937_64 rng(31);
  for (const GameSpec& spec : {testing::desk_cournot(), quadratic_2d(3)}) {
    const GameSpec generic = as_custom(spec);
    for (const auto& belief : random_beliefs(rng, spec.n_params(), 20)) {
      const StrategyProfile x = random_profile(spec, rng);
      for (std::size_t i = 0; i < spec.n_agents; ++i) {
        const auto closed = best_response(spec, i, x, belief);
        const auto numeric = best_response(generic, i, x, belief);
        for (std::size_t c = 0; c < spec.dim; ++c) EXPECT_NEAR(closed[c], numeric[c], 1e-8);
      }
    }
  }
}

TEST(BrStep, Interpolates) {
  const GameSpec spec = testing::quadratic_identity_spec(2, {0.2, 1.0}, 0, 1.0);
  const auto belief = point_mass_belief(2, 1);
  const auto x = scalar_profile({0.2, 0.0});
  EXPECT_DOUBLE_EQ(br_step(spec, 0, x, belief, 0.0)[0], 0.2);
  EXPECT_NEAR(br_step(spec, 0, x, belief, 0.25)[0], 0.4, 1e-15);
  EXPECT_NEAR(br_step(spec, 0, x, belief, 1.0)[0], 1.0, 1e-15);
  EXPECT_THROW(br_step(spec, 0, x, belief, 1.5), InvalidInput);
}

TEST(MeanParameter, Weighted) {
  const GameSpec spec = testing::desk_cournot();
  const double p[] = {0.5, 0.25, 0.25};
  EXPECT_NEAR(mean_parameter(spec, BeliefVector::from_probabilities(p)), 0.95, 1e-15);
}

}  // namespace
}  // namespace nbl
