#pragma once

#include <cstddef>
#include <vector>

#include "nbl/beliefs.hpp"
#include "nbl/game_model.hpp"

namespace nbl {

/// sum_k mu(k) u_i(x, theta_k).
double expected_cost(const GameSpec& spec, std::size_t i, const StrategyProfile& x,
                     const BeliefVector& belief);

/// Gradient of expected_cost with respect to x_i.
std::vector<double> expected_cost_gradient(const GameSpec& spec, std::size_t i,
                                           const StrategyProfile& x, const BeliefVector& belief);

/// E_mu[theta].
double mean_parameter(const GameSpec& spec, const BeliefVector& belief);

struct ProjectedGradientOptions {
  int max_iterations = 10'000;
  double gradient_tolerance = 1e-10;
  double armijo = 1e-4;
};

/// Minimiser of expected_cost over agent i's box; the x_i entries of `x` are
/// ignored. Closed form for the built-in families, projected gradient for
/// custom costs.
std::vector<double> best_response(const GameSpec& spec, std::size_t i, const StrategyProfile& x,
                                  const BeliefVector& belief);

/// Projected gradient with Armijo backtracking, started from the box
/// midpoint. Throws SolverError when the iteration cap is reached.
std::vector<double> best_response_projected_gradient(const GameSpec& spec, std::size_t i,
                                                     const StrategyProfile& x,
                                                     const BeliefVector& belief,
                                                     const ProjectedGradientOptions& options = {});

/// (1 - alpha) x_i + alpha BR_i(x_{-i}, belief).
std::vector<double> br_step(const GameSpec& spec, std::size_t i, const StrategyProfile& x,
                            const BeliefVector& belief, double alpha);

}  // namespace nbl
