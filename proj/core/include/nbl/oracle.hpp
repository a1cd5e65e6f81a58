#pragma once

// Reference equilibria computed independently of the learning loop.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nbl/beliefs.hpp"
#include "nbl/game_model.hpp"

namespace nbl {

struct NeResult {
  StrategyProfile profile;
  /// max_i || x_i - BR_i(x_{-i}, belief_i) || at the returned profile.
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct NeOptions {
  double tol = 1e-10;
  int max_iter = 100'000;
  /// x <- x + r (BR(x) - x). r = 1 is plain simultaneous best response.
  double relaxation = 1.0;
  std::optional<StrategyProfile> x0;
};

/// Simultaneous best-response iteration. `beliefs` holds one common belief
/// or one belief per agent. Non-convergence is reported, not thrown.
NeResult ne_fixed_point(const GameSpec& spec, std::span<const BeliefVector> beliefs,
                        const NeOptions& options = {});

/// Belief that puts (almost) all mass on theta_k; off-mass entries are
/// exp(-700)-scale so the vector stays strictly positive.
BeliefVector point_mass_belief(std::size_t m, std::size_t k);

/// Closed-form equilibrium under a common belief for the built-in families.
/// Cournot solves (I + 11^T) x = E[theta] - c and falls back to a damped
/// fixed-point iteration when any box constraint binds.
StrategyProfile closed_form_ne(const GameSpec& spec, const BeliefVector& belief);

/// Equilibrium of the game in which everyone knows theta* (point-mass belief).
StrategyProfile true_ne(const GameSpec& spec);

struct FlowResult {
  std::vector<StrategyProfile> trajectory;  // x(0), x(dt), ..., x(T_flow)
  double terminal_distance = 0.0;           // to closed_form_ne
};

/// Explicit Euler discretisation of dx/dt = BR(x) - x on [0, t_flow].
FlowResult br_flow(const GameSpec& spec, const BeliefVector& belief, const StrategyProfile& x0,
                   double dt, double t_flow);

/// Spectral radius of the finite-difference Jacobian of the joint BR map at x.
double br_jacobian_spectral_radius(const GameSpec& spec, const BeliefVector& belief,
                                   const StrategyProfile& x);

}  // namespace nbl
