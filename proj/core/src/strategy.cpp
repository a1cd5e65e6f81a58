#include "nbl/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nbl {

namespace {

void check_belief(const GameSpec& spec, const BeliefVector& belief) {
  if (belief.size() != spec.n_params())
    throw InvalidInput("belief length " + std::to_string(belief.size()) +
                       " differs from the number of parameters");
}

double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return s;
}

}  // namespace

double expected_cost(const GameSpec& spec, std::size_t i, const StrategyProfile& x,
                     const BeliefVector& belief) {
  check_belief(spec, belief);
  const auto mu = belief.probabilities();
  double total = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) total += mu[k] * eval_cost(spec, i, x, k);
  return total;
}

std::vector<double> expected_cost_gradient(const GameSpec& spec, std::size_t i,
                                           const StrategyProfile& x, const BeliefVector& belief) {
  check_belief(spec, belief);
  const auto mu = belief.probabilities();
  std::vector<double> grad(spec.dim, 0.0);
  std::vector<double> g(spec.dim);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    cost_gradient_at(spec, i, x, spec.params.values[k], g);
    for (std::size_t c = 0; c < spec.dim; ++c) grad[c] += mu[k] * g[c];
  }
  return grad;
}

double mean_parameter(const GameSpec& spec, const BeliefVector& belief) {
  check_belief(spec, belief);
  const auto mu = belief.probabilities();
  double mean = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) mean += mu[k] * spec.params.values[k];
  return mean;
}

std::vector<double> best_response(const GameSpec& spec, std::size_t i, const StrategyProfile& x,
                                  const BeliefVector& belief) {
  if (i >= spec.n_agents) throw InvalidInput("best_response: agent index out of range");
  const auto& box = spec.boxes[i];
  switch (spec.costs.kind) {
    case CostKind::QuadraticTarget: {
      // argmin sum_k mu_k ||x_i - h_i(theta_k)||^2 = E_mu[h_i(theta)], h affine.
      const double theta_bar = mean_parameter(spec, belief);
      std::vector<double> br = spec.costs.target(i, theta_bar);
      box.project(br);
      return br;
    }
    case CostKind::Cournot: {
      const double theta_bar = mean_parameter(spec, belief);
      double others = 0.0;
      for (std::size_t j = 0; j < spec.n_agents; ++j)
        if (j != i) others += x.agent(j)[0];
      std::vector<double> br{0.5 * (theta_bar - spec.costs.marginal_cost[i] - others)};
      box.project(br);
      return br;
    }
    case CostKind::Custom:
      return best_response_projected_gradient(spec, i, x, belief);
  }
  throw InvalidInput("best_response: unknown cost family");
}

std::vector<double> best_response_projected_gradient(const GameSpec& spec, std::size_t i,
                                                     const StrategyProfile& x,
                                                     const BeliefVector& belief,
                                                     const ProjectedGradientOptions& options) {
  if (i >= spec.n_agents) throw InvalidInput("best_response: agent index out of range");
  const auto& box = spec.boxes[i];
  StrategyProfile trial = x;
  auto set_xi = [&](const std::vector<double>& xi) {
    std::copy(xi.begin(), xi.end(), trial.agent(i).begin());
  };

  std::vector<double> xi = box.midpoint();
  set_xi(xi);
  double f = expected_cost(spec, i, trial, belief);
  double step = 1.0;
  std::vector<double> candidate(spec.dim);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const auto grad = expected_cost_gradient(spec, i, trial, belief);

    // Projected-gradient residual x - P(x - g): zero exactly at the constrained minimiser.
    std::vector<double> residual(spec.dim);
    for (std::size_t c = 0; c < spec.dim; ++c)
      residual[c] = xi[c] - std::clamp(xi[c] - grad[c], box.lower[c], box.upper[c]);
    if (std::sqrt(squared_norm(residual)) <= options.gradient_tolerance) return xi;

    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      double decrease = 0.0;
      for (std::size_t c = 0; c < spec.dim; ++c) {
        candidate[c] = std::clamp(xi[c] - step * grad[c], box.lower[c], box.upper[c]);
        decrease += grad[c] * (xi[c] - candidate[c]);
      }
      set_xi(candidate);
      const double f_new = expected_cost(spec, i, trial, belief);
      if (f_new <= f - options.armijo * decrease) {
        xi = candidate;
        f = f_new;
        accepted = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No decrease representable in floating point: we are at the minimiser
      // up to round-off.
      set_xi(xi);
      return xi;
    }
  }
  throw SolverError("best_response: projected gradient did not converge within " +
                    std::to_string(options.max_iterations) + " iterations");
}

std::vector<double> br_step(const GameSpec& spec, std::size_t i, const StrategyProfile& x,
                            const BeliefVector& belief, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("br_step: alpha must lie in [0, 1]");
  const auto br = best_response(spec, i, x, belief);
  const auto xi = x.agent(i);
  std::vector<double> next(spec.dim);
  for (std::size_t c = 0; c < spec.dim; ++c) {
    next[c] = (1.0 - alpha) * xi[c] + alpha * br[c];
    next[c] = std::clamp(next[c], spec.boxes[i].lower[c], spec.boxes[i].upper[c]);
  }
  return next;
}

}  // namespace nbl
