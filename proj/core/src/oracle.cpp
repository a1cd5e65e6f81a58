#include "nbl/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "nbl/metrics.hpp"
#include "nbl/strategy.hpp"

namespace nbl {

namespace {

const BeliefVector& belief_of(std::span<const BeliefVector> beliefs, std::size_t i) {
  return beliefs.size() == 1 ? beliefs[0] : beliefs[i];
}

StrategyProfile joint_best_response(const GameSpec& spec, std::span<const BeliefVector> beliefs,
                                    const StrategyProfile& x) {
  StrategyProfile br = x;
  for (std::size_t i = 0; i < spec.n_agents; ++i) {
    const auto bi = best_response(spec, i, x, belief_of(beliefs, i));
    std::copy(bi.begin(), bi.end(), br.agent(i).begin());
  }
  return br;
}

double max_agent_distance(const GameSpec& spec, const StrategyProfile& a,
                          const StrategyProfile& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < spec.n_agents; ++i) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < spec.dim; ++c) {
      const double d = a.agent(i)[c] - b.agent(i)[c];
      d2 += d * d;
    }
    worst = std::max(worst, std::sqrt(d2));
  }
  return worst;
}

}  // namespace

NeResult ne_fixed_point(const GameSpec& spec, std::span<const BeliefVector> beliefs,
                        const NeOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidInput("ne_fixed_point: tol must be positive");
  if (!(options.relaxation > 0.0 && options.relaxation <= 1.0))
    throw InvalidInput("ne_fixed_point: relaxation must lie in (0, 1]");
  if (beliefs.size() != 1 && beliefs.size() != spec.n_agents)
    throw InvalidInput("ne_fixed_point: need one common belief or one belief per agent");

  NeResult result;
  result.profile = options.x0 ? *options.x0 : spec.midpoint_profile();
  if (!spec.contains(result.profile))
    throw InvalidInput("ne_fixed_point: starting profile outside the boxes");

  const double r = options.relaxation;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const StrategyProfile br = joint_best_response(spec, beliefs, result.profile);
    double change = 0.0;
    for (std::size_t q = 0; q < br.flat().size(); ++q) {
      const double next = result.profile.flat()[q] + r * (br.flat()[q] - result.profile.flat()[q]);
      change = std::max(change, std::abs(next - result.profile.flat()[q]));
      result.profile.flat()[q] = next;
    }
    result.iterations = iter;
    if (change <= options.tol) {
      result.converged = true;
      break;
    }
  }
  result.residual = max_agent_distance(spec, result.profile,
                                       joint_best_response(spec, beliefs, result.profile));
  return result;
}

BeliefVector point_mass_belief(std::size_t m, std::size_t k) {
  if (k >= m) throw InvalidInput("point_mass_belief: index out of range");
  std::vector<double> log_w(m, -700.0);
  log_w[k] = 0.0;
  return BeliefVector::from_log_weights(std::move(log_w));
}

StrategyProfile closed_form_ne(const GameSpec& spec, const BeliefVector& belief) {
  const double theta_bar = mean_parameter(spec, belief);
  switch (spec.costs.kind) {
    case CostKind::QuadraticTarget: {
      // Best responses do not depend on x_{-i}: the equilibrium is decoupled.
      StrategyProfile x(spec.n_agents, spec.dim);
      for (std::size_t i = 0; i < spec.n_agents; ++i) {
        auto h = spec.costs.target(i, theta_bar);
        spec.boxes[i].project(h);
        std::copy(h.begin(), h.end(), x.agent(i).begin());
      }
      return x;
    }
    case CostKind::Cournot: {
      const auto n = static_cast<Eigen::Index>(spec.n_agents);
      const Eigen::MatrixXd a =
          Eigen::MatrixXd::Identity(n, n) + Eigen::MatrixXd::Ones(n, n);
      Eigen::VectorXd rhs(n);
      for (Eigen::Index i = 0; i < n; ++i)
        rhs(i) = theta_bar - spec.costs.marginal_cost[static_cast<std::size_t>(i)];
      const Eigen::VectorXd sol = a.ldlt().solve(rhs);
      StrategyProfile x(1, std::vector<double>(sol.data(), sol.data() + n));
      if (spec.contains(x)) return x;
      // A bound binds: the interior linear solution is not the equilibrium.
      // Damping by 2/(N+1) makes the linearised iteration a contraction.
      NeOptions opts;
      opts.relaxation = std::min(1.0, 2.0 / (static_cast<double>(spec.n_agents) + 1.0));
      const BeliefVector common[] = {belief};
      NeResult fallback = ne_fixed_point(spec, common, opts);
      if (!fallback.converged)
        throw SolverError("closed_form_ne: constrained Cournot fallback did not converge");
      return fallback.profile;
    }
    case CostKind::Custom:
      break;
  }
  throw InvalidInput("closed_form_ne: only built-in cost families have a closed form");
}

StrategyProfile true_ne(const GameSpec& spec) {
  return closed_form_ne(spec, point_mass_belief(spec.n_params(), spec.params.true_index));
}

FlowResult br_flow(const GameSpec& spec, const BeliefVector& belief, const StrategyProfile& x0,
                   double dt, double t_flow) {
  if (!(dt > 0.0 && dt <= 1.0)) throw InvalidInput("br_flow: dt must lie in (0, 1]");
  if (!(t_flow >= 0.0)) throw InvalidInput("br_flow: horizon must be nonnegative");
  if (!spec.contains(x0)) throw InvalidInput("br_flow: x0 outside the boxes");
  const BeliefVector common[] = {belief};
  const auto steps = static_cast<std::size_t>(std::ceil(t_flow / dt - 1e-9));
  FlowResult result;
  result.trajectory.reserve(steps + 1);
  result.trajectory.push_back(x0);
  StrategyProfile x = x0;
  for (std::size_t s = 0; s < steps; ++s) {
    const StrategyProfile br = joint_best_response(spec, common, x);
    for (std::size_t q = 0; q < x.flat().size(); ++q)
      x.flat()[q] += dt * (br.flat()[q] - x.flat()[q]);
    result.trajectory.push_back(x);
  }
  result.terminal_distance = dist_to_ne(x, closed_form_ne(spec, belief));
  return result;
}

double br_jacobian_spectral_radius(const GameSpec& spec, const BeliefVector& belief,
                                   const StrategyProfile& x) {
  const BeliefVector common[] = {belief};
  const auto n = static_cast<Eigen::Index>(x.flat().size());
  Eigen::MatrixXd jac(n, n);
  const double h = 1e-6;
  for (Eigen::Index q = 0; q < n; ++q) {
    const auto qi = static_cast<std::size_t>(q);
    const auto& box = spec.boxes[qi / spec.dim];
    const std::size_t c = qi % spec.dim;
    // Central difference, one-sided at a bound.
    StrategyProfile up = x;
    StrategyProfile down = x;
    up.flat()[qi] = std::min(x.flat()[qi] + h, box.upper[c]);
    down.flat()[qi] = std::max(x.flat()[qi] - h, box.lower[c]);
    const double width = up.flat()[qi] - down.flat()[qi];
    if (width <= 0.0) {
      jac.col(q).setZero();
      continue;
    }
    const StrategyProfile br_up = joint_best_response(spec, common, up);
    const StrategyProfile br_down = joint_best_response(spec, common, down);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto ri = static_cast<std::size_t>(r);
      jac(r, q) = (br_up.flat()[ri] - br_down.flat()[ri]) / width;
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace nbl
