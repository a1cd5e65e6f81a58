#include "nbl/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nbl/metrics.hpp"
#include "nbl/rng.hpp"
#include "nbl/strategy.hpp"

namespace nbl {

void StepSchedule::validate() const {
  if (!(alpha0 > 0.0 && alpha0 < 1.0))
    throw InvalidInput("Assumption 4: alpha0 must lie in (0, 1), got " + std::to_string(alpha0));
  if (!(gamma > 0.5 && gamma <= 1.0)) {
    const char* which = gamma <= 0.5 ? "sum of squared step sizes diverges"
                                     : "sum of step sizes converges";
    throw InvalidInput("Assumption 4: gamma must lie in (0.5, 1] (" + std::string(which) +
                       "), got " + std::to_string(gamma));
  }
}

double StepSchedule::value(std::uint64_t t) const {
  return alpha0 / std::pow(1.0 + static_cast<double>(t), gamma);
}

SimState initial_state(const GameSpec& spec, std::uint64_t seed,
                       std::optional<StrategyProfile> x0) {
  SimState state;
  state.seed = seed;
  state.profile = x0 ? std::move(*x0) : spec.midpoint_profile();
  if (!spec.contains(state.profile))
    throw InvalidInput("initial profile lies outside the strategy boxes");
  state.beliefs.assign(spec.n_agents, uniform_belief(spec.n_params()));
  return state;
}

double realized_cost_at(const GameSpec& spec, std::size_t i, const StrategyProfile& x,
                        std::uint64_t seed, std::uint64_t t) {
  CounterRng rng(seed, i, t);
  return realize_cost(spec, i, x, rng);
}

std::vector<double> clamped_log_likelihoods(const GameSpec& spec, std::size_t i, double y,
                                            const StrategyProfile& x) {
  std::vector<double> ll(spec.n_params());
  for (std::size_t k = 0; k < ll.size(); ++k) ll[k] = clamped_log_ratio(spec, i, y, x, k, 0);
  return ll;
}

SimState sim_step_with_alpha(const GameSpec& spec, const WeightMatrix& w, double alpha,
                             const SimState& state) {
  const std::size_t n = spec.n_agents;
  if (w.size() != n) throw InvalidInput("weight matrix size differs from the number of agents");
  if (state.beliefs.size() != n) throw InvalidInput("state has the wrong number of beliefs");

  SimState next;
  next.seed = state.seed;
  next.t = state.t + 1;

  // (a) costs realised at the current profile x^(t)
  next.last_costs.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    next.last_costs[i] = realized_cost_at(spec, i, state.profile, state.seed, state.t);

  // (b) local tempered posteriors b_i^(t), all from x^(t)
  std::vector<BeliefVector> posteriors;
  posteriors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ll = clamped_log_likelihoods(spec, i, next.last_costs[i], state.profile);
    posteriors.push_back(tempered_bayes(state.beliefs[i], ll, alpha));
  }

  // (c) pool the posted posteriors over row i of W
  next.beliefs.reserve(n);
  std::vector<BeliefVector> support;
  std::vector<double> weights;
  for (std::size_t i = 0; i < n; ++i) {
    support.clear();
    weights.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (w(i, j) > 0.0) {
        support.push_back(posteriors[j]);
        weights.push_back(w(i, j));
      }
    }
    next.beliefs.push_back(log_linear_pool(support, weights));
  }

  // (d) damped best response against x_{-i}^(t) with the new private belief
  next.profile = state.profile;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = br_step(spec, i, state.profile, next.beliefs[i], alpha);
    std::copy(xi.begin(), xi.end(), next.profile.agent(i).begin());
  }
  return next;
}

SimState sim_step(const GameSpec& spec, const WeightMatrix& w, const StepSchedule& schedule,
                  const SimState& state) {
  return sim_step_with_alpha(spec, w, schedule.value(state.t), state);
}

TraceRecord make_record(const GameSpec& spec, const SimState& state, double alpha,
                        const std::optional<StrategyProfile>& reference_ne) {
  TraceRecord rec;
  rec.t = state.t;
  rec.profile = state.profile;
  rec.beliefs = state.beliefs;
  rec.alpha = alpha;
  rec.consensus_error = consensus_error(state.beliefs);
  rec.belief_truth.reserve(state.beliefs.size());
  for (const auto& b : state.beliefs)
    rec.belief_truth.push_back(b.probability(spec.params.true_index));
  rec.dist_to_ne = reference_ne ? dist_to_ne(state.profile, *reference_ne)
                                : std::numeric_limits<double>::quiet_NaN();
  return rec;
}

std::vector<TraceRecord> run(const GameSpec& spec, const WeightMatrix& w,
                             const StepSchedule& schedule, std::uint64_t T, std::uint64_t seed,
                             const RunOptions& options) {
  if (T < 1) throw InvalidInput("run: T must be at least 1");
  if (options.thin < 1) throw InvalidInput("run: thinning factor must be at least 1");
  schedule.validate();
  SimState state = initial_state(spec, seed, options.x0);
  std::vector<TraceRecord> trace;
  trace.reserve(static_cast<std::size_t>(T / options.thin + 1));
  for (std::uint64_t step = 0; step < T; ++step) {
    const double alpha = schedule.value(state.t);
    state = sim_step_with_alpha(spec, w, alpha, state);
    if (state.t % options.thin == 0 || step + 1 == T)
      trace.push_back(make_record(spec, state, alpha, options.reference_ne));
  }
  return trace;
}

}  // namespace nbl
