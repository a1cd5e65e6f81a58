#pragma once

// The learning loop: noisy costs -> tempered posterior -> log-linear pooling
// over the graph -> damped best response, with one diminishing step size
// alpha(t) driving both the tempering exponent and the strategy step.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nbl/beliefs.hpp"
#include "nbl/game_model.hpp"
#include "nbl/network.hpp"

namespace nbl {

/// alpha(t) = alpha0 / (1 + t)^gamma with alpha0 in (0, 1) and gamma in
/// (0.5, 1], so that sum alpha = inf and sum alpha^2 < inf.
struct StepSchedule {
  double alpha0 = 0.5;
  double gamma = 0.7;

  /// Throws InvalidInput naming Assumption 4 when out of range.
  void validate() const;
  double value(std::uint64_t t) const;
};

inline double schedule_value(const StepSchedule& s, std::uint64_t t) { return s.value(t); }

struct SimState {
  std::uint64_t t = 0;
  StrategyProfile profile;
  std::vector<BeliefVector> beliefs;
  std::uint64_t seed = 0;
  /// Realised costs y_i^(t-1) of the most recent step (empty before the first).
  std::vector<double> last_costs;
};

/// Uniform beliefs and the given (or midpoint) initial profile at t = 0.
SimState initial_state(const GameSpec& spec, std::uint64_t seed,
                       std::optional<StrategyProfile> x0 = std::nullopt);

/// Noise draw for agent i at step t; a pure function of (seed, i, t).
double realized_cost_at(const GameSpec& spec, std::size_t i, const StrategyProfile& x,
                        std::uint64_t seed, std::uint64_t t);

/// Per-agent log-likelihood vector fed to the tempered update:
/// entry k is clamped_log_ratio(y, x, k, 0), so entry 0 is zero.
std::vector<double> clamped_log_likelihoods(const GameSpec& spec, std::size_t i, double y,
                                            const StrategyProfile& x);

/// One step with an explicit step size (alpha may be zero here).
SimState sim_step_with_alpha(const GameSpec& spec, const WeightMatrix& w, double alpha,
                             const SimState& state);

/// One step with alpha = schedule.value(state.t).
SimState sim_step(const GameSpec& spec, const WeightMatrix& w, const StepSchedule& schedule,
                  const SimState& state);

/// Post-step snapshot. t is the step count after the update (1..T); alpha is
/// the step size that produced it.
struct TraceRecord {
  std::uint64_t t = 0;
  StrategyProfile profile;
  std::vector<BeliefVector> beliefs;
  double alpha = 0.0;
  double consensus_error = 0.0;
  /// mu_i(theta*) per agent.
  std::vector<double> belief_truth;
  /// Distance to the reference equilibrium; NaN when none was supplied.
  double dist_to_ne = 0.0;
};

struct RunOptions {
  std::optional<StrategyProfile> x0;
  std::optional<StrategyProfile> reference_ne;
  /// Keep every `thin`-th record (t % thin == 0) plus the last one.
  std::uint64_t thin = 1;
};

TraceRecord make_record(const GameSpec& spec, const SimState& state, double alpha,
                        const std::optional<StrategyProfile>& reference_ne);

std::vector<TraceRecord> run(const GameSpec& spec, const WeightMatrix& w,
                             const StepSchedule& schedule, std::uint64_t T, std::uint64_t seed,
                             const RunOptions& options = {});

}  // namespace nbl
