#pragma once

// Post-processing of traces: learning-rate slope against the network
// divergence, the concentration envelope, and distances to equilibrium.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nbl/dynamics.hpp"
#include "nbl/game_model.hpp"

namespace nbl {

/// s^(T) = sum_{t=1}^{T} alpha(t).
double partial_sum(const StepSchedule& schedule, std::uint64_t T);

/// Euclidean norm of the stacked difference.
double dist_to_ne(const StrategyProfile& profile, const StrategyProfile& ne_profile);

struct RateCheck {
  std::size_t agent = 0;
  std::size_t k = 0;
  /// (1/s^(T)) log( mu_i^(T+1)(theta*) / mu_i^(T+1)(theta_k) ), T+1 = final trace step.
  double slope_estimate = 0.0;
  double z_target = 0.0;
  /// |slope - Z| / Z; NaN when flagged.
  double rel_error = 0.0;
  /// Z == 0: theta_k is not separated from theta* at the reference equilibrium.
  bool flagged = false;
  double s_T = 0.0;
};

/// Throws InvalidInput if the trace is empty or s^(T) < 10 (too short).
RateCheck rate_check(std::span<const TraceRecord> trace, const GameSpec& spec,
                     const StepSchedule& schedule, const StrategyProfile& oracle_ne,
                     std::size_t i, std::size_t k);

/// Same slope computed from normalised probabilities instead of log-weights.
double slope_from_probabilities(const TraceRecord& record, const StepSchedule& schedule,
                                std::size_t true_index, std::size_t i, std::size_t k);

struct EnvelopeReport {
  double epsilon = 0.0;
  /// Smallest T (with record step T+1) from which every later record satisfies
  /// the envelope for every agent; -1 if the final record violates it.
  std::int64_t t0 = -1;
  /// First T at which the envelope held for every agent; -1 if never.
  std::int64_t first_satisfied = -1;
  /// Violating records after first_satisfied.
  std::size_t violations_after_first = 0;
};

/// mu_i^(T+1)(theta*) >= 1 / (1 + sum_{k != *} exp(-s^(T) (Z_k - eps))) with
/// eps = eps_fraction * min_k Z_k, checked along the trace for all agents.
EnvelopeReport envelope_check(std::span<const TraceRecord> trace, const GameSpec& spec,
                              const StepSchedule& schedule, const StrategyProfile& oracle_ne,
                              double eps_fraction = 0.25);

}  // namespace nbl
