#include "nbl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nbl {

double partial_sum(const StepSchedule& schedule, std::uint64_t T) {
  double s = 0.0;
  for (std::uint64_t t = 1; t <= T; ++t) s += schedule.value(t);
  return s;
}

double dist_to_ne(const StrategyProfile& profile, const StrategyProfile& ne_profile) {
  if (profile.flat().size() != ne_profile.flat().size())
    throw InvalidInput("dist_to_ne: profiles differ in size");
  double d2 = 0.0;
  for (std::size_t q = 0; q < profile.flat().size(); ++q) {
    const double d = profile.flat()[q] - ne_profile.flat()[q];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

RateCheck rate_check(std::span<const TraceRecord> trace, const GameSpec& spec,
                     const StepSchedule& schedule, const StrategyProfile& oracle_ne,
                     std::size_t i, std::size_t k) {
  if (trace.empty()) throw InvalidInput("rate_check: empty trace");
  if (i >= spec.n_agents || k >= spec.n_params())
    throw InvalidInput("rate_check: index out of range");
  const TraceRecord& last = trace.back();
  RateCheck rc;
  rc.agent = i;
  rc.k = k;
  rc.s_T = partial_sum(schedule, last.t - 1);
  if (rc.s_T < 10.0)
    throw InvalidInput("rate_check: trace too short (s^(T) < 10)");
  const std::size_t star = spec.params.true_index;
  rc.slope_estimate = last.beliefs[i].log_ratio(star, k) / rc.s_T;
  rc.z_target = network_divergence(spec, oracle_ne, k);
  if (rc.z_target <= 0.0) {
    rc.flagged = true;
    rc.rel_error = std::numeric_limits<double>::quiet_NaN();
  } else {
    rc.rel_error = std::abs(rc.slope_estimate - rc.z_target) / rc.z_target;
  }
  return rc;
}

double slope_from_probabilities(const TraceRecord& record, const StepSchedule& schedule,
                                std::size_t true_index, std::size_t i, std::size_t k) {
  const auto p = record.beliefs.at(i).probabilities();
  return std::log(p.at(true_index) / p.at(k)) / partial_sum(schedule, record.t - 1);
}

EnvelopeReport envelope_check(std::span<const TraceRecord> trace, const GameSpec& spec,
                              const StepSchedule& schedule, const StrategyProfile& oracle_ne,
                              double eps_fraction) {
  const std::size_t star = spec.params.true_index;
  std::vector<double> z;
  double z_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < spec.n_params(); ++k) {
    if (k == star) continue;
    z.push_back(network_divergence(spec, oracle_ne, k));
    z_min = std::min(z_min, z.back());
  }
  EnvelopeReport report;
  report.epsilon = eps_fraction * z_min;

  // Running s^(T) along the (possibly thinned) trace.
  double s = 0.0;
  std::uint64_t summed_to = 0;
  bool last_ok = false;
  std::int64_t run_start = -1;
  for (const auto& rec : trace) {
    const std::uint64_t T = rec.t - 1;
    for (; summed_to < T; ++summed_to) s += schedule.value(summed_to + 1);
    double tail = 0.0;
    for (double zk : z) tail += std::exp(-s * (zk - report.epsilon));
    const double bound = 1.0 / (1.0 + tail);
    bool ok = true;
    for (double truth : rec.belief_truth) ok = ok && truth >= bound;
    if (ok) {
      if (report.first_satisfied < 0) report.first_satisfied = static_cast<std::int64_t>(T);
      if (!last_ok) run_start = static_cast<std::int64_t>(T);
    } else if (report.first_satisfied >= 0) {
      ++report.violations_after_first;
    }
    last_ok = ok;
  }
  report.t0 = last_ok ? run_start : -1;
  return report;
}

}  // namespace nbl
