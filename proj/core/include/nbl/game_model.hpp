#pragma once

// Stage game with an unknown, finite-valued cost parameter.
//
// Agents i = 0..N-1 each choose x_i inside a box of dimension `dim`. Agent i
// pays u_i(x, theta); what it observes is a noisy realisation
// y_i = u_i(x, theta*) + eps, eps ~ Normal(0, sigma^2). Every belief update in
// the library consumes log-likelihood ratios through clamped_log_ratio(),
// which bounds the information content of a single observation by clamp_L.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nbl/error.hpp"

namespace nbl {

/// Finite parameter set Theta = {theta_0, ..., theta_{M-1}} and the index of
/// the true parameter.
struct ParameterSet {
  std::vector<double> values;
  std::size_t true_index = 0;

  std::size_t size() const noexcept { return values.size(); }
  double true_value() const { return values.at(true_index); }
  /// Throws InvalidInput unless M >= 2, values are finite and pairwise
  /// distinct, and true_index is in range.
  void validate() const;
};

/// Axis-aligned box lower <= x <= upper.
struct StrategyBox {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const noexcept { return lower.size(); }
  bool contains(std::span<const double> x, double slack = 0.0) const;
  void project(std::span<double> x) const;
  std::vector<double> midpoint() const;
  void validate() const;
};

/// Joint strategy profile, stored flat: agent i owns [i*dim, (i+1)*dim).
class StrategyProfile {
 public:
  StrategyProfile() = default;
  StrategyProfile(std::size_t n_agents, std::size_t dim, double fill = 0.0)
      : dim_(dim), values_(n_agents * dim, fill) {}
  StrategyProfile(std::size_t dim, std::vector<double> values);

  std::size_t n_agents() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<double> agent(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> agent(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

  const std::vector<double>& flat() const noexcept { return values_; }
  std::vector<double>& flat() noexcept { return values_; }

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

enum class CostKind { QuadraticTarget, Cournot, Custom };

std::string to_string(CostKind kind);

/// User-supplied cost for the generic solver paths. `cost` must be strictly
/// convex in x_i; `gradient` writes d u_i / d x_i into `grad_i`.
struct CustomCost {
  std::function<double(std::size_t i, const StrategyProfile& x, double theta)> cost;
  std::function<void(std::size_t i, const StrategyProfile& x, double theta,
                     std::span<double> grad_i)>
      gradient;
};

/// Built-in cost families:
///   QuadraticTarget  u_i(x, theta) = || x_i - h_i(theta) ||^2,
///                    h_i(theta)_c = offset[i][c] + slope[i][c] * theta
///   Cournot          u_i(x, theta) = c_i x_i - x_i theta + x_i sum_j x_j   (dim 1)
struct CostFamily {
  CostKind kind = CostKind::QuadraticTarget;
  std::vector<std::vector<double>> offset;
  std::vector<std::vector<double>> slope;
  std::vector<double> marginal_cost;
  CustomCost custom;

  static CostFamily quadratic_target(std::vector<std::vector<double>> offset,
                                     std::vector<std::vector<double>> slope);
  static CostFamily cournot(std::vector<double> marginal_cost);
  static CostFamily make_custom(CustomCost custom);

  /// Target h_i(theta) for QuadraticTarget.
  std::vector<double> target(std::size_t i, double theta) const;
};

struct NoiseModel {
  double sigma = 1.0;
  double clamp_L = 10.0;
  void validate() const;
};

struct GameSpec {
  std::size_t n_agents = 0;
  std::size_t dim = 1;
  std::vector<StrategyBox> boxes;
  CostFamily costs;
  ParameterSet params;
  NoiseModel noise;

  std::size_t n_params() const noexcept { return params.size(); }
  /// Structural checks only; convexity and identifiability are probed
  /// separately because they are numerical.
  void validate() const;
  bool contains(const StrategyProfile& x, double slack = 0.0) const;
  StrategyProfile midpoint_profile() const;
};

// ---------------------------------------------------------------------------
// Cost evaluation

/// u_i(x, theta_k). Throws InvalidInput for bad indices or x outside the boxes.
double eval_cost(const GameSpec& spec, std::size_t i, const StrategyProfile& x, std::size_t k);

/// u_i(x, theta) for an arbitrary scalar theta; no range checks.
double cost_at(const GameSpec& spec, std::size_t i, const StrategyProfile& x, double theta);

/// d u_i / d x_i at (x, theta), written into grad_i (length dim).
void cost_gradient_at(const GameSpec& spec, std::size_t i, const StrategyProfile& x,
                      double theta, std::span<double> grad_i);

/// y_i = u_i(x, theta*) + eps with eps ~ Normal(0, sigma^2) drawn from `rng`.
template <class Urbg>
double realize_cost(const GameSpec& spec, std::size_t i, const StrategyProfile& x, Urbg& rng) {
  const double mean = eval_cost(spec, i, x, spec.params.true_index);
  std::normal_distribution<double> noise(0.0, spec.noise.sigma);
  return mean + noise(rng);
}

/// log f_i(y | x, theta_k): Gaussian log-density with mean u_i(x, theta_k).
double log_likelihood(const GameSpec& spec, std::size_t i, double y, const StrategyProfile& x,
                      std::size_t k);

/// clamp(log f_i(y|x,theta_k1) - log f_i(y|x,theta_k2), -L, L).
double clamped_log_ratio(const GameSpec& spec, std::size_t i, double y, const StrategyProfile& x,
                         std::size_t k1, std::size_t k2);

/// KL( f_i(.|x,theta_k1) || f_i(.|x,theta_k2) ) = (u_k1 - u_k2)^2 / (2 sigma^2).
double kl_local(const GameSpec& spec, std::size_t i, const StrategyProfile& x, std::size_t k1,
                std::size_t k2);

/// Z(theta*, theta_k) at x: mean over agents of kl_local(j, x, true_index, k).
double network_divergence(const GameSpec& spec, const StrategyProfile& x, std::size_t k);

// ---------------------------------------------------------------------------
// Numerical probes of the modelling assumptions

inline constexpr double kIdentifiabilityTolerance = 1e-9;

struct IdentifiabilityReport {
  struct Entry {
    std::size_t k = 0;
    bool identifiable = true;
    /// First sample at which no agent separates theta_k from theta*.
    std::ptrdiff_t failing_sample = -1;
  };
  std::vector<Entry> entries;  // one per k != true_index

  bool ok() const noexcept;
};

IdentifiabilityReport check_identifiability(const GameSpec& spec,
                                            std::span<const StrategyProfile> x_samples,
                                            double tolerance = kIdentifiabilityTolerance);

/// Box corners (when there are at most 2^12 of them) plus `n_random`
/// uniform points, for use with check_identifiability.
std::vector<StrategyProfile> probe_profiles(const GameSpec& spec, std::size_t n_random,
                                            std::uint64_t seed);

struct ConvexityReport {
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::ptrdiff_t first_failing_agent = -1;
  bool ok() const noexcept { return failures == 0; }
};

/// Midpoint test of x_i -> u_i(x_i, x_{-i}, theta) along random segments, for
/// every agent and `trials` random (x_{-i}, theta) draws.
ConvexityReport probe_strict_convexity(const GameSpec& spec, std::size_t trials,
                                       std::uint64_t seed);

}  // namespace nbl
