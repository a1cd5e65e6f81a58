#pragma once

// Beliefs over the finite parameter set, kept as unnormalised log-weights.
//
// Both belief operations are linear in log space: the tempered posterior adds
// alpha * log-likelihoods, the pooling step takes a W-weighted sum of
// neighbours' log-probabilities. Normalisation happens only on read-out, so a
// belief never underflows to an exact zero.

#include <cstddef>
#include <span>
#include <vector>

#include "nbl/error.hpp"

namespace nbl {

class BeliefVector {
 public:
  BeliefVector() = default;

  static BeliefVector from_log_weights(std::vector<double> log_weights);
  /// Requires strictly positive entries; they need not sum to one.
  static BeliefVector from_probabilities(std::span<const double> probabilities);

  std::size_t size() const noexcept { return log_w_.size(); }
  const std::vector<double>& log_weights() const noexcept { return log_w_; }

  std::vector<double> probabilities() const;
  double probability(std::size_t k) const;
  /// log P(theta_k), normalised.
  double log_probability(std::size_t k) const;
  /// log( P(theta_a) / P(theta_b) ), read straight from the log-weights.
  double log_ratio(std::size_t a, std::size_t b) const { return log_w_.at(a) - log_w_.at(b); }

 private:
  explicit BeliefVector(std::vector<double> log_w) : log_w_(std::move(log_w)) {}
  double log_normalizer() const;

  std::vector<double> log_w_;
};

/// (1/M, ..., 1/M). Throws InvalidInput for M < 2.
BeliefVector uniform_belief(std::size_t m);

/// Posterior proportional to f_k^alpha * prior_k, with log f_k = log_liks[k].
BeliefVector tempered_bayes(const BeliefVector& prior, std::span<const double> log_liks,
                            double alpha);

/// Pooled belief proportional to exp( sum_j w_j log b_j ). `weights` and
/// `neighbor_beliefs` are aligned; zero weights may be included or omitted.
BeliefVector log_linear_pool(std::span<const BeliefVector> neighbor_beliefs,
                             std::span<const double> weights);

/// max over (i, j, k) of |log(mu_i(k)/mu_i(0)) - log(mu_j(k)/mu_j(0))|.
double consensus_error(std::span<const BeliefVector> beliefs);

/// (1/N) sum_i mu_i(theta_k) / mu_i(theta_{k_star}).
double belief_ratio_sum(std::span<const BeliefVector> beliefs, std::size_t k,
                        std::size_t k_star);

}  // namespace nbl
