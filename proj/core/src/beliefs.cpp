#include "nbl/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nbl {

namespace {

// Shifts log-weights so the largest is zero; probabilities are unchanged.
void recenter(std::vector<double>& log_w) {
  const double top = *std::max_element(log_w.begin(), log_w.end());
  for (double& v : log_w) v -= top;
}

}  // namespace

BeliefVector BeliefVector::from_log_weights(std::vector<double> log_weights) {
  if (log_weights.empty()) throw InvalidInput("BeliefVector: empty log-weights");
  for (double v : log_weights)
    if (!std::isfinite(v)) throw InvalidInput("BeliefVector: log-weights must be finite");
  recenter(log_weights);
  return BeliefVector(std::move(log_weights));
}

BeliefVector BeliefVector::from_probabilities(std::span<const double> probabilities) {
  std::vector<double> log_w(probabilities.size());
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (!(probabilities[k] > 0.0) || !std::isfinite(probabilities[k]))
      throw InvalidInput("BeliefVector: probabilities must be strictly positive");
    log_w[k] = std::log(probabilities[k]);
  }
  return from_log_weights(std::move(log_w));
}

double BeliefVector::log_normalizer() const {
  const double top = *std::max_element(log_w_.begin(), log_w_.end());
  double sum = 0.0;
  for (double v : log_w_) sum += std::exp(v - top);
  return top + std::log(sum);
}

std::vector<double> BeliefVector::probabilities() const {
  const double top = *std::max_element(log_w_.begin(), log_w_.end());
  std::vector<double> p(log_w_.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::exp(log_w_[k] - top);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

double BeliefVector::probability(std::size_t k) const { return probabilities().at(k); }

double BeliefVector::log_probability(std::size_t k) const {
  return log_w_.at(k) - log_normalizer();
}

BeliefVector uniform_belief(std::size_t m) {
  if (m < 2) throw InvalidInput("uniform_belief: need at least two parameters");
  return BeliefVector::from_log_weights(std::vector<double>(m, 0.0));
}

BeliefVector tempered_bayes(const BeliefVector& prior, std::span<const double> log_liks,
                            double alpha) {
  if (log_liks.size() != prior.size())
    throw InvalidInput("tempered_bayes: likelihood length differs from belief length");
  if (!std::isfinite(alpha) || alpha < 0.0)
    throw InvalidInput("tempered_bayes: alpha must be finite and nonnegative");
  std::vector<double> log_w = prior.log_weights();
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    if (!std::isfinite(log_liks[k]))
      throw InvalidInput("tempered_bayes: non-finite log-likelihood");
    log_w[k] += alpha * log_liks[k];
  }
  return BeliefVector::from_log_weights(std::move(log_w));
}

BeliefVector log_linear_pool(std::span<const BeliefVector> neighbor_beliefs,
                             std::span<const double> weights) {
  if (neighbor_beliefs.size() != weights.size() || neighbor_beliefs.empty())
    throw InvalidInput("log_linear_pool: belief and weight counts differ");
  const std::size_t m = neighbor_beliefs.front().size();
  double total_weight = 0.0;
  std::vector<double> log_w(m, 0.0);
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!(weights[j] >= 0.0)) throw InvalidInput("log_linear_pool: negative weight");
    if (neighbor_beliefs[j].size() != m)
      throw InvalidInput("log_linear_pool: beliefs over different parameter sets");
    total_weight += weights[j];
    if (weights[j] == 0.0) continue;
    for (std::size_t k = 0; k < m; ++k)
      log_w[k] += weights[j] * neighbor_beliefs[j].log_probability(k);
  }
  if (std::abs(total_weight - 1.0) > 1e-12)
    throw InvalidInput("log_linear_pool: weights must sum to one");
  return BeliefVector::from_log_weights(std::move(log_w));
}

double consensus_error(std::span<const BeliefVector> beliefs) {
  if (beliefs.size() < 2) throw InvalidInput("consensus_error: need at least two beliefs");
  const std::size_t m = beliefs.front().size();
  double worst = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    double lo = beliefs.front().log_ratio(k, 0);
    double hi = lo;
    for (const auto& b : beliefs) {
      if (b.size() != m) throw InvalidInput("consensus_error: beliefs differ in length");
      lo = std::min(lo, b.log_ratio(k, 0));
      hi = std::max(hi, b.log_ratio(k, 0));
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

double belief_ratio_sum(std::span<const BeliefVector> beliefs, std::size_t k,
                        std::size_t k_star) {
  if (beliefs.empty()) throw InvalidInput("belief_ratio_sum: no beliefs");
  double total = 0.0;
  for (const auto& b : beliefs) total += std::exp(b.log_ratio(k, k_star));
  return total / static_cast<double>(beliefs.size());
}

}  // namespace nbl
