#pragma once

// Communication graph and doubly stochastic mixing weights.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nbl/error.hpp"

namespace nbl {

/// Undirected simple graph; edges are stored as (u, v) with u < v, sorted.
class Graph {
 public:
  Graph(std::size_t n_nodes, std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t n_nodes() const noexcept { return n_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }
  std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_.at(v); }
  bool has_edge(std::size_t u, std::size_t v) const;
  bool is_connected() const;

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

enum class GraphKind { Ring, Complete, ErdosRenyi };

/// Builds a connected graph. Erdos-Renyi draws are resampled up to
/// `kErdosRenyiRetries` times; after that a ConstructionError is thrown.
Graph generate_graph(GraphKind kind, std::size_t n, double p, std::uint64_t seed);

inline constexpr int kErdosRenyiRetries = 1000;

/// Parses "i j" pairs, one per line; blank lines and '#' comments are skipped.
/// When n_nodes is 0 it is inferred as max index + 1.
Graph read_edge_list(std::istream& in, std::size_t n_nodes = 0);

/// Symmetric doubly stochastic weight matrix together with its mixing rate
/// lambda_max = max(|lambda_2|, |lambda_N|).
class WeightMatrix {
 public:
  /// Validates nonnegativity, unit row and column sums (within 1e-12) and
  /// symmetry, then computes lambda_max. Throws InvalidInput otherwise.
  static WeightMatrix from_entries(Eigen::MatrixXd entries);

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double lambda_max() const noexcept { return lambda_max_; }

 private:
  WeightMatrix(Eigen::MatrixXd entries, double lambda_max)
      : entries_(std::move(entries)), lambda_max_(lambda_max) {}

  Eigen::MatrixXd entries_;
  double lambda_max_;
};

inline constexpr double kStochasticTolerance = 1e-12;

/// w_ij = 1 / (1 + max(d_i, d_j)) on edges, w_ii = 1 - sum_{j != i} w_ij.
WeightMatrix metropolis_weights(const Graph& g);

/// Second largest eigenvalue modulus of a symmetric stochastic matrix.
double spectral_gap(const Eigen::MatrixXd& w);
inline double spectral_gap(const WeightMatrix& w) { return spectral_gap(w.entries()); }

struct MixingReport {
  int t_max = 0;
  double lambda_max = 0.0;
  /// max over (i, j, t) of |W^t(i,j) - 1/N| - lambda_max^t; <= slack when the bound holds.
  double max_excess = 0.0;
  std::size_t violations = 0;
  bool ok() const noexcept { return violations == 0; }
};

/// Checks |W^t(i,j) - 1/N| <= lambda_max^t + slack for 1 <= t <= t_max.
MixingReport verify_mixing_bound(const WeightMatrix& w, int t_max, double slack = 1e-10);

}  // namespace nbl
