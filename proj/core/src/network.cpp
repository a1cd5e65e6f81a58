#include "nbl/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

namespace nbl {

Graph::Graph(std::size_t n_nodes, std::vector<std::pair<std::size_t, std::size_t>> edges)
    : n_(n_nodes), adjacency_(n_nodes) {
  for (auto [u, v] : edges) {
    if (u >= n_ || v >= n_) throw InvalidInput("Graph: edge endpoint out of range");
    if (u == v) throw InvalidInput("Graph: self-loops are not allowed");
    edges_.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (auto [u, v] : edges_) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

bool Graph::has_edge(std::size_t u, std::size_t v) const {
  const auto& nb = adjacency_.at(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

bool Graph::is_connected() const {
  if (n_ == 0) return false;
  std::vector<bool> seen(n_, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n_;
}

Graph generate_graph(GraphKind kind, std::size_t n, double p, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("generate_graph: need at least two nodes");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  switch (kind) {
    case GraphKind::Ring:
      for (std::size_t v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
      return Graph(n, std::move(edges));
    case GraphKind::Complete:
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
      return Graph(n, std::move(edges));
    case GraphKind::ErdosRenyi: {
      if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("generate_graph: p must lie in (0, 1]");
      std::mt19937_64 rng(seed);
      std::bernoulli_distribution coin(p);
      for (int attempt = 0; attempt < kErdosRenyiRetries; ++attempt) {
        edges.clear();
        for (std::size_t u = 0; u < n; ++u)
          for (std::size_t v = u + 1; v < n; ++v)
            if (coin(rng)) edges.emplace_back(u, v);
        Graph g(n, edges);
        if (g.is_connected()) return g;
      }
      throw ConstructionError("Assumption 3: no connected Erdos-Renyi graph after " +
                              std::to_string(kErdosRenyiRetries) + " draws (p too small)");
    }
  }
  throw InvalidInput("generate_graph: unknown graph kind");
}

Graph read_edge_list(std::istream& in, std::size_t n_nodes) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t max_index = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long u = 0;
    long long v = 0;
    if (!(fields >> u)) continue;  // blank line
    std::string rest;
    if (!(fields >> v) || u < 0 || v < 0 || (fields >> rest))
      throw InvalidInput("edge list line " + std::to_string(line_no) + ": expected \"i j\"");
    edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    max_index = std::max({max_index, static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
  }
  if (edges.empty()) throw InvalidInput("edge list is empty");
  if (n_nodes == 0) n_nodes = max_index + 1;
  return Graph(n_nodes, std::move(edges));
}

WeightMatrix WeightMatrix::from_entries(Eigen::MatrixXd entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 2)
    throw InvalidInput("WeightMatrix: must be square with at least two rows");
  if (!entries.allFinite() || (entries.array() < 0.0).any())
    throw InvalidInput("WeightMatrix: entries must be finite and nonnegative");
  const Eigen::VectorXd rows = entries.rowwise().sum();
  const Eigen::VectorXd cols = entries.colwise().sum().transpose();
  if ((rows.array() - 1.0).abs().maxCoeff() > kStochasticTolerance ||
      (cols.array() - 1.0).abs().maxCoeff() > kStochasticTolerance)
    throw InvalidInput("Assumption 3: weight matrix is not doubly stochastic");
  if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > kStochasticTolerance)
    throw InvalidInput("WeightMatrix: weights must be symmetric");
  const double lam = spectral_gap(entries);
  return WeightMatrix(std::move(entries), lam);
}

WeightMatrix metropolis_weights(const Graph& g) {
  if (!g.is_connected()) throw InvalidInput("Assumption 3: graph disconnected");
  const auto n = static_cast<Eigen::Index>(g.n_nodes());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (auto [u, v] : g.edges()) {
    const double weight = 1.0 / (1.0 + static_cast<double>(std::max(g.degree(u), g.degree(v))));
    w(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = weight;
    w(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = weight;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return WeightMatrix::from_entries(std::move(w));
}

double spectral_gap(const Eigen::MatrixXd& w) {
  // Symmetrise against round-off; the solver reads only one triangle anyway.
  const Eigen::MatrixXd sym = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConstructionError("spectral_gap: eigensolve failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  const Eigen::Index n = ev.size();
  // Drop the Perron eigenvalue (the largest, equal to 1).
  const double second = std::abs(ev(n - 2));
  const double smallest = std::abs(ev(0));
  return n == 2 ? second : std::max(second, smallest);
}

MixingReport verify_mixing_bound(const WeightMatrix& w, int t_max, double slack) {
  if (t_max < 1) throw InvalidInput("verify_mixing_bound: t_max must be >= 1");
  MixingReport report;
  report.t_max = t_max;
  report.lambda_max = w.lambda_max();
  report.max_excess = -std::numeric_limits<double>::infinity();
  const auto n = w.entries().rows();
  const double uniform = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (int t = 1; t <= t_max; ++t) {
    power = power * w.entries();
    const double bound = std::pow(w.lambda_max(), t);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double excess = std::abs(power(i, j) - uniform) - bound;
        report.max_excess = std::max(report.max_excess, excess);
        if (excess > slack) ++report.violations;
      }
    }
  }
  return report;
}

}  // namespace nbl
