#pragma once

// Game specs shared by the unit and acceptance suites.

#include <vector>

#include "nbl/game_model.hpp"

namespace nbl::testing {

inline std::vector<StrategyBox> uniform_boxes(std::size_t n, double lo, double hi,
                                              std::size_t dim = 1) {
  return std::vector<StrategyBox>(n, StrategyBox{std::vector<double>(dim, lo),
                                                 std::vector<double>(dim, hi)});
}

/// Cournot, c = 0, boxes [lo, hi].
inline GameSpec cournot_spec(std::size_t n, std::vector<double> theta, std::size_t true_index,
                             double sigma, double lo = 0.1, double hi = 1.0) {
  GameSpec spec;
  spec.n_agents = n;
  spec.dim = 1;
  spec.boxes = uniform_boxes(n, lo, hi);
  spec.costs = CostFamily::cournot(std::vector<double>(n, 0.0));
  spec.params = ParameterSet{std::move(theta), true_index};
  spec.noise = NoiseModel{sigma, 10.0};
  spec.validate();
  return spec;
}

/// The desk Cournot configuration: N=5, Theta={0.8,1.0,1.2}, theta*=1.0, sigma=0.5.
inline GameSpec desk_cournot() { return cournot_spec(5, {0.8, 1.0, 1.2}, 1, 0.5); }

/// QuadraticTarget with h_i(theta) = theta for every agent, boxes [lo, hi].
inline GameSpec quadratic_identity_spec(std::size_t n, std::vector<double> theta,
                                        std::size_t true_index, double sigma, double lo = 0.0,
                                        double hi = 1.0) {
  GameSpec spec;
  spec.n_agents = n;
  spec.dim = 1;
  spec.boxes = uniform_boxes(n, lo, hi);
  spec.costs = CostFamily::quadratic_target(std::vector<std::vector<double>>(n, {0.0}),
                                            std::vector<std::vector<double>>(n, {1.0}));
  spec.params = ParameterSet{std::move(theta), true_index};
  spec.noise = NoiseModel{sigma, 10.0};
  spec.validate();
  return spec;
}

inline StrategyProfile scalar_profile(std::vector<double> values) {
  return StrategyProfile(1, std::move(values));
}

}  // namespace nbl::testing
