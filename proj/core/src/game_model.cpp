#include "nbl/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nbl {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

void check_agent(const GameSpec& spec, std::size_t i) {
  require(i < spec.n_agents, "agent index " + std::to_string(i) + " out of range");
}

void check_param(const GameSpec& spec, std::size_t k) {
  require(k < spec.n_params(), "parameter index " + std::to_string(k) + " out of range");
}

void check_profile(const GameSpec& spec, const StrategyProfile& x) {
  require(x.n_agents() == spec.n_agents && x.dim() == spec.dim,
          "strategy profile has the wrong shape");
  require(spec.contains(x, 1e-12), "strategy profile outside the strategy boxes");
}

double sum_of_strategies(const StrategyProfile& x) {
  double total = 0.0;
  for (double v : x.flat()) total += v;
  return total;
}

}  // namespace

void ParameterSet::validate() const {
  require(values.size() >= 2, "ParameterSet: need at least two parameter values");
  for (double v : values) require(std::isfinite(v), "ParameterSet: non-finite parameter value");
  for (std::size_t a = 0; a < values.size(); ++a)
    for (std::size_t b = a + 1; b < values.size(); ++b)
      require(values[a] != values[b], "ParameterSet: duplicate parameter values");
  require(true_index < values.size(), "ParameterSet: true_index out of range");
}

bool StrategyBox::contains(std::span<const double> x, double slack) const {
  if (x.size() != dim()) return false;
  for (std::size_t c = 0; c < x.size(); ++c) {
    if (!(x[c] >= lower[c] - slack && x[c] <= upper[c] + slack)) return false;
  }
  return true;
}

void StrategyBox::project(std::span<double> x) const {
  for (std::size_t c = 0; c < x.size(); ++c) x[c] = std::clamp(x[c], lower[c], upper[c]);
}

std::vector<double> StrategyBox::midpoint() const {
  std::vector<double> mid(dim());
  for (std::size_t c = 0; c < dim(); ++c) mid[c] = 0.5 * (lower[c] + upper[c]);
  return mid;
}

void StrategyBox::validate() const {
  require(!lower.empty() && lower.size() == upper.size(), "StrategyBox: bound length mismatch");
  for (std::size_t c = 0; c < dim(); ++c) {
    require(std::isfinite(lower[c]) && std::isfinite(upper[c]),
            "StrategyBox: bounds must be finite");
    require(lower[c] <= upper[c], "StrategyBox: lower bound exceeds upper bound");
  }
}

StrategyProfile::StrategyProfile(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
  require(dim_ > 0 && values_.size() % dim_ == 0, "StrategyProfile: length not a multiple of dim");
}

std::string to_string(CostKind kind) {
  switch (kind) {
    case CostKind::QuadraticTarget:
      return "quadratic_target";
    case CostKind::Cournot:
      return "cournot";
    case CostKind::Custom:
      return "custom";
  }
  return "unknown";
}

CostFamily CostFamily::quadratic_target(std::vector<std::vector<double>> offset,
                                        std::vector<std::vector<double>> slope) {
  CostFamily f;
  f.kind = CostKind::QuadraticTarget;
  f.offset = std::move(offset);
  f.slope = std::move(slope);
  return f;
}

CostFamily CostFamily::cournot(std::vector<double> marginal_cost) {
  CostFamily f;
  f.kind = CostKind::Cournot;
  f.marginal_cost = std::move(marginal_cost);
  return f;
}

CostFamily CostFamily::make_custom(CustomCost custom) {
  CostFamily f;
  f.kind = CostKind::Custom;
  f.custom = std::move(custom);
  return f;
}

std::vector<double> CostFamily::target(std::size_t i, double theta) const {
  std::vector<double> h(offset[i].size());
  for (std::size_t c = 0; c < h.size(); ++c) h[c] = offset[i][c] + slope[i][c] * theta;
  return h;
}

void NoiseModel::validate() const {
  require(std::isfinite(sigma) && sigma > 0.0, "NoiseModel: sigma must be positive");
  require(std::isfinite(clamp_L) && clamp_L > 0.0,
          "Assumption 1: clamp_L must be positive (bounded log-likelihood ratios)");
}

void GameSpec::validate() const {
  require(n_agents >= 2, "GameSpec: need at least two agents");
  require(dim >= 1, "GameSpec: strategy dimension must be positive");
  require(boxes.size() == n_agents, "GameSpec: one strategy box per agent required");
  for (const auto& box : boxes) {
    box.validate();
    require(box.dim() == dim, "GameSpec: box dimension differs from dim");
  }
  params.validate();
  noise.validate();
  switch (costs.kind) {
    case CostKind::QuadraticTarget:
      require(costs.offset.size() == n_agents && costs.slope.size() == n_agents,
              "QuadraticTarget: offset/slope need one row per agent");
      for (std::size_t i = 0; i < n_agents; ++i) {
        require(costs.offset[i].size() == dim && costs.slope[i].size() == dim,
                "QuadraticTarget: offset/slope rows must have length dim");
        for (std::size_t c = 0; c < dim; ++c)
          require(std::isfinite(costs.offset[i][c]) && std::isfinite(costs.slope[i][c]),
                  "QuadraticTarget: non-finite coefficient");
      }
      break;
    case CostKind::Cournot:
      require(dim == 1, "Cournot: strategies must be scalar (dim = 1)");
      require(costs.marginal_cost.size() == n_agents,
              "Cournot: one marginal cost per agent required");
      for (double c : costs.marginal_cost)
        require(std::isfinite(c), "Cournot: non-finite marginal cost");
      break;
    case CostKind::Custom:
      require(static_cast<bool>(costs.custom.cost) && static_cast<bool>(costs.custom.gradient),
              "Custom cost: cost and gradient callbacks are required");
      break;
  }
}

bool GameSpec::contains(const StrategyProfile& x, double slack) const {
  if (x.n_agents() != n_agents || x.dim() != dim) return false;
  for (std::size_t i = 0; i < n_agents; ++i)
    if (!boxes[i].contains(x.agent(i), slack)) return false;
  return true;
}

StrategyProfile GameSpec::midpoint_profile() const {
  StrategyProfile x(n_agents, dim);
  for (std::size_t i = 0; i < n_agents; ++i) {
    const auto mid = boxes[i].midpoint();
    std::copy(mid.begin(), mid.end(), x.agent(i).begin());
  }
  return x;
}

double cost_at(const GameSpec& spec, std::size_t i, const StrategyProfile& x, double theta) {
  const auto& f = spec.costs;
  switch (f.kind) {
    case CostKind::QuadraticTarget: {
      const auto xi = x.agent(i);
      double total = 0.0;
      for (std::size_t c = 0; c < xi.size(); ++c) {
        const double d = xi[c] - (f.offset[i][c] + f.slope[i][c] * theta);
        total += d * d;
      }
      return total;
    }
    case CostKind::Cournot: {
      const double xi = x.agent(i)[0];
      return f.marginal_cost[i] * xi - xi * theta + xi * sum_of_strategies(x);
    }
    case CostKind::Custom:
      return f.custom.cost(i, x, theta);
  }
  return 0.0;
}

void cost_gradient_at(const GameSpec& spec, std::size_t i, const StrategyProfile& x, double theta,
                      std::span<double> grad_i) {
  const auto& f = spec.costs;
  switch (f.kind) {
    case CostKind::QuadraticTarget: {
      const auto xi = x.agent(i);
      for (std::size_t c = 0; c < xi.size(); ++c)
        grad_i[c] = 2.0 * (xi[c] - (f.offset[i][c] + f.slope[i][c] * theta));
      return;
    }
    case CostKind::Cournot:
      // d/dx_i [x_i * sum_j x_j] = sum_j x_j + x_i
      grad_i[0] = f.marginal_cost[i] - theta + sum_of_strategies(x) + x.agent(i)[0];
      return;
    case CostKind::Custom:
      f.custom.gradient(i, x, theta, grad_i);
      return;
  }
}

double eval_cost(const GameSpec& spec, std::size_t i, const StrategyProfile& x, std::size_t k) {
  check_agent(spec, i);
  check_param(spec, k);
  check_profile(spec, x);
  return cost_at(spec, i, x, spec.params.values[k]);
}

double log_likelihood(const GameSpec& spec, std::size_t i, double y, const StrategyProfile& x,
                      std::size_t k) {
  const double sigma = spec.noise.sigma;
  const double z = (y - eval_cost(spec, i, x, k)) / sigma;
  return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sigma) - 0.5 * z * z;
}

double clamped_log_ratio(const GameSpec& spec, std::size_t i, double y, const StrategyProfile& x,
                         std::size_t k1, std::size_t k2) {
  if (k1 == k2) {
    check_param(spec, k1);
    return 0.0;
  }
  // Difference of exponents only: the normalising constants cancel exactly.
  const double sigma = spec.noise.sigma;
  const double r1 = (y - eval_cost(spec, i, x, k1)) / sigma;
  const double r2 = (y - eval_cost(spec, i, x, k2)) / sigma;
  const double ratio = -0.5 * r1 * r1 + 0.5 * r2 * r2;
  const double L = spec.noise.clamp_L;
  return std::clamp(ratio, -L, L);
}

double kl_local(const GameSpec& spec, std::size_t i, const StrategyProfile& x, std::size_t k1,
                std::size_t k2) {
  const double gap = eval_cost(spec, i, x, k1) - eval_cost(spec, i, x, k2);
  const double sigma = spec.noise.sigma;
  return gap * gap / (2.0 * sigma * sigma);
}

double network_divergence(const GameSpec& spec, const StrategyProfile& x, std::size_t k) {
  double total = 0.0;
  for (std::size_t j = 0; j < spec.n_agents; ++j)
    total += kl_local(spec, j, x, spec.params.true_index, k);
  return total / static_cast<double>(spec.n_agents);
}

bool IdentifiabilityReport::ok() const noexcept {
  return std::all_of(entries.begin(), entries.end(),
                     [](const Entry& e) { return e.identifiable; });
}

IdentifiabilityReport check_identifiability(const GameSpec& spec,
                                            std::span<const StrategyProfile> x_samples,
                                            double tolerance) {
  require(!x_samples.empty(), "check_identifiability: need at least one sample profile");
  IdentifiabilityReport report;
  const std::size_t star = spec.params.true_index;
  for (std::size_t k = 0; k < spec.n_params(); ++k) {
    if (k == star) continue;
    IdentifiabilityReport::Entry entry{k, true, -1};
    for (std::size_t s = 0; s < x_samples.size(); ++s) {
      bool separated = false;
      for (std::size_t j = 0; j < spec.n_agents && !separated; ++j)
        separated = kl_local(spec, j, x_samples[s], star, k) > tolerance;
      if (!separated) {
        entry.identifiable = false;
        entry.failing_sample = static_cast<std::ptrdiff_t>(s);
        break;
      }
    }
    report.entries.push_back(entry);
  }
  return report;
}

std::vector<StrategyProfile> probe_profiles(const GameSpec& spec, std::size_t n_random,
                                            std::uint64_t seed) {
  std::vector<StrategyProfile> samples;
  const std::size_t coords = spec.n_agents * spec.dim;
  if (coords <= 12) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << coords); ++mask) {
      StrategyProfile x(spec.n_agents, spec.dim);
      for (std::size_t q = 0; q < coords; ++q) {
        const auto& box = spec.boxes[q / spec.dim];
        const std::size_t c = q % spec.dim;
        x.flat()[q] = (mask >> q) & 1U ? box.upper[c] : box.lower[c];
      }
      samples.push_back(std::move(x));
    }
  }
  samples.push_back(spec.midpoint_profile());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < n_random; ++s) {
    StrategyProfile x(spec.n_agents, spec.dim);
    for (std::size_t q = 0; q < coords; ++q) {
      const auto& box = spec.boxes[q / spec.dim];
      const std::size_t c = q % spec.dim;
      x.flat()[q] = box.lower[c] + unit(rng) * (box.upper[c] - box.lower[c]);
    }
    samples.push_back(std::move(x));
  }
  return samples;
}

ConvexityReport probe_strict_convexity(const GameSpec& spec, std::size_t trials,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_param(0, spec.n_params() - 1);
  const auto& theta = spec.params.values;
  const double theta_lo = *std::min_element(theta.begin(), theta.end());
  const double theta_hi = *std::max_element(theta.begin(), theta.end());

  auto random_point = [&](const StrategyBox& box, std::span<double> out) {
    for (std::size_t c = 0; c < out.size(); ++c)
      out[c] = box.lower[c] + unit(rng) * (box.upper[c] - box.lower[c]);
  };

  ConvexityReport report;
  for (std::size_t i = 0; i < spec.n_agents; ++i) {
    const auto& box = spec.boxes[i];
    for (std::size_t trial = 0; trial < trials; ++trial) {
      ++report.trials;
      StrategyProfile x(spec.n_agents, spec.dim);
      for (std::size_t j = 0; j < spec.n_agents; ++j) random_point(spec.boxes[j], x.agent(j));
      // Half the draws use a member of Theta, half an interior point of its hull.
      const double th = trial % 2 == 0 ? theta[pick_param(rng)]
                                       : theta_lo + unit(rng) * (theta_hi - theta_lo);
      std::vector<double> a(spec.dim), b(spec.dim);
      random_point(box, a);
      random_point(box, b);

      auto value_at = [&](std::span<const double> xi) {
        std::copy(xi.begin(), xi.end(), x.agent(i).begin());
        return cost_at(spec, i, x, th);
      };
      std::vector<double> m(spec.dim);
      for (std::size_t c = 0; c < spec.dim; ++c) m[c] = 0.5 * (a[c] + b[c]);
      const double fa = value_at(a);
      const double fb = value_at(b);
      const double fm = value_at(m);
      const double scale = std::max({1.0, std::abs(fa), std::abs(fb), std::abs(fm)});
      const bool degenerate = std::equal(a.begin(), a.end(), b.begin());
      if (!degenerate && !(0.5 * (fa + fb) - fm > 1e-12 * scale)) {
        ++report.failures;
        if (report.first_failing_agent < 0)
          report.first_failing_agent = static_cast<std::ptrdiff_t>(i);
      }
    }
  }
  return report;
}

}  // namespace nbl
