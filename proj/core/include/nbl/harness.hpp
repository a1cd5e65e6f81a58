#pragma once

// Configuration loading, replication orchestration and CSV emission.
//
// Config files are JSON documents with a `schema_version` field (currently 1).
// Unknown keys are rejected. Every modelling assumption that can be checked
// numerically is checked at load time, and the resulting error message names
// the assumption, e.g. "Assumption 4: gamma must lie in (0.5, 1] ...".

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nbl/dynamics.hpp"
#include "nbl/game_model.hpp"
#include "nbl/network.hpp"

namespace nbl {

inline constexpr int kSchemaVersion = 1;

struct GameConfig {
  CostKind family = CostKind::Cournot;
  std::size_t n_agents = 0;
  std::size_t dim = 1;
  std::vector<double> theta;
  std::size_t true_index = 0;
  double sigma = 1.0;
  double clamp_L = 10.0;
  std::vector<StrategyBox> boxes;  // expanded to one per agent
  std::vector<double> marginal_cost;
  std::vector<std::vector<double>> offset;
  std::vector<std::vector<double>> slope;
};

struct GraphConfig {
  std::string kind = "ring";  // ring | complete | erdos_renyi | edge_list
  double p = 1.0;
  std::uint64_t seed = 1;
  std::string path;  // edge_list only, relative to the config file
};

struct RunSection {
  std::uint64_t T = 1;
  std::vector<std::uint64_t> seeds{1};
  std::optional<std::vector<double>> x0;  // flat, n_agents * dim; nullopt = box midpoint
  std::uint64_t thin = 1;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  GameConfig game;
  GraphConfig graph;
  StepSchedule schedule;
  RunSection run;
  std::string output_directory = "out";
  std::filesystem::path base_dir;  // directory of the config file
};

/// Parses a config document without semantic validation. Throws ConfigError
/// with kind "parse", "missing" or "unknown_key".
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads, parses and fully validates a config file (see prepare()).
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON rendering: sorted keys, expanded boxes, full precision.
std::string canonical_config(const RunConfig& config);

/// Everything a run needs, built from a validated config.
struct Experiment {
  RunConfig config;
  GameSpec spec;
  Graph graph;
  WeightMatrix weights;
  StepSchedule schedule;
  StrategyProfile x0;
  /// Equilibrium under the point-mass belief at theta*.
  StrategyProfile reference_ne;
  std::vector<std::string> warnings;
};

/// Builds and validates every component; throws ConfigError("validation", ...)
/// naming the violated assumption.
Experiment prepare(const RunConfig& config);

/// load_config() followed by prepare(), returning the prepared experiment.
Experiment load_experiment(const std::filesystem::path& path);

GameSpec build_game(const GameConfig& game);
Graph build_graph(const GraphConfig& graph, std::size_t n_nodes,
                  const std::filesystem::path& base_dir);

/// 17 significant digits (%.17g); round-trips every double exactly.
std::string format_double(double value);

void write_trace_csv(std::ostream& out, const GameSpec& spec, std::span<const TraceRecord> trace);

struct MetricsRow {
  std::uint64_t seed = 0;
  std::size_t k = 0;
  double slope_estimate = 0.0;
  double z_target = 0.0;
  double rel_error = 0.0;
  std::int64_t envelope_t0 = -1;
  double terminal_dist_to_ne = 0.0;
  double terminal_consensus_error = 0.0;
};

/// One row per k != true_index; the slope is averaged over agents.
std::vector<MetricsRow> compute_metrics(const Experiment& experiment, std::uint64_t seed,
                                        std::span<const TraceRecord> trace);

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

/// "7", "1,4,9", "1..20" or a mix such as "1..3,10".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

std::string trace_file_name(std::uint64_t seed);

struct ReplicationOptions {
  std::filesystem::path out_dir;
  std::uint64_t thin = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Runs every seed (concurrently), writes trace_seed_<s>.csv per seed and
/// metrics.csv in seed order. Returns the metrics rows in seed order.
std::vector<MetricsRow> run_replications(const Experiment& experiment,
                                         std::span<const std::uint64_t> seeds,
                                         const ReplicationOptions& options);

}  // namespace nbl
