#include "nbl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nbl/metrics.hpp"
#include "nbl/oracle.hpp"

namespace nbl {

using nlohmann::json;

namespace {

// Reads the members of one JSON object and rejects any key that was not asked for.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError("parse", path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  const json& required(const std::string& key) {
    if (!has(key)) throw ConfigError("missing", "missing field " + qualified(key));
    return node_.at(key);
  }

  template <class T>
  T get(const std::string& key) {
    return convert<T>(required(key), key);
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? convert<T>(node_.at(key), key) : fallback;
  }

  Section sub(const std::string& key) { return Section(required(key), qualified(key)); }

  void finish() const {
    for (const auto& item : node_.items())
      if (!seen_.count(item.key()))
        throw ConfigError("unknown_key", "unknown key " + qualified(item.key()));
  }

  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  template <class T>
  T convert(const json& value, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t>) {
        if (!value.is_number_integer() || value.get<long long>() < 0)
          throw ConfigError("parse", qualified(key) + ": expected a nonnegative integer");
      }
      return value.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("parse", qualified(key) + ": " + e.what());
    }
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

CostKind parse_family(const std::string& name) {
  if (name == "cournot") return CostKind::Cournot;
  if (name == "quadratic_target") return CostKind::QuadraticTarget;
  throw ConfigError("parse", "game.family: expected \"cournot\" or \"quadratic_target\", got \"" +
                                 name + "\"");
}

StrategyBox parse_box(Section box) {
  StrategyBox b{box.get<std::vector<double>>("lower"), box.get<std::vector<double>>("upper")};
  box.finish();
  return b;
}

json box_json(const StrategyBox& box) { return json{{"lower", box.lower}, {"upper", box.upper}}; }

ConfigError validation_error(const std::string& message) {
  return ConfigError("validation", message);
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("parse", std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  cfg.base_dir = base_dir;
  Section root(doc, "");
  cfg.schema_version = root.get<int>("schema_version");
  if (cfg.schema_version != kSchemaVersion)
    throw ConfigError("parse", "unsupported schema_version " + std::to_string(cfg.schema_version));

  {
    Section g = root.sub("game");
    auto& game = cfg.game;
    game.family = parse_family(g.get<std::string>("family"));
    game.n_agents = g.get<std::size_t>("n_agents");
    game.dim = g.get_or<std::size_t>("dim", 1);
    game.theta = g.get<std::vector<double>>("theta");
    game.true_index = g.get<std::size_t>("true_index");
    game.sigma = g.get<double>("sigma");
    game.clamp_L = g.get_or<double>("clamp_L", 10.0);
    const bool single = g.has("box");
    const bool per_agent = g.has("boxes");
    if (single == per_agent)
      throw ConfigError("missing", "game: exactly one of \"box\" or \"boxes\" is required");
    if (single) {
      game.boxes.assign(game.n_agents, parse_box(g.sub("box")));
    } else {
      const json& list = g.required("boxes");
      if (!list.is_array()) throw ConfigError("parse", "game.boxes: expected an array");
      for (std::size_t i = 0; i < list.size(); ++i)
        game.boxes.push_back(parse_box(Section(list[i], "game.boxes[" + std::to_string(i) + "]")));
    }
    if (game.family == CostKind::Cournot) {
      game.marginal_cost = g.get<std::vector<double>>("marginal_cost");
    } else {
      game.offset = g.get<std::vector<std::vector<double>>>("offset");
      game.slope = g.get<std::vector<std::vector<double>>>("slope");
    }
    g.finish();
  }
  {
    Section gr = root.sub("graph");
    cfg.graph.kind = gr.get<std::string>("kind");
    if (cfg.graph.kind == "erdos_renyi") {
      cfg.graph.p = gr.get<double>("p");
      cfg.graph.seed = gr.get_or<std::uint64_t>("seed", 1);
    } else if (cfg.graph.kind == "edge_list") {
      cfg.graph.path = gr.get<std::string>("path");
    } else if (cfg.graph.kind != "ring" && cfg.graph.kind != "complete") {
      throw ConfigError("parse", "graph.kind: expected ring, complete, erdos_renyi or edge_list");
    }
    gr.finish();
  }
  {
    Section s = root.sub("schedule");
    cfg.schedule.alpha0 = s.get<double>("alpha0");
    cfg.schedule.gamma = s.get<double>("gamma");
    s.finish();
  }
  {
    Section r = root.sub("run");
    cfg.run.T = r.get<std::uint64_t>("T");
    cfg.run.seeds = r.get_or<std::vector<std::uint64_t>>("seeds", {1});
    cfg.run.thin = r.get_or<std::uint64_t>("thin", 1);
    if (r.has("x0")) {
      const json& x0 = r.required("x0");
      if (x0.is_string()) {
        if (x0.get<std::string>() != "midpoint")
          throw ConfigError("parse", "run.x0: expected \"midpoint\" or a list of numbers");
      } else {
        cfg.run.x0 = r.get<std::vector<double>>("x0");
      }
    }
    r.finish();
  }
  if (root.has("output")) {
    Section o = root.sub("output");
    cfg.output_directory = o.get_or<std::string>("directory", "out");
    o.finish();
  }
  root.finish();
  return cfg;
}

namespace {

RunConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("parse", "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg = read_config_file(path);
  prepare(cfg);
  return cfg;
}

Experiment load_experiment(const std::filesystem::path& path) {
  return prepare(read_config_file(path));
}

std::string canonical_config(const RunConfig& cfg) {
  json game{{"family", to_string(cfg.game.family)},
            {"n_agents", cfg.game.n_agents},
            {"dim", cfg.game.dim},
            {"theta", cfg.game.theta},
            {"true_index", cfg.game.true_index},
            {"sigma", cfg.game.sigma},
            {"clamp_L", cfg.game.clamp_L}};
  json boxes = json::array();
  for (const auto& b : cfg.game.boxes) boxes.push_back(box_json(b));
  game["boxes"] = boxes;
  if (cfg.game.family == CostKind::Cournot) {
    game["marginal_cost"] = cfg.game.marginal_cost;
  } else {
    game["offset"] = cfg.game.offset;
    game["slope"] = cfg.game.slope;
  }
  json graph{{"kind", cfg.graph.kind}};
  if (cfg.graph.kind == "erdos_renyi") {
    graph["p"] = cfg.graph.p;
    graph["seed"] = cfg.graph.seed;
  } else if (cfg.graph.kind == "edge_list") {
    graph["path"] = cfg.graph.path;
  }
  json run{{"T", cfg.run.T}, {"seeds", cfg.run.seeds}, {"thin", cfg.run.thin}};
  if (cfg.run.x0) {
    run["x0"] = *cfg.run.x0;
  } else {
    run["x0"] = "midpoint";
  }
  json doc{{"schema_version", cfg.schema_version},
           {"game", game},
           {"graph", graph},
           {"schedule", {{"alpha0", cfg.schedule.alpha0}, {"gamma", cfg.schedule.gamma}}},
           {"run", run},
           {"output", {{"directory", cfg.output_directory}}}};
  return doc.dump(2) + "\n";
}

GameSpec build_game(const GameConfig& game) {
  GameSpec spec;
  spec.n_agents = game.n_agents;
  spec.dim = game.dim;
  spec.boxes = game.boxes;
  spec.params = ParameterSet{game.theta, game.true_index};
  spec.noise = NoiseModel{game.sigma, game.clamp_L};
  spec.costs = game.family == CostKind::Cournot
                   ? CostFamily::cournot(game.marginal_cost)
                   : CostFamily::quadratic_target(game.offset, game.slope);
  spec.validate();
  return spec;
}

Graph build_graph(const GraphConfig& graph, std::size_t n_nodes,
                  const std::filesystem::path& base_dir) {
  if (graph.kind == "ring") return generate_graph(GraphKind::Ring, n_nodes, 1.0, graph.seed);
  if (graph.kind == "complete")
    return generate_graph(GraphKind::Complete, n_nodes, 1.0, graph.seed);
  if (graph.kind == "erdos_renyi")
    return generate_graph(GraphKind::ErdosRenyi, n_nodes, graph.p, graph.seed);
  std::filesystem::path path = graph.path;
  if (path.is_relative()) path = base_dir / path;
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open edge list " + path.string());
  Graph g = read_edge_list(in, n_nodes);
  if (g.n_nodes() != n_nodes)
    throw InvalidInput("edge list node count differs from game.n_agents");
  return g;
}

Experiment prepare(const RunConfig& config) {
  try {
    GameSpec spec = build_game(config.game);
    Graph graph = build_graph(config.graph, spec.n_agents, config.base_dir);
    if (!graph.is_connected()) throw InvalidInput("Assumption 3: graph disconnected");
    WeightMatrix weights = metropolis_weights(graph);
    if (!(weights.lambda_max() < 1.0))
      throw InvalidInput("Assumption 3: mixing rate lambda_max is not below 1");

    config.schedule.validate();
    if (config.run.T < 1) throw InvalidInput("run.T must be at least 1");
    if (config.run.thin < 1) throw InvalidInput("run.thin must be at least 1");
    if (config.run.seeds.empty()) throw InvalidInput("run.seeds must not be empty");

    const ConvexityReport convexity = probe_strict_convexity(spec, 100, 0x5eed);
    if (!convexity.ok())
      throw InvalidInput("Assumption 5: cost of agent " +
                         std::to_string(convexity.first_failing_agent) +
                         " is not strictly convex in its own strategy");
    const auto samples = probe_profiles(spec, 200, 0x1d);
    const IdentifiabilityReport ident = check_identifiability(spec, samples);
    for (const auto& e : ident.entries)
      if (!e.identifiable)
        throw InvalidInput("Assumption 2: parameter index " + std::to_string(e.k) +
                           " is not separated from the true parameter by any agent at some "
                           "strategy profile");

    StrategyProfile x0 = config.run.x0 ? StrategyProfile(spec.dim, *config.run.x0)
                                       : spec.midpoint_profile();
    if (!spec.contains(x0)) throw InvalidInput("run.x0 lies outside the strategy boxes");

    StrategyProfile reference = true_ne(spec);
    std::vector<std::string> warnings;
    const double rho = br_jacobian_spectral_radius(
        spec, point_mass_belief(spec.n_params(), spec.params.true_index), reference);
    if (rho > 1.0)
      warnings.push_back("Assumption 6: best-response Jacobian spectral radius " +
                         format_double(rho) +
                         " > 1 at the equilibrium; simultaneous best response is unstable");

    return Experiment{config,
                      std::move(spec),
                      std::move(graph),
                      std::move(weights),
                      config.schedule,
                      std::move(x0),
                      std::move(reference),
                      std::move(warnings)};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw validation_error(e.what());
  }
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

void write_trace_csv(std::ostream& out, const GameSpec& spec, std::span<const TraceRecord> trace) {
  out << "t,agent";
  for (std::size_t c = 1; c <= spec.dim; ++c) out << ",x_" << c;
  for (std::size_t k = 1; k <= spec.n_params(); ++k) out << ",mu_" << k;
  out << ",alpha,consensus_error,belief_truth,dist_to_ne\n";
  for (const auto& rec : trace) {
    for (std::size_t i = 0; i < spec.n_agents; ++i) {
      out << rec.t << ',' << i;
      for (double v : rec.profile.agent(i)) out << ',' << format_double(v);
      for (double p : rec.beliefs[i].probabilities()) out << ',' << format_double(p);
      out << ',' << format_double(rec.alpha) << ',' << format_double(rec.consensus_error) << ','
          << format_double(rec.belief_truth[i]) << ',' << format_double(rec.dist_to_ne) << '\n';
    }
  }
}

std::vector<MetricsRow> compute_metrics(const Experiment& experiment, std::uint64_t seed,
                                        std::span<const TraceRecord> trace) {
  const auto& spec = experiment.spec;
  const EnvelopeReport envelope =
      envelope_check(trace, spec, experiment.schedule, experiment.reference_ne);
  std::vector<MetricsRow> rows;
  const bool long_enough = partial_sum(experiment.schedule, trace.back().t - 1) >= 10.0;
  for (std::size_t k = 0; k < spec.n_params(); ++k) {
    if (k == spec.params.true_index) continue;
    MetricsRow row;
    row.seed = seed;
    row.k = k;
    row.z_target = network_divergence(spec, experiment.reference_ne, k);
    if (long_enough) {
      double slope = 0.0;
      for (std::size_t i = 0; i < spec.n_agents; ++i)
        slope += rate_check(trace, spec, experiment.schedule, experiment.reference_ne, i, k)
                     .slope_estimate;
      row.slope_estimate = slope / static_cast<double>(spec.n_agents);
      row.rel_error = row.z_target > 0.0
                          ? std::abs(row.slope_estimate - row.z_target) / row.z_target
                          : std::nan("");
    } else {
      row.slope_estimate = std::nan("");
      row.rel_error = std::nan("");
    }
    row.envelope_t0 = envelope.t0;
    row.terminal_dist_to_ne = trace.back().dist_to_ne;
    row.terminal_consensus_error = trace.back().consensus_error;
    rows.push_back(row);
  }
  return rows;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "seed,k,slope_estimate,z_target,rel_error,envelope_T0,terminal_dist_to_ne,"
         "terminal_consensus_error\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.k << ',' << format_double(r.slope_estimate) << ','
        << format_double(r.z_target) << ',' << format_double(r.rel_error) << ',' << r.envelope_t0
        << ',' << format_double(r.terminal_dist_to_ne) << ','
        << format_double(r.terminal_consensus_error) << '\n';
  }
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  auto parse_number = [](std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw InvalidInput("invalid seed \"" + std::string(s) + "\"");
    return v;
  };
  std::vector<std::uint64_t> seeds;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const std::uint64_t lo = parse_number(item.substr(0, dots));
      const std::uint64_t hi = parse_number(item.substr(dots + 2));
      if (hi < lo) throw InvalidInput("empty seed range \"" + std::string(item) + "\"");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(parse_number(item));
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (seeds.empty()) throw InvalidInput("no seeds given");
  return seeds;
}

std::string trace_file_name(std::uint64_t seed) {
  return "trace_seed_" + std::to_string(seed) + ".csv";
}

std::vector<MetricsRow> run_replications(const Experiment& experiment,
                                         std::span<const std::uint64_t> seeds,
                                         const ReplicationOptions& options) {
  std::filesystem::create_directories(options.out_dir);
  RunOptions run_options;
  run_options.x0 = experiment.x0;
  run_options.reference_ne = experiment.reference_ne;
  run_options.thin = options.thin;

  std::vector<std::vector<MetricsRow>> per_seed(seeds.size());
  std::vector<std::string> failures(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < seeds.size(); idx = next++) {
      try {
        const auto trace = run(experiment.spec, experiment.weights, experiment.schedule,
                               experiment.config.run.T, seeds[idx], run_options);
        std::ofstream out(options.out_dir / trace_file_name(seeds[idx]), std::ios::binary);
        write_trace_csv(out, experiment.spec, trace);
        if (!out) throw std::runtime_error("failed writing trace for seed " +
                                           std::to_string(seeds[idx]));
        per_seed[idx] = compute_metrics(experiment, seeds[idx], trace);
      } catch (const std::exception& e) {
        failures[idx] = e.what();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(seeds.size()));
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  pool.clear();  // joins

  for (const auto& f : failures)
    if (!f.empty()) throw std::runtime_error(f);

  // Seed order, independent of scheduling.
  std::vector<std::size_t> order(seeds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return seeds[a] < seeds[b]; });
  std::vector<MetricsRow> rows;
  for (std::size_t idx : order) rows.insert(rows.end(), per_seed[idx].begin(), per_seed[idx].end());

  std::ofstream metrics(options.out_dir / "metrics.csv", std::ios::binary);
  write_metrics_csv(metrics, rows);
  if (!metrics) throw std::runtime_error("failed writing metrics.csv");
  return rows;
}

}  // namespace nbl
