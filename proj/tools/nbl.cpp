// nbl: command-line front end.
//
//   nbl validate CONFIG             load + validate, print the canonical config
//   nbl check-graph CONFIG          build W, print lambda_max, verify the mixing bound
//   nbl oracle-ne CONFIG            equilibrium under a belief (default: point mass at theta*)
//   nbl run CONFIG                  simulate; trace CSV per seed + metrics.csv
//
// Failures print one line "error: <kind>: <message>" on stderr.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nbl/harness.hpp"
#include "nbl/metrics.hpp"
#include "nbl/oracle.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kConfig = 3, kRuntime = 4, kCheckFailed = 5 };

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << "error: " << kind << ": " << message << '\n';
  return code;
}

std::vector<double> parse_csv_numbers(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw nbl::InvalidInput("not a number: \"" + item + "\"");
    values.push_back(v);
  }
  return values;
}

void print_warnings(const nbl::Experiment& exp, bool quiet) {
  if (quiet) return;
  for (const auto& w : exp.warnings) std::cerr << "warning: " << w << '\n';
}

void print_profile(const nbl::StrategyProfile& x) {
  for (std::size_t i = 0; i < x.n_agents(); ++i) {
    std::cout << "x_" << i << " =";
    for (double v : x.agent(i)) std::cout << ' ' << nbl::format_double(v);
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed non-Bayesian learning in games with an unknown parameter"};
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;

  auto* validate = app.add_subcommand("validate", "Load and validate a config file");
  validate->add_option("config", config_path, "Config file")->required();
  validate->add_flag("--quiet", quiet, "Do not echo the canonical config");

  int t_max = 50;
  auto* check_graph = app.add_subcommand("check-graph", "Build W and verify its mixing bound");
  check_graph->add_option("config", config_path, "Config file")->required();
  check_graph->add_option("--t-max", t_max, "Largest power of W to check")->check(CLI::PositiveNumber);
  check_graph->add_flag("--quiet", quiet, "Only report failures");

  std::string belief_text;
  auto* oracle = app.add_subcommand("oracle-ne", "Print the Nash equilibrium under a belief");
  oracle->add_option("config", config_path, "Config file")->required();
  oracle->add_option("--belief", belief_text,
                     "Comma-separated probabilities over theta (default: point mass at theta*)");
  oracle->add_flag("--quiet", quiet, "Suppress warnings");

  std::string seeds_text;
  std::string out_dir;
  std::uint64_t thin = 0;
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "Simulate and write trace/metrics CSV files");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--seeds", seeds_text, "Seeds, e.g. 7 or 1..20 or 1,3,5");
  run->add_option("--out", out_dir, "Output directory (overrides output.directory)");
  run->add_option("--thin", thin, "Keep every n-th trace step (overrides run.thin)");
  run->add_option("--threads", threads, "Worker threads (default: hardware concurrency)");
  run->add_flag("--quiet", quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kUsage);
  }

  nbl::Experiment experiment = [&]() -> nbl::Experiment {
    try {
      return nbl::load_experiment(config_path);
    } catch (const nbl::ConfigError& e) {
      std::exit(fail("config." + e.kind(), e.what(), kConfig));
    }
  }();

  try {
    if (*validate) {
      print_warnings(experiment, quiet);
      if (!quiet) std::cout << nbl::canonical_config(experiment.config);
      return kOk;
    }

    if (*check_graph) {
      const auto report = nbl::verify_mixing_bound(experiment.weights, t_max);
      if (!quiet) {
        std::cout << "nodes " << experiment.graph.n_nodes() << ", edges "
                  << experiment.graph.edges().size() << '\n';
        std::cout << "lambda_max " << nbl::format_double(report.lambda_max) << '\n';
      }
      if (!report.ok())
        return fail("check", "mixing bound violated " + std::to_string(report.violations) +
                                 " times, max excess " + nbl::format_double(report.max_excess),
                    kCheckFailed);
      if (!quiet) std::cout << "mixing bound OK, t <= " << t_max << '\n';
      return kOk;
    }

    if (*oracle) {
      print_warnings(experiment, quiet);
      const auto& spec = experiment.spec;
      const nbl::BeliefVector belief =
          belief_text.empty()
              ? nbl::point_mass_belief(spec.n_params(), spec.params.true_index)
              : nbl::BeliefVector::from_probabilities(parse_csv_numbers(belief_text));
      if (belief.size() != spec.n_params())
        return fail("usage", "--belief needs one probability per parameter value", kUsage);
      const nbl::StrategyProfile closed = nbl::closed_form_ne(spec, belief);
      const nbl::BeliefVector common[] = {belief};
      nbl::NeOptions opts;
      const nbl::NeResult fixed = nbl::ne_fixed_point(spec, common, opts);
      std::cout << "closed_form_ne\n";
      print_profile(closed);
      std::cout << "fixed_point converged " << (fixed.converged ? "yes" : "no") << " iterations "
                << fixed.iterations << " residual " << nbl::format_double(fixed.residual) << '\n';
      if (fixed.converged)
        std::cout << "fixed_point distance " << nbl::format_double(nbl::dist_to_ne(fixed.profile, closed))
                  << '\n';
      std::cout << "br_jacobian_spectral_radius "
                << nbl::format_double(nbl::br_jacobian_spectral_radius(spec, belief, closed))
                << '\n';
      return kOk;
    }

    // run
    print_warnings(experiment, quiet);
    const auto seeds = seeds_text.empty() ? experiment.config.run.seeds
                                          : nbl::parse_seed_list(seeds_text);
    nbl::ReplicationOptions opts;
    opts.out_dir = out_dir.empty() ? std::filesystem::path(experiment.config.output_directory)
                                   : std::filesystem::path(out_dir);
    opts.thin = thin ? thin : experiment.config.run.thin;
    opts.threads = threads;
    const auto rows = nbl::run_replications(experiment, seeds, opts);
    if (!quiet) {
      std::cout << "wrote " << seeds.size() << " trace file(s) and metrics.csv to "
                << opts.out_dir.string() << '\n';
      for (const auto& r : rows)
        std::cout << "seed " << r.seed << " k " << r.k << " slope "
                  << nbl::format_double(r.slope_estimate) << " Z " << nbl::format_double(r.z_target)
                  << " dist_to_ne " << nbl::format_double(r.terminal_dist_to_ne) << '\n';
    }
    return kOk;
  } catch (const nbl::InvalidInput& e) {
    return fail("input", e.what(), kUsage);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), kRuntime);
  }
}
