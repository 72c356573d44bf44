// Command-line front door: subcommands map 1:1 onto library operations and
// emit CSV (or JSON-lines) for external plotting. Exit codes: 0 success,
// 2 config/validation error, 3 infeasible dimensioning, 4 runtime failure.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "keygraph/keygraph.hpp"

namespace {

using namespace keygraph;

struct CommonArgs {
  std::string config_path;
  std::optional<uint64_t> seed_override;
  std::optional<uint64_t> trials_override;
  std::optional<std::string> out_override;
  unsigned threads = 0;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "run configuration file")->required();
  sub->add_option("--seed", args.seed_override, "master seed (overrides config)");
  sub->add_option("--trials", args.trials_override, "trial count (overrides config)");
  sub->add_option("--out", args.out_override, "output path (overrides config)");
  sub->add_option("--threads", args.threads,
                  "worker threads; affects speed only, never results");
}

RunConfig load_config(const CommonArgs& args) {
  std::ifstream in(args.config_path);
  if (!in) throw config_error("cannot open config file: " + args.config_path);
  RunConfig config = parse_config(in);
  if (args.seed_override) config.master_seed = *args.seed_override;
  if (args.trials_override) config.trials = *args.trials_override;
  if (args.out_override) config.out_path = *args.out_override;
  if (!config.master_seed)
    throw config_error("master_seed must be set in [experiment] or via --seed");
  return config;
}

unsigned resolve_threads(const CommonArgs& args) {
  if (args.threads != 0) return args.threads;
  if (const char* env = std::getenv("KEYGRAPH_THREADS")) {
    const long v = std::atol(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 0;  // library default: hardware concurrency
}

// Output sink: file when a path is configured, stdout otherwise.
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output file: " + path);
      os = &file;
    }
  }
  std::ostream& out() { return *os; }
};

uint64_t require_n(const RunConfig& config) {
  if (!config.n) throw config_error("this command needs a fixed n in [experiment]");
  if (*config.n > 0xFFFFFFFFull) throw config_error("n exceeds the node-id envelope");
  return *config.n;
}

SchemeParams resolve_scheme(const RunConfig& config, uint64_t n) {
  if (config.scheme) return *config.scheme;
  return instantiate(*config.preset, n);
}

int cmd_probe(const CommonArgs& args) {
  const RunConfig config = load_config(args);
  const uint64_t n = require_n(config);
  const SchemeParams params = resolve_scheme(config, n);
  const std::size_t r = params.num_classes();

  Sink sink(config.out_path);
  std::ostream& os = sink.out();
  os << "# master_seed=" << *config.master_seed << '\n';
  os << "quantity,value\n";
  const EdgeProbMatrix p = edge_prob_matrix(params);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      os << "p_" << i + 1 << '_' << j + 1 << ',' << format_value(p(i, j)) << '\n';
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      os << "p_lower_" << i + 1 << '_' << j + 1 << ','
         << format_value(edge_prob_lower_bound(i, j, params)) << '\n';
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      os << "p_approx_" << i + 1 << '_' << j + 1 << ','
         << format_value(edge_prob_approx(i, j, params)) << '\n';
  const auto lambda = mean_edge_probs(params);
  for (std::size_t i = 0; i < r; ++i)
    os << "lambda_" << i + 1 << ',' << format_value(lambda[i]) << '\n';
  os << "ring_size_mean," << format_value(ring_size_mean(params.mix)) << '\n';
  os << "expected_isolated," << format_value(expected_isolated(n, params)) << '\n';
  os << "expected_class1_isolated," << format_value(expected_class1_isolated(n, params))
     << '\n';
  if (n >= 2) {
    os << "pair_class1_isolated," << format_value(pair_class1_isolated_prob(n, params))
       << '\n';
    os << "second_moment_ratio," << format_value(second_moment_ratio(n, params)) << '\n';
    os << "c_n," << format_value(achieved_c(n, params)) << '\n';
  }
  os << "popoviciu_bound," << format_value(popoviciu_bound(params)) << '\n';
  os << "equivalence_gap," << format_value(scaling_equivalence_gap(params)) << '\n';
  os << "saturated," << (edge_prob_saturated(params) ? 1 : 0) << '\n';
  return 0;
}

int cmd_dimension(const CommonArgs& args) {
  const RunConfig config = load_config(args);
  if (!config.preset) throw config_error("dimension requires a [preset] block");
  std::vector<uint64_t> grid = config.n_grid;
  if (grid.empty() && config.n) grid.push_back(*config.n);
  if (grid.empty()) throw config_error("dimension requires n or n_grid in [experiment]");

  const ConditionReport report =
      scaling_condition_report(*config.preset, grid, config.sigma_ref);
  Sink sink(config.out_path);
  sink.out() << "# master_seed=" << *config.master_seed << '\n' << report.csv();
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const RunConfig config = load_config(args);
  if (!config.preset) throw config_error("sweep requires a [preset] block");
  if (config.c_grid.empty()) throw config_error("sweep requires c_grid in [experiment]");
  std::vector<uint64_t> grid = config.n_grid;
  if (grid.empty() && config.n) grid.push_back(*config.n);
  if (grid.empty()) throw config_error("sweep requires n or n_grid in [experiment]");

  const auto start = std::chrono::steady_clock::now();
  const bool jsonl = config.format == "jsonl";
  const auto cells = sweep(*config.preset, config.c_grid, grid, config.trials,
                           *config.master_seed, resolve_threads(args), jsonl);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Sink sink(config.out_path);
  std::ostream& os = sink.out();
  os << "# master_seed=" << *config.master_seed << '\n';
  if (jsonl) {
    for (const auto& cell : cells)
      for (const auto& rec : cell.records)
        os << "{\"n\":" << cell.n << ",\"c_target\":" << format_value(cell.c_target)
           << ",\"trial\":" << rec.trial << ",\"isolated\":" << rec.isolated
           << ",\"class1_isolated\":" << rec.class1_isolated
           << ",\"connected\":" << (rec.connected ? "true" : "false")
           << ",\"components\":" << rec.component_count << ",\"no_iso_but_disconnected\":"
           << (rec.no_iso_but_disconnected ? "true" : "false") << "}\n";
  } else {
    os << "n,c_target,c_achieved,p_no_isolated,se_p_no_isolated,p_connected,"
          "se_p_connected,mean_isolated,se_mean_isolated,expected_isolated_exact,status\n";
    for (const auto& cell : cells)
      os << cell.n << ',' << format_value(cell.c_target) << ','
         << format_value(cell.c_achieved) << ',' << format_value(cell.p_no_isolated.mean)
         << ',' << format_value(cell.p_no_isolated.stderr_) << ','
         << format_value(cell.p_connected.mean) << ','
         << format_value(cell.p_connected.stderr_) << ','
         << format_value(cell.mean_isolated.mean) << ','
         << format_value(cell.mean_isolated.stderr_) << ','
         << format_value(cell.expected_isolated_exact) << ',' << cell.status << '\n';
  }
  os << "# master_seed=" << *config.master_seed << " wall_time_s=" << format_value(elapsed)
     << '\n';
  return 0;
}

int cmd_resilience(const CommonArgs& args) {
  const RunConfig config = load_config(args);
  const uint64_t n = require_n(config);
  const SchemeParams params = resolve_scheme(config, n);
  if (config.capture_sizes.empty())
    throw config_error("resilience requires capture sizes 's' in [experiment]");

  Sink sink(config.out_path);
  std::ostream& os = sink.out();
  os << "# master_seed=" << *config.master_seed << '\n';
  os << "s,pool_coverage,se_pool_coverage,pool_coverage_exact,compromised_links,"
        "se_compromised_links\n";
  for (uint64_t s : config.capture_sizes) {
    const auto est = capture_attack(params, static_cast<uint32_t>(n), s, config.trials,
                                    *config.master_seed, resolve_threads(args));
    os << s << ',' << format_value(est.pool_coverage.mean) << ','
       << format_value(est.pool_coverage.stderr_) << ','
       << format_value(expected_pool_coverage(s, params)) << ','
       << format_value(est.compromised_links.mean) << ','
       << format_value(est.compromised_links.stderr_) << '\n';
  }
  return 0;
}

int cmd_dump_graph(const CommonArgs& args) {
  const RunConfig config = load_config(args);
  const uint64_t n = require_n(config);
  const SchemeParams params = resolve_scheme(config, n);
  const SampledGraph g =
      build_graph(static_cast<uint32_t>(n), params, SeedSpec{*config.master_seed, 0});
  Sink sink(config.out_path);
  sink.out() << "# master_seed=" << *config.master_seed << '\n';
  write_graph_dump(g, sink.out());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inhomogeneous random key graph toolkit"};
  app.require_subcommand(1);

  CommonArgs probe_args, dim_args, sweep_args, res_args, dump_args;
  CLI::App* probe = app.add_subcommand("probe", "exact probabilities and expectations");
  add_common(probe, probe_args);
  CLI::App* dimension =
      app.add_subcommand("dimension", "minimum ring sizes for a target critical constant");
  add_common(dimension, dim_args);
  CLI::App* sweep = app.add_subcommand("sweep", "zero-one-law table over (n, c) grids");
  add_common(sweep, sweep_args);
  CLI::App* resilience =
      app.add_subcommand("resilience", "node-capture pool and link compromise estimates");
  add_common(resilience, res_args);
  CLI::App* dump = app.add_subcommand("dump-graph", "write one sampled graph as text");
  add_common(dump, dump_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (probe->parsed()) return cmd_probe(probe_args);
    if (dimension->parsed()) return cmd_dimension(dim_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (resilience->parsed()) return cmd_resilience(res_args);
    if (dump->parsed()) return cmd_dump_graph(dump_args);
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const infeasible_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 4;
}
