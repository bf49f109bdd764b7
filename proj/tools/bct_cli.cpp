// bct: command-line frontend for null exposure graphs, biclique
// decompositions, conditional randomization tests and power analysis.
//
// Exit codes: 0 success, 1 unexpected failure, 2 input error, 3 numeric error.
// Results go to stdout; warnings go to stderr.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bct/biclique.hpp"
#include "bct/crt.hpp"
#include "bct/csv.hpp"
#include "bct/decompose.hpp"
#include "bct/design.hpp"
#include "bct/error.hpp"
#include "bct/exec.hpp"
#include "bct/negraph.hpp"
#include "bct/power.hpp"
#include "bct/simlab.hpp"

namespace fs = std::filesystem;
using namespace bct;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw InputError("file not found: " + p.string());
}

fs::path graph_csv(const fs::path& dir) { return dir / "negraph.csv"; }
fs::path graph_json(const fs::path& dir) { return dir / "negraph.json"; }

NullExposureGraph load_graph(const fs::path& dir) {
  require_file(graph_csv(dir));
  require_file(graph_json(dir));
  return read_graph(graph_csv(dir), graph_json(dir));
}

void print_stats(const NullExposureGraph& g) {
  const auto s = graph_stats(g);
  nlohmann::ordered_json j;
  j["n_units"] = g.n_units();
  j["n_assignments"] = g.n_assignments();
  j["edges"] = s.edges;
  j["a_edges"] = s.a_edges;
  j["density"] = s.density;
  if (s.balance)
    j["balance"] = *s.balance;
  else
    j["balance"] = nullptr;
  std::cout << j.dump() << "\n";
}

/// Table-backed mapping from a CSV with one row per unit and one integer
/// exposure per assignment.
ExposureMapping read_exposure_table(const fs::path& path) {
  require_file(path);
  const auto rows = csv::read(path);
  if (rows.empty()) throw InputError(path.string() + ": empty exposure table");
  const std::size_t n = rows.size();
  const std::size_t m = rows.front().size();
  std::vector<Exposure> table(n * m);
  std::set<Exposure> alphabet;
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m) throw InputError(path.string() + ": ragged exposure table");
    for (std::size_t k = 0; k < m; ++k) {
      const auto e = static_cast<Exposure>(csv::to_int(rows[i][k]));
      table[k * n + i] = e;
      alphabet.insert(e);
    }
  }
  return ExposureMapping::table_backed(n, m, std::move(table), {alphabet.begin(), alphabet.end()});
}

std::vector<double> read_outcomes(const fs::path& path) {
  require_file(path);
  const auto rows = csv::read(path);
  std::vector<double> y;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    if (i == 0) {
      // Optional header row.
      try {
        y.push_back(csv::to_double(rows[i].front()));
      } catch (const InputError&) {
      }
      continue;
    }
    y.push_back(csv::to_double(rows[i].front()));
  }
  if (y.empty()) throw InputError(path.string() + ": no outcomes");
  return y;
}

void add_enum_options(CLI::App* cmd, EnumerationConfig& cfg) {
  cmd->add_option("--min-units", cfg.min_units, "Minimum |U| of an enumerated biclique");
  cmd->add_option("--min-assignments", cfg.min_assignments,
                  "Minimum |Z| of an enumerated biclique");
  cmd->add_option("--max-bicliques", cfg.max_bicliques, "Enumeration cap per round");
}

struct GraphArgs {
  fs::path out_dir = ".";
  std::string source = "files";
  fs::path assignments, layout, table;
  std::string mapping = "spatial";
  double radius = 0.0;
  std::size_t n = 300, m = 300;
  double p = 0.2, density = 0.8, balance = 0.1;
  std::uint64_t seed = 1;
  Exposure a = 1, b = 0;
};

int cmd_graph(const GraphArgs& args) {
  const ContrastHypothesis hyp{args.a, args.b};
  fs::create_directories(args.out_dir);
  NullExposureGraph g;
  if (args.source == "random") {
    g = generate_random_graph(args.n, args.m, args.density, args.balance, args.seed, hyp);
  } else {
    std::optional<AssignmentSet> design;
    std::optional<ExposureMapping> mapping;
    if (args.source == "spatial") {
      const auto clusters = scaled_mixture_clusters(args.n);
      auto layout = generate_spatial_layout(clusters, args.radius, derive_seed(args.seed, 4));
      design = generate_bernoulli_assignments(args.n, args.m, args.p, derive_seed(args.seed, 5));
      write_layout_csv(layout, args.out_dir / "layout.csv");
      write_assignments_csv(*design, args.out_dir / "assignments.csv");
      write_design_json({args.n, args.m, args.p, args.seed, args.radius},
                        args.out_dir / "design.json");
      mapping = ExposureMapping::spatial(std::move(layout));
    } else if (args.source == "files") {
      require_file(args.assignments);
      design = read_assignments_csv(args.assignments);
      if (args.mapping == "spatial") {
        require_file(args.layout);
        mapping = ExposureMapping::spatial(read_layout_csv(args.layout, args.radius));
      } else if (args.mapping == "none") {
        mapping = ExposureMapping::no_interference();
      } else if (args.mapping == "table") {
        mapping = read_exposure_table(args.table);
      } else {
        throw InputError("unknown mapping '" + args.mapping + "'");
      }
    } else {
      throw InputError("unknown graph source '" + args.source + "'");
    }
    g = build_graph(*design, *mapping, hyp);
  }
  write_graph(g, graph_csv(args.out_dir), graph_json(args.out_dir));
  print_stats(g);
  return 0;
}

int cmd_enumerate(const fs::path& graph_dir, const EnumerationConfig& cfg,
                  const std::optional<fs::path>& out) {
  const auto g = load_graph(graph_dir);
  const auto bicliques = enumerate_maximal(g, cfg);
  if (bicliques.size() == cfg.max_bicliques) warn("enumeration stopped at the cap");
  if (out) {
    write_bicliques_jsonl(bicliques, *out);
  } else {
    for (const auto& c : bicliques) std::cout << to_json_line(c) << "\n";
  }
  return 0;
}

int cmd_decompose(const fs::path& graph_dir, const std::string& rule_name,
                  const EnumerationConfig& cfg, const fs::path& out_dir) {
  const auto g = load_graph(graph_dir);
  const auto d = decompose(g, parse_scoring_rule(rule_name), cfg);
  if (!d.dropped.empty())
    warn(std::to_string(d.dropped.size()) +
         " assignment(s) admit no qualifying biclique and were dropped; tests at those "
         "assignments are declined");
  const auto summary = decomposition_summary(g, d);
  std::size_t degenerate = 0, affected = 0;
  for (const auto& c : d.bicliques) {
    const auto n = SignedAssignmentView::from_biclique(g, c).degenerate_count();
    degenerate += n;
    affected += n > 0;
  }
  if (degenerate > 0)
    warn(std::to_string(degenerate) + " degenerate column(s) in " + std::to_string(affected) +
         " biclique(s) were excluded from rho-hat");
  fs::create_directories(out_dir);
  write_decomposition_json(d, out_dir / "decomposition.json");
  const auto text = summary_csv(summary);
  csv::write_text(out_dir / "summary.csv", text);
  std::cout << text;
  return 0;
}

struct TestArgs {
  fs::path graph_dir, decomposition, outcomes, assignments;
  std::size_t z_obs = 0;
  double alpha = 0.05;
  std::size_t mc_samples = 0;
  std::uint64_t seed = 1;
  bool classical = false;
  std::optional<fs::path> out;
};

int cmd_test(const TestArgs& args) {
  const auto y = read_outcomes(args.outcomes);
  TestReport report;
  if (args.classical) {
    require_file(args.assignments);
    const auto design = read_assignments_csv(args.assignments);
    report = classical_randomization_test(design, y, args.z_obs, args.alpha);
  } else {
    const auto g = load_graph(args.graph_dir);
    require_file(args.decomposition);
    const auto d = read_decomposition_json(args.decomposition);
    if (d.n_assignments != g.n_assignments())
      throw InputError("decomposition does not match the graph");
    TestOptions opts;
    opts.alpha = args.alpha;
    opts.mc_samples = args.mc_samples;
    opts.seed = args.seed;
    report = biclique_test(g, d, args.z_obs, y, opts);
  }
  if (args.out) write_report_json(report, *args.out);
  std::cout << report_json(report) << "\n";
  return 0;
}

struct PowerArgs {
  std::optional<double> theta;
  std::optional<std::size_t> m;
  double alpha = 0.05;
  std::optional<fs::path> grid;
  std::size_t mc_reps = 0;
  std::uint64_t seed = 1;
};

int cmd_power(const PowerArgs& args) {
  struct Point {
    double theta;
    std::size_t m;
    double alpha;
  };
  std::vector<Point> points;
  if (args.grid) {
    require_file(*args.grid);
    const auto rows = csv::read(*args.grid);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (i == 0 && !r.empty() && r.front() == "theta") continue;
      if (r.size() < 2) throw InputError("grid rows need theta,m[,alpha]");
      points.push_back({csv::to_double(r[0]), static_cast<std::size_t>(csv::to_int(r[1])),
                        r.size() > 2 ? csv::to_double(r[2]) : args.alpha});
    }
  } else {
    if (!args.theta || !args.m) throw InputError("power needs --theta and --m, or --grid");
    points.push_back({*args.theta, *args.m, args.alpha});
  }

  const bool table = args.grid.has_value() || args.mc_reps > 0;
  if (table) std::cout << "theta,m,alpha,power_formula,mc_estimate,mc_se\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (rejection_budget(pt.m, pt.alpha) == 0)
      warn("m = " + std::to_string(pt.m) + " is too small for alpha = " + csv::format(pt.alpha) +
           "; no assignment can be rejected and the power is 0");
    const double value = power_formula(pt.theta, pt.m, pt.alpha);
    if (!table) {
      std::cout << csv::format(value) << "\n";
      continue;
    }
    std::string mc = "nan,nan";
    if (args.mc_reps > 0) {
      const auto est = mc_power_oracle(pt.theta, pt.m, pt.alpha, args.mc_reps,
                                       derive_seed(args.seed, i));
      mc = csv::format(est.estimate) + "," + csv::format(est.se);
    }
    std::cout << csv::format(pt.theta) << "," << pt.m << "," << csv::format(pt.alpha) << ","
              << csv::format(value) << "," << mc << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biclique conditional randomization tests and power analysis"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "Worker threads (default: all cores)")
      ->check(CLI::NonNegativeNumber);

  GraphArgs graph_args;
  auto* graph = app.add_subcommand("graph", "Build a null exposure graph");
  graph->add_option("--source", graph_args.source, "files, spatial (generate) or random")
      ->check(CLI::IsMember({"files", "spatial", "random"}));
  graph->add_option("--assignments", graph_args.assignments, "assignments.csv (source=files)");
  graph->add_option("--mapping", graph_args.mapping, "spatial, none or table")
      ->check(CLI::IsMember({"spatial", "none", "table"}));
  graph->add_option("--layout", graph_args.layout, "layout.csv for the spatial mapping");
  graph->add_option("--exposure-table", graph_args.table, "Exposure table for mapping=table");
  graph->add_option("--radius", graph_args.radius, "Interference radius");
  graph->add_option("--n-units", graph_args.n, "Units (generated sources)");
  graph->add_option("--n-assignments", graph_args.m, "Assignments (generated sources)");
  graph->add_option("-p,--p", graph_args.p, "Treatment probability (source=spatial)");
  graph->add_option("--density", graph_args.density, "Edge density (source=random)");
  graph->add_option("--balance", graph_args.balance, "Label-a fraction (source=random)");
  graph->add_option("--seed", graph_args.seed, "Seed for generated sources");
  graph->add_option("--exposure-a", graph_args.a, "Contrast exposure a");
  graph->add_option("--exposure-b", graph_args.b, "Contrast exposure b");
  graph->add_option("-o,--out-dir", graph_args.out_dir, "Output directory");

  fs::path enum_graph;
  EnumerationConfig enum_cfg;
  std::optional<fs::path> enum_out;
  auto* enumerate = app.add_subcommand("enumerate", "Enumerate maximal bicliques");
  enumerate->add_option("-g,--graph", enum_graph, "Directory with negraph.csv/json")->required();
  add_enum_options(enumerate, enum_cfg);
  enumerate->add_option("-o,--out", enum_out, "JSON-lines output (default stdout)");

  fs::path dec_graph, dec_out = ".";
  std::string dec_rule = "theta";
  EnumerationConfig dec_cfg{10, 10, 2000};
  auto* decomp = app.add_subcommand("decompose", "Greedy biclique decomposition");
  decomp->add_option("-g,--graph", dec_graph, "Directory with negraph.csv/json")->required();
  decomp->add_option("--rule", dec_rule, "edges or theta");
  add_enum_options(decomp, dec_cfg);
  decomp->add_option("-o,--out-dir", dec_out, "Output directory");

  TestArgs test_args;
  auto* test = app.add_subcommand("test", "Biclique (or classical) randomization test");
  test->add_option("-g,--graph", test_args.graph_dir, "Directory with negraph.csv/json");
  test->add_option("-d,--decomposition", test_args.decomposition, "decomposition.json");
  test->add_option("-y,--outcomes", test_args.outcomes, "Observed outcomes, one per row")
      ->required();
  test->add_option("--z-obs", test_args.z_obs, "Index of the observed assignment")->required();
  test->add_option("--alpha", test_args.alpha, "Significance level");
  test->add_option("--mc-samples", test_args.mc_samples, "Monte Carlo p-value samples (0 = exact)");
  test->add_option("--seed", test_args.seed, "Seed for Monte Carlo p-values");
  test->add_flag("--classical", test_args.classical, "Classical test over all units");
  test->add_option("--assignments", test_args.assignments, "assignments.csv for --classical");
  test->add_option("-o,--out", test_args.out, "Also write the report JSON here");

  PowerArgs power_args;
  auto* power = app.add_subcommand("power", "Closed-form average power");
  power->add_option("--theta", power_args.theta, "Theta");
  power->add_option("--m", power_args.m, "Number of assignments");
  power->add_option("--alpha", power_args.alpha, "Significance level");
  power->add_option("--grid", power_args.grid, "CSV of theta,m[,alpha] rows");
  power->add_option("--mc-reps", power_args.mc_reps, "Also run the Monte Carlo oracle");
  power->add_option("--seed", power_args.seed, "Seed for the Monte Carlo oracle");

  // Flags mirror config keys; flags override the file.
  std::optional<fs::path> sim_config;
  std::optional<std::string> sim_experiment;
  fs::path sim_out = "results";
  bool full_scale = false;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_alpha;
  std::optional<std::size_t> sim_reps, sim_n, sim_m, sim_graph_seeds, sim_min_units,
      sim_min_assignments, sim_max_bicliques;
  std::vector<std::size_t> sim_n_grid, sim_m_grid;
  std::vector<double> sim_p_grid, sim_tau_grid, sim_d_grid, sim_b_grid, sim_r_grid;
  std::vector<std::string> sim_distributions;
  bool sim_graph_only = false;
  auto* simulate = app.add_subcommand("simulate", "Run a seeded experiment");
  simulate->add_option("-c,--config", sim_config, "Experiment config JSON");
  simulate->add_option("--experiment", sim_experiment, "formula, decomposition, spatial, validity");
  simulate->add_flag("--full-scale", full_scale, "Start from full-scale defaults");
  simulate->add_option("-o,--out-dir", sim_out, "Output directory");
  simulate->add_option("--seed", sim_seed);
  simulate->add_option("--alpha", sim_alpha);
  simulate->add_option("--mc-replicates", sim_reps);
  simulate->add_option("--n-units", sim_n);
  simulate->add_option("--n-assignments", sim_m);
  simulate->add_option("--graph-seeds", sim_graph_seeds);
  simulate->add_option("--min-units", sim_min_units);
  simulate->add_option("--min-assignments", sim_min_assignments);
  simulate->add_option("--max-bicliques", sim_max_bicliques);
  simulate->add_option("--n-grid", sim_n_grid)->delimiter(',');
  simulate->add_option("--m-grid", sim_m_grid)->delimiter(',');
  simulate->add_option("--p-grid", sim_p_grid)->delimiter(',');
  simulate->add_option("--tau-grid", sim_tau_grid)->delimiter(',');
  simulate->add_option("--d-grid", sim_d_grid)->delimiter(',');
  simulate->add_option("--b-grid", sim_b_grid)->delimiter(',');
  simulate->add_option("--r-grid", sim_r_grid)->delimiter(',');
  simulate->add_option("--distributions", sim_distributions)->delimiter(',');
  auto* graph_only_flag = simulate->add_flag("--graph-only", sim_graph_only);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (workers > 0) set_worker_count(workers);

    if (*graph) return cmd_graph(graph_args);
    if (*enumerate) return cmd_enumerate(enum_graph, enum_cfg, enum_out);
    if (*decomp) return cmd_decompose(dec_graph, dec_rule, dec_cfg, dec_out);
    if (*test) return cmd_test(test_args);
    if (*power) return cmd_power(power_args);
    if (*simulate) {
      ExperimentConfig cfg;
      if (sim_config) {
        require_file(*sim_config);
        cfg = read_config(*sim_config);
      } else {
        if (!sim_experiment) throw InputError("simulate needs --config or --experiment");
        cfg = default_config(parse_experiment_kind(*sim_experiment));
      }
      if (sim_experiment && parse_experiment_kind(*sim_experiment) != cfg.experiment) {
        auto base = default_config(parse_experiment_kind(*sim_experiment));
        base.seed = cfg.seed;
        cfg = base;
      }
      if (full_scale) apply_full_scale(cfg);
      nlohmann::json o = nlohmann::json::object();
      if (sim_seed) o["seed"] = *sim_seed;
      if (sim_alpha) o["alpha"] = *sim_alpha;
      if (sim_reps) o["mc_replicates"] = *sim_reps;
      if (sim_n) o["n_units"] = *sim_n;
      if (sim_m) o["n_assignments"] = *sim_m;
      if (sim_graph_seeds) o["graph_seeds"] = *sim_graph_seeds;
      if (sim_min_units) o["min_units"] = *sim_min_units;
      if (sim_min_assignments) o["min_assignments"] = *sim_min_assignments;
      if (sim_max_bicliques) o["max_bicliques"] = *sim_max_bicliques;
      if (!sim_n_grid.empty()) o["n_grid"] = sim_n_grid;
      if (!sim_m_grid.empty()) o["m_grid"] = sim_m_grid;
      if (!sim_p_grid.empty()) o["p_grid"] = sim_p_grid;
      if (!sim_tau_grid.empty()) o["tau_grid"] = sim_tau_grid;
      if (!sim_d_grid.empty()) o["d_grid"] = sim_d_grid;
      if (!sim_b_grid.empty()) o["b_grid"] = sim_b_grid;
      if (!sim_r_grid.empty()) o["r_grid"] = sim_r_grid;
      if (!sim_distributions.empty()) o["distributions"] = sim_distributions;
      if (graph_only_flag->count() > 0) o["graph_only"] = sim_graph_only;
      apply_config_overrides(cfg, o.dump());
      for (const auto& p : run_experiment_to(cfg, sim_out)) std::cout << p.string() << "\n";
      return 0;
    }
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const UntestableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
