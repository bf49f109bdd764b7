#include "bct/simlab.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "json.hpp"

#include "bct/crt.hpp"
#include "bct/csv.hpp"
#include "bct/decompose.hpp"
#include "bct/design.hpp"
#include "bct/error.hpp"
#include "bct/negraph.hpp"
#include "bct/power.hpp"
#include "bct/rng.hpp"

namespace bct {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

BaseDistribution parse_distribution(const std::string& name) {
  if (name == "normal") return BaseDistribution::Normal;
  if (name == "exponential") return BaseDistribution::Exponential;
  throw InputError("unknown base distribution '" + name + "'");
}

void require_nonempty(bool empty, const char* key) {
  if (empty) throw InputError(std::string("config grid '") + key + "' must be nonempty");
}

void require_unit_interval(const std::vector<double>& xs, const char* key, bool open) {
  for (double x : xs) {
    const bool ok = open ? (x > 0.0 && x < 1.0) : (x >= 0.0 && x <= 1.0);
    if (!ok) throw InputError(std::string("config value in '") + key + "' is out of range");
  }
}

std::string fmt(double x) { return csv::format(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

template <class Row, class Fn>
std::string render(const std::vector<Row>& rows, const char* header, Fn&& fields) {
  std::string out = header;
  out += '\n';
  for (const auto& r : rows) {
    const auto cells = fields(r);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }
  return out;
}

double rate_se(std::size_t hits, std::size_t n) {
  if (n == 0) return kNaN;
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

DecompositionRunRow run_row(const NullExposureGraph& g, const BicliqueDecomposition& d,
                            const std::vector<SummaryRow>& summary) {
  const auto stats = graph_stats(g);
  DecompositionRunRow r;
  r.density = stats.density;
  r.balance = stats.balance.value_or(kNaN);
  r.bicliques = d.bicliques.size();
  r.dropped = d.dropped.size();
  r.partition_ok = is_partition(d);
  std::vector<double> thetas;
  for (const auto& s : summary) thetas.push_back(s.theta_zero);
  r.mean_theta_zero =
      thetas.empty() ? kNaN : pairwise_sum(thetas) / static_cast<double>(thetas.size());
  return r;
}

std::vector<std::string> run_fields(const DecompositionRunRow& r) {
  return {fmt(r.d),         fmt(r.b),         fmt(r.graph),
          r.rule,           fmt(r.density),   fmt(r.balance),
          fmt(r.bicliques), fmt(r.dropped),   r.partition_ok ? "1" : "0",
          fmt(r.mean_theta_zero)};
}

constexpr std::array<ScoringRule, 2> kRules{ScoringRule::EdgeCount, ScoringRule::ThetaZero};

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::FormulaValidation: return "formula";
    case ExperimentKind::DecompositionComparison: return "decomposition";
    case ExperimentKind::SpatialPower: return "spatial";
    case ExperimentKind::Validity: return "validity";
  }
  return "formula";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "formula") return ExperimentKind::FormulaValidation;
  if (name == "decomposition") return ExperimentKind::DecompositionComparison;
  if (name == "spatial") return ExperimentKind::SpatialPower;
  if (name == "validity") return ExperimentKind::Validity;
  throw InputError("unknown experiment '" + name +
                   "' (expected formula, decomposition, spatial or validity)");
}

void ExperimentConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (mc_replicates < 1) throw InputError("mc_replicates must be at least 1");
  require_nonempty(tau_grid.empty(), "tau_grid");
  for (double t : tau_grid)
    if (!std::isfinite(t)) throw InputError("tau values must be finite");
  enumeration.validate();
  switch (experiment) {
    case ExperimentKind::FormulaValidation:
    case ExperimentKind::Validity:
      require_nonempty(n_grid.empty(), "n_grid");
      require_nonempty(m_grid.empty(), "m_grid");
      require_nonempty(p_grid.empty(), "p_grid");
      require_unit_interval(p_grid, "p_grid", true);
      for (auto n : n_grid)
        if (n < 2) throw InputError("n_grid values must be at least 2");
      for (auto m : m_grid)
        if (m < 2) throw InputError("m_grid values must be at least 2");
      if (experiment == ExperimentKind::FormulaValidation) {
        require_nonempty(distributions.empty(), "distributions");
        for (const auto& d : distributions) parse_distribution(d);
      }
      break;
    case ExperimentKind::DecompositionComparison:
      require_nonempty(d_grid.empty(), "d_grid");
      require_nonempty(b_grid.empty(), "b_grid");
      require_unit_interval(d_grid, "d_grid", false);
      require_unit_interval(b_grid, "b_grid", false);
      if (n_units == 0 || n_assignments == 0) throw InputError("graph size must be positive");
      if (graph_seeds < 1) throw InputError("graph_seeds must be at least 1");
      break;
    case ExperimentKind::SpatialPower:
      require_nonempty(p_grid.empty(), "p_grid");
      require_nonempty(r_grid.empty(), "r_grid");
      require_unit_interval(p_grid, "p_grid", true);
      for (double r : r_grid)
        if (!(r > 0.0)) throw InputError("r_grid values must be positive");
      if (n_units < 2 || n_assignments < 1) throw InputError("graph size too small");
      if (graph_seeds < 1) throw InputError("graph_seeds must be at least 1");
      break;
  }
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::FormulaValidation:
      for (std::size_t n = 20; n <= 300; n += 20) c.n_grid.push_back(n);
      c.m_grid = {20, 60, 100};
      c.p_grid = {0.2, 0.5};
      c.distributions = {"normal", "exponential"};
      c.tau_grid = {0.5};
      c.mc_replicates = 100;
      break;
    case ExperimentKind::DecompositionComparison:
      c.d_grid = {0.8, 0.9};
      c.b_grid = {0.01, 0.1, 0.5};
      c.tau_grid = {0.0};
      break;
    case ExperimentKind::SpatialPower:
      c.p_grid = {0.1, 0.2};
      c.r_grid = {0.005, 0.01, 0.05};
      c.tau_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
      c.mc_replicates = 50;
      break;
    case ExperimentKind::Validity:
      c.n_grid = {100};
      c.m_grid = {100};
      c.p_grid = {0.5};
      c.tau_grid = {0.0};
      c.mc_replicates = 2000;
      break;
  }
  return c;
}

void apply_full_scale(ExperimentConfig& c) {
  c.n_units = 1000;
  c.n_assignments = 1000;
  c.enumeration = {20, 20, 10000};
  c.mc_replicates = 100;
}

namespace {

void apply_keys(ExperimentConfig& c, const nlohmann::json& j) {
  for (const auto& [key, v] : j.items()) {
    if (key == "experiment" || key == "scale") continue;
    if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "alpha") c.alpha = v.get<double>();
    else if (key == "n_grid") c.n_grid = v.get<std::vector<std::size_t>>();
    else if (key == "m_grid") c.m_grid = v.get<std::vector<std::size_t>>();
    else if (key == "p_grid") c.p_grid = v.get<std::vector<double>>();
    else if (key == "distributions") c.distributions = v.get<std::vector<std::string>>();
    else if (key == "tau_grid") c.tau_grid = v.get<std::vector<double>>();
    else if (key == "mc_replicates") c.mc_replicates = v.get<std::size_t>();
    else if (key == "n_units") c.n_units = v.get<std::size_t>();
    else if (key == "n_assignments") c.n_assignments = v.get<std::size_t>();
    else if (key == "d_grid") c.d_grid = v.get<std::vector<double>>();
    else if (key == "b_grid") c.b_grid = v.get<std::vector<double>>();
    else if (key == "r_grid") c.r_grid = v.get<std::vector<double>>();
    else if (key == "graph_seeds") c.graph_seeds = v.get<std::size_t>();
    else if (key == "graph_only") c.graph_only = v.get<bool>();
    else if (key == "min_units") c.enumeration.min_units = v.get<std::size_t>();
    else if (key == "min_assignments") c.enumeration.min_assignments = v.get<std::size_t>();
    else if (key == "max_bicliques") c.enumeration.max_bicliques = v.get<std::size_t>();
    else throw InputError("unknown config key '" + key + "'");
  }
}

nlohmann::json parse_object(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  return j;
}

}  // namespace

void apply_config_overrides(ExperimentConfig& cfg, const std::string& json_object) {
  const auto j = parse_object(json_object);
  try {
    apply_keys(cfg, j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
  cfg.validate();
}

ExperimentConfig config_from_json(const std::string& text) {
  const auto j = parse_object(text);
  if (!j.contains("experiment")) throw InputError("config needs an 'experiment' key");
  try {
    ExperimentConfig c =
        default_config(parse_experiment_kind(j.at("experiment").get<std::string>()));
    if (j.contains("scale")) {
      const auto scale = j.at("scale").get<std::string>();
      if (scale == "full")
        apply_full_scale(c);
      else if (scale != "desk")
        throw InputError("scale must be 'desk' or 'full'");
    }
    apply_keys(c, j);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
}

ExperimentConfig read_config(const std::filesystem::path& path) {
  return config_from_json(csv::read_text(path));
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(c.experiment);
  j["seed"] = c.seed;
  j["alpha"] = c.alpha;
  j["n_grid"] = c.n_grid;
  j["m_grid"] = c.m_grid;
  j["p_grid"] = c.p_grid;
  j["distributions"] = c.distributions;
  j["tau_grid"] = c.tau_grid;
  j["mc_replicates"] = c.mc_replicates;
  j["n_units"] = c.n_units;
  j["n_assignments"] = c.n_assignments;
  j["d_grid"] = c.d_grid;
  j["b_grid"] = c.b_grid;
  j["r_grid"] = c.r_grid;
  j["graph_seeds"] = c.graph_seeds;
  j["graph_only"] = c.graph_only;
  j["min_units"] = c.enumeration.min_units;
  j["min_assignments"] = c.enumeration.min_assignments;
  j["max_bicliques"] = c.enumeration.max_bicliques;
  return j.dump();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return Rng(seed).stream(a).stream(b)();
}

std::vector<FormulaRow> run_formula_validation(const ExperimentConfig& cfg, Exec exec) {
  cfg.validate();
  std::vector<FormulaRow> rows;
  std::uint64_t cell = 0;
  for (auto n : cfg.n_grid) {
    for (auto m : cfg.m_grid) {
      for (double p : cfg.p_grid) {
        const std::uint64_t design_seed = derive_seed(cfg.seed, 1, cell);
        const auto design = generate_bernoulli_assignments(n, m, p, design_seed);
        const auto view = SignedAssignmentView::from_design(design);
        const auto est = estimate_p_rho(view);
        for (std::size_t di = 0; di < cfg.distributions.size(); ++di) {
          OutcomeModel model;
          model.base_dist = parse_distribution(cfg.distributions[di]);
          const double sigma =
              model.base_dist == BaseDistribution::Normal ? model.base_sd : 1.0 / model.exp_rate;
          // Outcome draws are shared across the tau grid.
          const std::uint64_t outcome_seed = derive_seed(cfg.seed, 2, cell * 16 + di);
          for (double tau : cfg.tau_grid) {
            model.tau = tau;
            FormulaRow r;
            r.n_units = n;
            r.m = m;
            r.p = p;
            r.distribution = cfg.distributions[di];
            r.tau = tau;
            r.design_seed = design_seed;
            r.p_hat = est.p_hat;
            r.rho_hat = est.rho_hat;
            r.theta_hat = tau / sigma *
                          std::sqrt(static_cast<double>(n) * est.p_hat * (1.0 - est.p_hat) *
                                    (1.0 - est.rho_hat));
            r.formula = power_formula(r.theta_hat, m, cfg.alpha);
            const auto emp = empirical_average_power(view, model, cfg.alpha, cfg.mc_replicates,
                                                     outcome_seed, exec);
            r.empirical = emp.estimate;
            r.se = emp.se;
            rows.push_back(std::move(r));
          }
        }
        ++cell;
      }
    }
  }
  return rows;
}

DecompositionComparison run_decomposition_comparison(const ExperimentConfig& cfg, Exec exec) {
  cfg.validate();
  DecompositionComparison out;
  for (std::size_t di = 0; di < cfg.d_grid.size(); ++di) {
    for (std::size_t bi = 0; bi < cfg.b_grid.size(); ++bi) {
      for (std::size_t gi = 0; gi < cfg.graph_seeds; ++gi) {
        const double d = cfg.d_grid[di];
        const double b = cfg.b_grid[bi];
        const auto g = generate_random_graph(cfg.n_units, cfg.n_assignments, d, b,
                                             derive_seed(cfg.seed, 3, (di * 64 + bi) * 4096 + gi));
        for (auto rule : kRules) {
          const auto dec = decompose(g, rule, cfg.enumeration, exec);
          const auto summary = decomposition_summary(g, dec);
          for (std::size_t i = 0; i < summary.size(); ++i) {
            const auto& s = summary[i];
            out.bicliques.push_back({d, b, gi, to_string(rule), i, s.units, s.assignments,
                                     s.edges, s.p_hat, s.rho_hat, s.theta_zero});
          }
          auto run = run_row(g, dec, summary);
          run.d = d;
          run.b = b;
          run.graph = gi;
          run.rule = to_string(rule);
          out.runs.push_back(std::move(run));
        }
      }
    }
  }
  return out;
}

SpatialPowerResult run_spatial_power(const ExperimentConfig& cfg, Exec exec) {
  cfg.validate();
  SpatialPowerResult out;
  const ContrastHypothesis hyp{1, 0};
  const auto clusters = scaled_mixture_clusters(cfg.n_units);

  for (std::size_t pi = 0; pi < cfg.p_grid.size(); ++pi) {
    const double p = cfg.p_grid[pi];
    for (std::size_t ri = 0; ri < cfg.r_grid.size(); ++ri) {
      const double radius = cfg.r_grid[ri];
      for (std::size_t gi = 0; gi < cfg.graph_seeds; ++gi) {
        // The layout depends only on gi and the assignments on (p, gi), so
        // cells that differ only in r share both.
        const auto layout = generate_spatial_layout(clusters, radius, derive_seed(cfg.seed, 4, gi));
        const auto design = generate_bernoulli_assignments(
            cfg.n_units, cfg.n_assignments, p, derive_seed(cfg.seed, 5, pi * 4096 + gi));
        const auto mapping = ExposureMapping::spatial(layout);
        const auto g = build_graph(design, mapping, hyp, exec);
        const auto stats = graph_stats(g);

        std::size_t treated = 0;
        for (std::size_t k = 0; k < design.size(); ++k) treated += design.treated_count(k);
        GraphRow gr;
        gr.p = p;
        gr.r = radius;
        gr.graph = gi;
        gr.mean_treated = static_cast<double>(treated) /
                          (static_cast<double>(cfg.n_units) * static_cast<double>(design.size()));
        gr.density = stats.density;
        gr.balance = stats.balance.value_or(kNaN);
        gr.edges = stats.edges;
        gr.a_edges = stats.a_edges;
        out.graphs.push_back(gr);
        if (cfg.graph_only) continue;

        std::vector<BicliqueDecomposition> decs;
        for (auto rule : kRules) {
          decs.push_back(decompose(g, rule, cfg.enumeration, exec));
          auto run = run_row(g, decs.back(), decomposition_summary(g, decs.back()));
          run.d = p;
          run.b = radius;
          run.graph = gi;
          run.rule = to_string(rule);
          out.decompositions.push_back(std::move(run));
        }

        const std::uint64_t cell = (pi * 64 + ri) * 4096 + gi;
        const Rng root(derive_seed(cfg.seed, 6, cell));
        for (double tau : cfg.tau_grid) {
          // outcome[rep * 2 + rule]: 0 untestable, 1 accepted, 2 rejected.
          std::vector<std::uint8_t> outcome(cfg.mc_replicates * kRules.size(), 0);
          for_each_index(cfg.mc_replicates, exec, [&](std::size_t rep) {
            // Same stream for every tau: common random numbers along the curve.
            Rng rng = root.stream(rep);
            OutcomeModel model;
            auto y = draw_base_outcomes(model, cfg.n_units, rng);
            const auto k = static_cast<std::size_t>(rng.below(design.size()));
            const auto exposures = mapping.exposures(design, k);
            for (std::size_t i = 0; i < y.size(); ++i)
              if (exposures[i] == hyp.exposure_a) y[i] += tau;
            TestOptions opts;
            opts.alpha = cfg.alpha;
            opts.exec = Exec::Serial;
            for (std::size_t ru = 0; ru < kRules.size(); ++ru) {
              if (!decs[ru].owner[k]) continue;
              const auto rep_report = biclique_test(g, decs[ru], k, y, opts);
              outcome[rep * kRules.size() + ru] = rep_report.reject ? 2 : 1;
            }
          });
          for (std::size_t ru = 0; ru < kRules.size(); ++ru) {
            PowerRow pr;
            pr.p = p;
            pr.r = radius;
            pr.graph = gi;
            pr.tau = tau;
            pr.rule = to_string(kRules[ru]);
            pr.replicates = cfg.mc_replicates;
            for (std::size_t rep = 0; rep < cfg.mc_replicates; ++rep) {
              const auto o = outcome[rep * kRules.size() + ru];
              pr.testable += o != 0;
              pr.rejections += o == 2;
            }
            pr.power = pr.testable ? static_cast<double>(pr.rejections) /
                                         static_cast<double>(pr.testable)
                                   : kNaN;
            pr.se = rate_se(pr.rejections, pr.testable);
            pr.untestable_rate = static_cast<double>(pr.replicates - pr.testable) /
                                 static_cast<double>(pr.replicates);
            out.power.push_back(std::move(pr));
          }
        }
      }
    }
  }
  return out;
}

std::vector<ValidityRow> run_validity(const ExperimentConfig& cfg, Exec exec) {
  cfg.validate();
  std::vector<ValidityRow> rows;
  std::uint64_t cell = 0;
  for (auto n : cfg.n_grid) {
    for (auto m : cfg.m_grid) {
      for (double p : cfg.p_grid) {
        const auto design = generate_bernoulli_assignments(n, m, p, derive_seed(cfg.seed, 7, cell));
        const Rng root(derive_seed(cfg.seed, 8, cell));
        for (double tau : cfg.tau_grid) {
          const std::size_t rejections = count_indices(cfg.mc_replicates, exec, [&](std::size_t rep) {
            Rng rng = root.stream(rep);
            OutcomeModel model;
            auto y = draw_base_outcomes(model, n, rng);
            const auto k = static_cast<std::size_t>(rng.below(design.size()));
            for (std::size_t i = 0; i < n; ++i)
              if (design.at(i, k)) y[i] += tau;
            return classical_randomization_test(design, y, k, cfg.alpha, Exec::Serial).reject;
          });
          ValidityRow r;
          r.n_units = n;
          r.m = m;
          r.p = p;
          r.tau = tau;
          r.replicates = cfg.mc_replicates;
          r.rejections = rejections;
          r.rate = static_cast<double>(rejections) / static_cast<double>(cfg.mc_replicates);
          r.se = rate_se(rejections, cfg.mc_replicates);
          rows.push_back(r);
        }
        ++cell;
      }
    }
  }
  return rows;
}

std::string to_csv(const std::vector<FormulaRow>& rows) {
  return render(rows,
                "n_units,m,p,distribution,tau,design_seed,p_hat,rho_hat,theta_hat,formula,"
                "empirical,se",
                [](const FormulaRow& r) {
                  return std::vector<std::string>{
                      fmt(r.n_units), fmt(r.m), fmt(r.p), r.distribution, fmt(r.tau),
                      std::to_string(r.design_seed), fmt(r.p_hat), fmt(r.rho_hat),
                      fmt(r.theta_hat), fmt(r.formula), fmt(r.empirical), fmt(r.se)};
                });
}

std::string to_csv(const std::vector<DecompositionBicliqueRow>& rows) {
  return render(rows, "d,b,graph,rule,biclique,units,assignments,edges,p_hat,rho_hat,theta_zero",
                [](const DecompositionBicliqueRow& r) {
                  return std::vector<std::string>{
                      fmt(r.d), fmt(r.b), fmt(r.graph), r.rule, fmt(r.index), fmt(r.units),
                      fmt(r.assignments), fmt(r.edges), fmt(r.p_hat), fmt(r.rho_hat),
                      fmt(r.theta_zero)};
                });
}

std::string to_csv(const std::vector<DecompositionRunRow>& rows) {
  return render(rows,
                "d,b,graph,rule,density,balance,bicliques,dropped,partition_ok,mean_theta_zero",
                run_fields);
}

std::string spatial_runs_csv(const std::vector<DecompositionRunRow>& rows) {
  return render(rows,
                "p,r,graph,rule,density,balance,bicliques,dropped,partition_ok,mean_theta_zero",
                run_fields);
}

std::string to_csv(const std::vector<GraphRow>& rows) {
  return render(rows, "p,r,graph,mean_treated,density,balance,edges,a_edges",
                [](const GraphRow& r) {
                  return std::vector<std::string>{fmt(r.p), fmt(r.r), fmt(r.graph),
                                                  fmt(r.mean_treated), fmt(r.density),
                                                  fmt(r.balance), fmt(r.edges), fmt(r.a_edges)};
                });
}

std::string to_csv(const std::vector<PowerRow>& rows) {
  return render(rows,
                "p,r,graph,tau,rule,replicates,testable,rejections,power,se,untestable_rate",
                [](const PowerRow& r) {
                  return std::vector<std::string>{
                      fmt(r.p), fmt(r.r), fmt(r.graph), fmt(r.tau), r.rule, fmt(r.replicates),
                      fmt(r.testable), fmt(r.rejections), fmt(r.power), fmt(r.se),
                      fmt(r.untestable_rate)};
                });
}

std::string to_csv(const std::vector<ValidityRow>& rows) {
  return render(rows, "n_units,m,p,tau,replicates,rejections,rate,se", [](const ValidityRow& r) {
    return std::vector<std::string>{fmt(r.n_units), fmt(r.m),          fmt(r.p),
                                    fmt(r.tau),     fmt(r.replicates), fmt(r.rejections),
                                    fmt(r.rate),    fmt(r.se)};
  });
}

std::vector<OutputFile> run_experiment(const ExperimentConfig& cfg, Exec exec) {
  cfg.validate();
  std::vector<OutputFile> files;
  switch (cfg.experiment) {
    case ExperimentKind::FormulaValidation:
      files.push_back({"formula_validation.csv", to_csv(run_formula_validation(cfg, exec))});
      break;
    case ExperimentKind::DecompositionComparison: {
      const auto res = run_decomposition_comparison(cfg, exec);
      files.push_back({"decomposition_bicliques.csv", to_csv(res.bicliques)});
      files.push_back({"decomposition_runs.csv", to_csv(res.runs)});
      break;
    }
    case ExperimentKind::SpatialPower: {
      const auto res = run_spatial_power(cfg, exec);
      files.push_back({"spatial_graphs.csv", to_csv(res.graphs)});
      if (!cfg.graph_only) {
        files.push_back({"spatial_decompositions.csv", spatial_runs_csv(res.decompositions)});
        files.push_back({"spatial_power.csv", to_csv(res.power)});
      }
      break;
    }
    case ExperimentKind::Validity:
      files.push_back({"validity.csv", to_csv(run_validity(cfg, exec))});
      break;
  }
  nlohmann::ordered_json manifest;
  manifest["experiment"] = to_string(cfg.experiment);
  manifest["seed"] = cfg.seed;
  manifest["config_hash"] = config_hash(cfg);
  manifest["version"] = kVersion;
  manifest["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
  std::vector<std::string> names;
  for (const auto& f : files) names.push_back(f.name);
  manifest["files"] = names;
  files.push_back({"manifest.json", manifest.dump(2) + "\n"});
  return files;
}

std::vector<std::filesystem::path> run_experiment_to(const ExperimentConfig& cfg,
                                                     const std::filesystem::path& dir,
                                                     Exec exec) {
  auto files = run_experiment(cfg, exec);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& f : files) {
    written.push_back(dir / f.name);
    csv::write_text(written.back(), f.contents);
  }
  return written;
}

}  // namespace bct
