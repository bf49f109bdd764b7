#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bct/biclique.hpp"
#include "bct/exec.hpp"

namespace bct {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { FormulaValidation, DecompositionComparison, SpatialPower, Validity };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Every experiment is a pure function of its config. Keys not used by an
/// experiment are ignored by it.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::FormulaValidation;
  std::uint64_t seed = 1;
  double alpha = 0.05;

  // Formula validation and validity: design grid.
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> m_grid;
  /// Bernoulli treatment probability (formula validation, spatial, validity).
  std::vector<double> p_grid;
  /// "normal" and/or "exponential" base outcomes (formula validation).
  std::vector<std::string> distributions;

  std::vector<double> tau_grid;
  /// Outcome draws per design (formula validation) or replicates per cell.
  std::size_t mc_replicates = 50;

  // Random and spatial graphs.
  std::size_t n_units = 300;
  std::size_t n_assignments = 300;
  std::vector<double> d_grid;
  std::vector<double> b_grid;
  std::vector<double> r_grid;
  /// Independent graphs (or layouts) per (d, b) or (p, r) cell.
  std::size_t graph_seeds = 1;
  /// Spatial: stop after the graph statistics.
  bool graph_only = false;

  EnumerationConfig enumeration{10, 10, 2000};

  void validate() const;
};

/// Desk-scale defaults for each experiment.
ExperimentConfig default_config(ExperimentKind kind);

/// Full-scale overrides: N = m = 1000, cap 10^4, minima 20, 100 replicates.
/// Expect hours rather than minutes for the spatial study on a few cores.
void apply_full_scale(ExperimentConfig& cfg);

/// Applies every key of a JSON object on top of `cfg` (same keys as the
/// config file, minus "experiment"). Unknown keys are an InputError.
void apply_config_overrides(ExperimentConfig& cfg, const std::string& json_object);

/// Starts from default_config of the "experiment" key and overrides every key
/// present. Unknown keys are an InputError.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig read_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the canonical config JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Seed for a sub-task, a pure function of the root seed and the indices.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

struct FormulaRow {
  std::size_t n_units = 0;
  std::size_t m = 0;
  double p = 0.0;
  std::string distribution;
  double tau = 0.0;
  std::uint64_t design_seed = 0;
  double p_hat = 0.0;
  double rho_hat = 0.0;
  double theta_hat = 0.0;
  double formula = 0.0;
  double empirical = 0.0;
  double se = 0.0;
};

struct DecompositionBicliqueRow {
  double d = 0.0;
  double b = 0.0;
  std::size_t graph = 0;
  std::string rule;
  std::size_t index = 0;
  std::size_t units = 0;
  std::size_t assignments = 0;
  std::size_t edges = 0;
  double p_hat = 0.0;
  double rho_hat = 0.0;
  double theta_zero = 0.0;
};

struct DecompositionRunRow {
  double d = 0.0;
  double b = 0.0;
  std::size_t graph = 0;
  std::string rule;
  double density = 0.0;
  double balance = 0.0;
  std::size_t bicliques = 0;
  std::size_t dropped = 0;
  bool partition_ok = false;
  double mean_theta_zero = 0.0;
};

struct DecompositionComparison {
  std::vector<DecompositionBicliqueRow> bicliques;
  std::vector<DecompositionRunRow> runs;
};

struct GraphRow {
  double p = 0.0;
  double r = 0.0;
  std::size_t graph = 0;
  double mean_treated = 0.0;
  double density = 0.0;
  /// NaN when the graph has no edges.
  double balance = 0.0;
  std::size_t edges = 0;
  std::size_t a_edges = 0;
};

struct PowerRow {
  double p = 0.0;
  double r = 0.0;
  std::size_t graph = 0;
  double tau = 0.0;
  std::string rule;
  std::size_t replicates = 0;
  std::size_t testable = 0;
  std::size_t rejections = 0;
  /// rejections / testable; NaN when nothing was testable.
  double power = 0.0;
  double se = 0.0;
  double untestable_rate = 0.0;
};

struct SpatialPowerResult {
  std::vector<GraphRow> graphs;
  std::vector<DecompositionRunRow> decompositions;
  std::vector<PowerRow> power;
};

struct ValidityRow {
  std::size_t n_units = 0;
  std::size_t m = 0;
  double p = 0.0;
  double tau = 0.0;
  std::size_t replicates = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double se = 0.0;
};

std::vector<FormulaRow> run_formula_validation(const ExperimentConfig& cfg,
                                               Exec exec = Exec::Parallel);
DecompositionComparison run_decomposition_comparison(const ExperimentConfig& cfg,
                                                     Exec exec = Exec::Parallel);
SpatialPowerResult run_spatial_power(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);
/// Level of the classical test under no interference.
std::vector<ValidityRow> run_validity(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

std::string to_csv(const std::vector<FormulaRow>& rows);
std::string to_csv(const std::vector<DecompositionBicliqueRow>& rows);
std::string to_csv(const std::vector<DecompositionRunRow>& rows);
/// Decomposition runs of the spatial study, keyed by (p, r) instead of (d, b).
std::string spatial_runs_csv(const std::vector<DecompositionRunRow>& rows);
std::string to_csv(const std::vector<GraphRow>& rows);
std::string to_csv(const std::vector<PowerRow>& rows);
std::string to_csv(const std::vector<ValidityRow>& rows);

struct OutputFile {
  std::string name;
  std::string contents;
};

/// Runs cfg.experiment and returns its CSV files followed by manifest.json.
std::vector<OutputFile> run_experiment(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

/// run_experiment, writing each file into `dir` (created if needed).
std::vector<std::filesystem::path> run_experiment_to(const ExperimentConfig& cfg,
                                                     const std::filesystem::path& dir,
                                                     Exec exec = Exec::Parallel);

}  // namespace bct
