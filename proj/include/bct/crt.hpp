#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bct/biclique.hpp"
#include "bct/decompose.hpp"
#include "bct/design.hpp"
#include "bct/exec.hpp"
#include "bct/negraph.hpp"

namespace bct {

enum class PValueMethod { Exact, MonteCarlo };

struct TestReport {
  /// Index of the conditioning biclique; empty for the classical test.
  std::optional<std::size_t> biclique_id;
  Biclique biclique;
  double t_obs = 0.0;
  /// One statistic per assignment of the conditioning set (Exact) or per
  /// resampled assignment (MonteCarlo).
  std::vector<double> null_stats;
  double p_value = 1.0;
  PValueMethod method = PValueMethod::Exact;
  std::size_t mc_samples = 0;
  bool reject = false;
};

/// Difference in mean outcome between units of `units` with exposure a and
/// those with exposure b. Returns 0 when every unit shares one exposure.
/// `exposures` and `y` are indexed by unit id. Throws InputError if a unit
/// has an exposure outside {a, b}.
double restricted_diff_means(std::span<const Exposure> exposures, std::span<const double> y,
                             std::span<const std::size_t> units, const ContrastHypothesis& hyp);

/// Same statistic with the exposures read off the graph's labels for
/// assignment k.
double restricted_diff_means(const NullExposureGraph& g, std::size_t k, std::span<const double> y,
                             std::span<const std::size_t> units);

struct TestOptions {
  double alpha = 0.05;
  /// 0 = exact enumeration of the conditioning set. Otherwise draw this many
  /// assignments from it with replacement and report (1 + #{T >= t_obs}) /
  /// (1 + samples).
  std::size_t mc_samples = 0;
  std::uint64_t seed = 0;
  Exec exec = Exec::Parallel;
};

/// Conditional randomization test on the biclique owning `z_obs_index`.
/// p = #{l in Z(C) : T(z_l, Y; C) >= t_obs} / |Z(C)| under the uniform design.
/// Throws UntestableError if the observed assignment has no owner.
TestReport biclique_test(const NullExposureGraph& g, const BicliqueDecomposition& d,
                         std::size_t z_obs_index, std::span<const double> y_obs,
                         const TestOptions& opts = {});

/// Fisher randomization test of the sharp no-effect null with the
/// difference-in-means statistic over every unit, weighted by the design
/// probabilities. Throws DegenerateColumnError if any assignment treats all
/// units or none.
TestReport classical_randomization_test(const AssignmentSet& design, std::span<const double> y_obs,
                                        std::size_t z_obs_index, double alpha = 0.05,
                                        Exec exec = Exec::Parallel);

std::string report_json(const TestReport& r);
void write_report_json(const TestReport& r, const std::filesystem::path& path);

}  // namespace bct
