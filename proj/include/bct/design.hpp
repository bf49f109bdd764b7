#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bct/rng.hpp"

namespace bct {

using Exposure = int;

/// The support of an experimental design: m distinct binary assignment
/// vectors over N units together with their probabilities.
///
/// Storage is column-major (one contiguous block per assignment) in the
/// canonical 0/1 coding. Invariants are checked on construction.
class AssignmentSet {
 public:
  AssignmentSet(std::size_t n_units, std::vector<std::vector<std::uint8_t>> assignments,
                std::vector<double> probs);

  /// Uniform design over the given assignments.
  AssignmentSet(std::size_t n_units, std::vector<std::vector<std::uint8_t>> assignments);

  std::size_t n_units() const { return n_units_; }
  std::size_t size() const { return probs_.size(); }

  std::span<const std::uint8_t> assignment(std::size_t k) const {
    return {data_.data() + k * n_units_, n_units_};
  }
  std::uint8_t at(std::size_t unit, std::size_t k) const {
    return data_[k * n_units_ + unit];
  }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t treated_count(std::size_t k) const;

  bool operator==(const AssignmentSet&) const = default;

 private:
  std::size_t n_units_;
  std::vector<std::uint8_t> data_;
  std::vector<double> probs_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct SpatialLayout {
  std::vector<Point> coords;
  double radius = 0.0;
};

/// One Gaussian blob of unit locations.
struct Cluster {
  std::size_t count;
  Point mean;
  double sd;
};

/// The three-blob mixture of 1000 units used in the spatial power study.
std::vector<Cluster> three_blob_clusters();

/// Same mixture with every count scaled by n / 1000 (rounded, last cluster
/// absorbs the remainder).
std::vector<Cluster> scaled_mixture_clusters(std::size_t n_units);

enum class MappingKind { NoInterference, Spatial, TableBacked };

/// Exposure mapping f_i(z). Spatial mappings precompute, for each unit, the
/// units within the interference radius.
class ExposureMapping {
 public:
  static ExposureMapping no_interference();
  static ExposureMapping spatial(SpatialLayout layout);
  /// table[k * n_units + i] is the exposure of unit i under assignment k.
  static ExposureMapping table_backed(std::size_t n_units, std::size_t n_assignments,
                                      std::vector<Exposure> table,
                                      std::vector<Exposure> alphabet);

  MappingKind kind() const { return kind_; }
  const std::vector<Exposure>& alphabet() const { return alphabet_; }
  bool in_alphabet(Exposure e) const;
  const SpatialLayout& layout() const { return layout_; }

  /// Exposure of `unit` under assignment vector z. Not available for
  /// table-backed mappings, which are indexed by assignment position.
  Exposure exposure_of(std::size_t unit, std::span<const std::uint8_t> z) const;

  /// Exposure of `unit` under the k-th assignment of `design`.
  Exposure exposure_of(const AssignmentSet& design, std::size_t unit, std::size_t k) const;

  /// Exposures of every unit under assignment k.
  std::vector<Exposure> exposures(const AssignmentSet& design, std::size_t k) const;

 private:
  ExposureMapping() = default;
  Exposure spatial_exposure(std::size_t unit, std::span<const std::uint8_t> z) const;

  MappingKind kind_ = MappingKind::NoInterference;
  std::vector<Exposure> alphabet_;
  SpatialLayout layout_;
  std::vector<std::vector<std::uint32_t>> neighbors_;
  std::size_t table_units_ = 0;
  std::size_t table_assignments_ = 0;
  std::vector<Exposure> table_;
};

/// Convenience wrapper matching the free-function form used by callers.
inline Exposure exposure_of(const ExposureMapping& mapping, std::size_t unit,
                            std::span<const std::uint8_t> z) {
  return mapping.exposure_of(unit, z);
}

/// H0^{a,b}: outcomes agree whenever a unit's exposure is a or b.
struct ContrastHypothesis {
  Exposure exposure_a = 1;
  Exposure exposure_b = 0;

  /// Throws InputError unless a != b and both are in `alphabet`.
  void validate(std::span<const Exposure> alphabet) const;
  bool operator==(const ContrastHypothesis&) const = default;
};

enum class BaseDistribution { Normal, Exponential };

struct OutcomeModel {
  double tau = 0.0;
  double base_mean = 0.0;
  double base_sd = 1.0;
  BaseDistribution base_dist = BaseDistribution::Normal;
  double exp_rate = 1.0;

  void validate() const;
};

/// Bernoulli(p) assignments, each unit independently. All-0, all-1 and
/// duplicate vectors are redrawn; gives up after 1000 * m attempts.
AssignmentSet generate_bernoulli_assignments(std::size_t n_units, std::size_t m, double p,
                                             std::uint64_t seed);

SpatialLayout generate_spatial_layout(std::span<const Cluster> clusters, double radius,
                                      std::uint64_t seed);

/// Base outcomes Y0: Normal(mu, sd^2), or Exponential(rate) shifted so the
/// mean is mu.
std::vector<double> draw_base_outcomes(const OutcomeModel& model, std::size_t n, Rng& rng);

/// Units exposed to `exposure_a` receive +tau on top of their base outcome.
std::vector<double> apply_contrast_shift(std::span<const double> base,
                                         std::span<const Exposure> exposures,
                                         const ContrastHypothesis& contrast, double tau);

/// Draws base outcomes and applies the contrast shift. Every exposure must be
/// in `alphabet`.
std::vector<double> draw_outcomes(const OutcomeModel& model, std::span<const Exposure> exposures,
                                  const ContrastHypothesis& contrast,
                                  std::span<const Exposure> alphabet, std::uint64_t seed);

// File formats: assignments.csv (rows = units, header z1..zm), layout.csv
// (header x,y), design.json (n_units, m, p, seed, radius).

struct DesignMeta {
  std::size_t n_units = 0;
  std::size_t m = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  double radius = 0.0;
};

void write_assignments_csv(const AssignmentSet& design, const std::filesystem::path& path);
AssignmentSet read_assignments_csv(const std::filesystem::path& path);
void write_layout_csv(const SpatialLayout& layout, const std::filesystem::path& path);
/// Radius is not stored in layout.csv; the caller supplies it.
SpatialLayout read_layout_csv(const std::filesystem::path& path, double radius);
void write_design_json(const DesignMeta& meta, const std::filesystem::path& path);
DesignMeta read_design_json(const std::filesystem::path& path);

}  // namespace bct
