#include "bct/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "json.hpp"

#include "bct/csv.hpp"
#include "bct/error.hpp"

namespace bct {

AssignmentSet::AssignmentSet(std::size_t n_units,
                             std::vector<std::vector<std::uint8_t>> assignments,
                             std::vector<double> probs)
    : n_units_(n_units), probs_(std::move(probs)) {
  if (n_units == 0) throw InputError("assignment set needs at least one unit");
  if (assignments.empty()) throw InputError("assignment set needs at least one assignment");
  if (assignments.size() != probs_.size())
    throw InputError("probability vector length does not match assignment count");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p > 0.0)) throw InputError("assignment probabilities must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("assignment probabilities must sum to 1");

  data_.reserve(n_units * assignments.size());
  std::unordered_set<std::string> seen;
  for (const auto& z : assignments) {
    if (z.size() != n_units) throw InputError("assignment vector length differs from n_units");
    for (auto v : z)
      if (v > 1) throw InputError("assignment entries must be 0 or 1");
    if (!seen.emplace(z.begin(), z.end()).second)
      throw InputError("assignment vectors must be pairwise distinct");
    data_.insert(data_.end(), z.begin(), z.end());
  }
}

AssignmentSet::AssignmentSet(std::size_t n_units,
                             std::vector<std::vector<std::uint8_t>> assignments)
    : AssignmentSet(n_units, assignments,
                    std::vector<double>(assignments.size(),
                                        assignments.empty() ? 0.0 : 1.0 / assignments.size())) {}

std::size_t AssignmentSet::treated_count(std::size_t k) const {
  const auto z = assignment(k);
  return static_cast<std::size_t>(std::count(z.begin(), z.end(), std::uint8_t{1}));
}

std::vector<Cluster> three_blob_clusters() {
  return {{500, {0.5, 0.5}, 0.1}, {300, {0.25, 0.75}, 0.075}, {200, {0.3, 0.3}, 0.075}};
}

std::vector<Cluster> scaled_mixture_clusters(std::size_t n_units) {
  auto clusters = three_blob_clusters();
  std::size_t assigned = 0;
  for (std::size_t c = 0; c + 1 < clusters.size(); ++c) {
    clusters[c].count = static_cast<std::size_t>(
        std::llround(static_cast<double>(clusters[c].count) * n_units / 1000.0));
    assigned += clusters[c].count;
  }
  clusters.back().count = n_units > assigned ? n_units - assigned : 0;
  return clusters;
}

// ---------------------------------------------------------------------------
// Exposure mappings

ExposureMapping ExposureMapping::no_interference() {
  ExposureMapping m;
  m.kind_ = MappingKind::NoInterference;
  m.alphabet_ = {0, 1};
  return m;
}

ExposureMapping ExposureMapping::spatial(SpatialLayout layout) {
  if (!(layout.radius > 0.0)) throw InputError("interference radius must be positive");
  ExposureMapping m;
  m.kind_ = MappingKind::Spatial;
  m.alphabet_ = {0, 1, 2};
  const std::size_t n = layout.coords.size();
  m.neighbors_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::hypot(layout.coords[i].x - layout.coords[j].x,
                                  layout.coords[i].y - layout.coords[j].y);
      if (d <= layout.radius) {
        m.neighbors_[i].push_back(static_cast<std::uint32_t>(j));
        m.neighbors_[j].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
  for (auto& nb : m.neighbors_) std::sort(nb.begin(), nb.end());
  m.layout_ = std::move(layout);
  return m;
}

ExposureMapping ExposureMapping::table_backed(std::size_t n_units, std::size_t n_assignments,
                                              std::vector<Exposure> table,
                                              std::vector<Exposure> alphabet) {
  if (table.size() != n_units * n_assignments)
    throw InputError("exposure table has wrong size");
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  for (Exposure e : table)
    if (!std::binary_search(alphabet.begin(), alphabet.end(), e))
      throw InputError("exposure table entry " + std::to_string(e) + " not in alphabet");
  ExposureMapping m;
  m.kind_ = MappingKind::TableBacked;
  m.alphabet_ = std::move(alphabet);
  m.table_units_ = n_units;
  m.table_assignments_ = n_assignments;
  m.table_ = std::move(table);
  return m;
}

bool ExposureMapping::in_alphabet(Exposure e) const {
  return std::find(alphabet_.begin(), alphabet_.end(), e) != alphabet_.end();
}

Exposure ExposureMapping::spatial_exposure(std::size_t unit,
                                           std::span<const std::uint8_t> z) const {
  if (z[unit]) return 2;
  for (auto j : neighbors_[unit])
    if (z[j]) return 1;
  return 0;
}

Exposure ExposureMapping::exposure_of(std::size_t unit, std::span<const std::uint8_t> z) const {
  switch (kind_) {
    case MappingKind::NoInterference:
      if (unit >= z.size()) throw InputError("unit index out of range");
      return z[unit];
    case MappingKind::Spatial:
      if (z.size() != neighbors_.size())
        throw InputError("assignment length does not match spatial layout");
      if (unit >= z.size()) throw InputError("unit index out of range");
      return spatial_exposure(unit, z);
    case MappingKind::TableBacked:
      break;
  }
  throw InputError("table-backed exposures are indexed by assignment, not by vector");
}

Exposure ExposureMapping::exposure_of(const AssignmentSet& design, std::size_t unit,
                                      std::size_t k) const {
  if (kind_ == MappingKind::TableBacked) {
    if (design.n_units() != table_units_ || design.size() != table_assignments_)
      throw InputError("exposure table dimensions do not match design");
    if (unit >= table_units_ || k >= table_assignments_)
      throw InputError("index out of range");
    return table_[k * table_units_ + unit];
  }
  if (k >= design.size()) throw InputError("assignment index out of range");
  return exposure_of(unit, design.assignment(k));
}

std::vector<Exposure> ExposureMapping::exposures(const AssignmentSet& design,
                                                 std::size_t k) const {
  const std::size_t n = design.n_units();
  std::vector<Exposure> out(n);
  if (kind_ == MappingKind::TableBacked) {
    for (std::size_t i = 0; i < n; ++i) out[i] = exposure_of(design, i, k);
    return out;
  }
  const auto z = design.assignment(k);
  if (kind_ == MappingKind::Spatial && n != neighbors_.size())
    throw InputError("assignment length does not match spatial layout");
  for (std::size_t i = 0; i < n; ++i)
    out[i] = kind_ == MappingKind::Spatial ? spatial_exposure(i, z) : Exposure{z[i]};
  return out;
}

void ContrastHypothesis::validate(std::span<const Exposure> alphabet) const {
  if (exposure_a == exposure_b) throw InputError("contrast exposures must differ");
  auto has = [&](Exposure e) {
    return std::find(alphabet.begin(), alphabet.end(), e) != alphabet.end();
  };
  if (!has(exposure_a) || !has(exposure_b))
    throw InputError("contrast exposure not in the mapping's alphabet");
}

void OutcomeModel::validate() const {
  if (!(base_sd > 0.0)) throw InputError("base_sd must be positive");
  if (base_dist == BaseDistribution::Exponential && !(exp_rate > 0.0))
    throw InputError("exponential rate must be positive");
}

// ---------------------------------------------------------------------------
// Generators

AssignmentSet generate_bernoulli_assignments(std::size_t n_units, std::size_t m, double p,
                                             std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("p must lie in (0, 1)");
  if (m == 0) throw InputError("m must be at least 1");
  if (n_units == 0) throw InputError("n_units must be at least 1");
  Rng rng(seed);
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(m);
  std::unordered_set<std::string> seen;
  const std::size_t budget = 1000 * m;
  std::size_t attempts = 0;
  std::vector<std::uint8_t> z(n_units);
  while (out.size() < m) {
    if (attempts++ >= budget)
      throw GenerationError("could not draw " + std::to_string(m) +
                            " distinct non-degenerate assignments within " +
                            std::to_string(budget) + " attempts");
    std::size_t treated = 0;
    for (auto& v : z) {
      v = rng.bernoulli(p) ? 1 : 0;
      treated += v;
    }
    if (treated == 0 || treated == n_units) continue;
    if (!seen.emplace(z.begin(), z.end()).second) continue;
    out.push_back(z);
  }
  return AssignmentSet(n_units, std::move(out));
}

SpatialLayout generate_spatial_layout(std::span<const Cluster> clusters, double radius,
                                      std::uint64_t seed) {
  Rng rng(seed);
  SpatialLayout layout;
  layout.radius = radius;
  for (const auto& c : clusters) {
    if (c.sd < 0.0 || std::isnan(c.sd)) throw InputError("cluster sd must be nonnegative");
    for (std::size_t i = 0; i < c.count; ++i) {
      const double x = c.mean.x + c.sd * rng.normal();
      const double y = c.mean.y + c.sd * rng.normal();
      layout.coords.push_back({x, y});
    }
  }
  return layout;
}

std::vector<double> draw_base_outcomes(const OutcomeModel& model, std::size_t n, Rng& rng) {
  std::vector<double> y(n);
  if (model.base_dist == BaseDistribution::Normal) {
    for (auto& v : y) v = model.base_mean + model.base_sd * rng.normal();
  } else {
    const double shift = model.base_mean - 1.0 / model.exp_rate;
    for (auto& v : y) v = rng.exponential(model.exp_rate) + shift;
  }
  return y;
}

std::vector<double> apply_contrast_shift(std::span<const double> base,
                                         std::span<const Exposure> exposures,
                                         const ContrastHypothesis& contrast, double tau) {
  if (base.size() != exposures.size())
    throw InputError("outcome and exposure vectors differ in length");
  std::vector<double> y(base.begin(), base.end());
  for (std::size_t i = 0; i < y.size(); ++i)
    if (exposures[i] == contrast.exposure_a) y[i] += tau;
  return y;
}

std::vector<double> draw_outcomes(const OutcomeModel& model, std::span<const Exposure> exposures,
                                  const ContrastHypothesis& contrast,
                                  std::span<const Exposure> alphabet, std::uint64_t seed) {
  model.validate();
  contrast.validate(alphabet);
  for (Exposure e : exposures)
    if (std::find(alphabet.begin(), alphabet.end(), e) == alphabet.end())
      throw InputError("unknown exposure symbol " + std::to_string(e));
  Rng rng(seed);
  const auto base = draw_base_outcomes(model, exposures.size(), rng);
  return apply_contrast_shift(base, exposures, contrast, model.tau);
}

// ---------------------------------------------------------------------------
// Files

void write_assignments_csv(const AssignmentSet& design, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t k = 0; k < design.size(); ++k) {
    if (k) out += ',';
    out += "z" + std::to_string(k + 1);
  }
  out += '\n';
  for (std::size_t i = 0; i < design.n_units(); ++i) {
    for (std::size_t k = 0; k < design.size(); ++k) {
      if (k) out += ',';
      out += design.at(i, k) ? '1' : '0';
    }
    out += '\n';
  }
  csv::write_text(path, out);
}

AssignmentSet read_assignments_csv(const std::filesystem::path& path) {
  const auto rows = csv::read(path);
  if (rows.size() < 2) throw InputError(path.string() + ": expected header and unit rows");
  const std::size_t m = rows[0].size();
  for (std::size_t k = 0; k < m; ++k)
    if (rows[0][k] != "z" + std::to_string(k + 1))
      throw InputError(path.string() + ": header must be z1..zm");
  const std::size_t n = rows.size() - 1;
  std::vector<std::vector<std::uint8_t>> cols(m, std::vector<std::uint8_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != m) throw InputError(path.string() + ": ragged row " + std::to_string(i));
    for (std::size_t k = 0; k < m; ++k) {
      if (row[k] != "0" && row[k] != "1")
        throw InputError(path.string() + ": cells must be 0 or 1");
      cols[k][i] = row[k] == "1";
    }
  }
  return AssignmentSet(n, std::move(cols));
}

void write_layout_csv(const SpatialLayout& layout, const std::filesystem::path& path) {
  std::string out = "x,y\n";
  for (const auto& p : layout.coords) out += csv::format(p.x) + "," + csv::format(p.y) + "\n";
  csv::write_text(path, out);
}

SpatialLayout read_layout_csv(const std::filesystem::path& path, double radius) {
  const auto rows = csv::read(path);
  if (rows.empty() || rows[0] != csv::Row{"x", "y"})
    throw InputError(path.string() + ": header must be x,y");
  SpatialLayout layout;
  layout.radius = radius;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw InputError(path.string() + ": expected two columns");
    layout.coords.push_back({csv::to_double(rows[r][0]), csv::to_double(rows[r][1])});
  }
  return layout;
}

void write_design_json(const DesignMeta& meta, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["n_units"] = meta.n_units;
  j["m"] = meta.m;
  j["p"] = meta.p;
  j["seed"] = meta.seed;
  j["radius"] = meta.radius;
  csv::write_text(path, j.dump(2) + "\n");
}

DesignMeta read_design_json(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(csv::read_text(path));
    DesignMeta meta;
    meta.n_units = j.at("n_units").get<std::size_t>();
    meta.m = j.at("m").get<std::size_t>();
    meta.p = j.value("p", 0.0);
    meta.seed = j.value("seed", std::uint64_t{0});
    meta.radius = j.value("radius", 0.0);
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace bct
