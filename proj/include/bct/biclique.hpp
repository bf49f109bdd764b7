#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bct/negraph.hpp"

namespace bct {

/// A complete sub-bipartite graph (U, Z). Both index lists are sorted.
struct Biclique {
  std::vector<std::size_t> units;
  std::vector<std::size_t> assignments;

  std::size_t edge_count() const { return units.size() * assignments.size(); }

  auto operator<=>(const Biclique&) const = default;
};

struct BicliqueHash {
  std::size_t operator()(const Biclique& b) const;
};

struct EnumerationConfig {
  std::size_t min_units = 1;
  std::size_t min_assignments = 1;
  std::size_t max_bicliques = std::numeric_limits<std::size_t>::max();

  void validate() const;
};

/// Maximal bicliques by Bimax divide and conquer, with assignments as the
/// template rows and units as the columns. The split template is always the
/// lowest-index assignment not yet fully covering the current unit set, so
/// the emission order is deterministic and a run capped at k is a prefix of
/// a run capped at k' > k.
///
/// Only assignments in `active` take part (the residual graph during greedy
/// decomposition); an empty span means all assignments.
std::vector<Biclique> enumerate_maximal(const NullExposureGraph& g, const EnumerationConfig& cfg,
                                        std::span<const std::size_t> active = {});

/// Exhaustive oracle: closes every nonempty unit subset. Requires N <= 20.
/// Output sorted; minima and cap applied after enumeration.
std::vector<Biclique> brute_force_maximal(const NullExposureGraph& g,
                                          const EnumerationConfig& cfg);

/// True iff both sides are nonempty and every (unit, assignment) pair is an
/// edge. Throws InputError on out-of-range indices.
bool is_biclique(const NullExposureGraph& g, const Biclique& c);

/// True iff no single unit or assignment can be added while remaining a
/// biclique (restricted to `active` assignments when given).
bool is_maximal(const NullExposureGraph& g, const Biclique& c,
                std::span<const std::size_t> active = {});

std::string to_json_line(const Biclique& c);
Biclique biclique_from_json(const std::string& line);
void write_bicliques_jsonl(std::span<const Biclique> bicliques,
                           const std::filesystem::path& path);
std::vector<Biclique> read_bicliques_jsonl(const std::filesystem::path& path);

}  // namespace bct
