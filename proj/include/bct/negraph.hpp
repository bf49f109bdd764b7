#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "bct/bitset.hpp"
#include "bct/design.hpp"
#include "bct/exec.hpp"

namespace bct {

enum class EdgeLabel : std::uint8_t { None = 0, A = 1, B = 2 };

/// Null exposure graph of a contrast hypothesis: units x assignments, with an
/// edge (i, k) exactly when f_i(z_k) is one of the two contrast exposures,
/// labelled by which one.
///
/// The label matrix is the source of truth. Per-assignment bitsets over units
/// (edge mask and a-label mask) are derived from it for the bit-parallel
/// kernels.
class NullExposureGraph {
 public:
  NullExposureGraph() = default;
  /// labels[k * n_units + i] is the label of edge (unit i, assignment k).
  NullExposureGraph(std::size_t n_units, std::size_t n_assignments,
                    std::vector<EdgeLabel> labels, ContrastHypothesis hypothesis);

  std::size_t n_units() const { return n_units_; }
  std::size_t n_assignments() const { return n_assignments_; }
  const ContrastHypothesis& hypothesis() const { return hypothesis_; }

  EdgeLabel label(std::size_t unit, std::size_t k) const {
    return labels_[k * n_units_ + unit];
  }
  bool has_edge(std::size_t unit, std::size_t k) const {
    return label(unit, k) != EdgeLabel::None;
  }
  const std::vector<EdgeLabel>& labels() const { return labels_; }

  /// Units adjacent to assignment k.
  const BitSet& edge_mask(std::size_t k) const { return edge_mask_[k]; }
  /// Units whose edge to assignment k carries label a.
  const BitSet& a_mask(std::size_t k) const { return a_mask_[k]; }

  std::size_t edge_count() const;

  bool operator==(const NullExposureGraph& o) const {
    return n_units_ == o.n_units_ && n_assignments_ == o.n_assignments_ &&
           labels_ == o.labels_ && hypothesis_ == o.hypothesis_;
  }

 private:
  std::size_t n_units_ = 0;
  std::size_t n_assignments_ = 0;
  std::vector<EdgeLabel> labels_;
  ContrastHypothesis hypothesis_;
  std::vector<BitSet> edge_mask_;
  std::vector<BitSet> a_mask_;
};

struct GraphStats {
  double density = 0.0;
  /// Fraction of edges labelled a; empty when the graph has no edges.
  std::optional<double> balance;
  std::size_t edges = 0;
  std::size_t a_edges = 0;
};

NullExposureGraph build_graph(const AssignmentSet& design, const ExposureMapping& mapping,
                              const ContrastHypothesis& hyp, Exec exec = Exec::Parallel);

GraphStats graph_stats(const NullExposureGraph& g);

/// Each cell is an edge with probability `density`; each edge is labelled a
/// with probability `balance`.
NullExposureGraph generate_random_graph(std::size_t n_units, std::size_t n_assignments,
                                        double density, double balance, std::uint64_t seed,
                                        ContrastHypothesis hyp = {});

/// negraph.csv: one row per unit, one column per assignment, cells ".", "a"
/// or "b". The sidecar negraph.json carries {n, m, exposure_a, exposure_b}.
void write_graph(const NullExposureGraph& g, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path);
NullExposureGraph read_graph(const std::filesystem::path& csv_path,
                             const std::filesystem::path& json_path);

}  // namespace bct
