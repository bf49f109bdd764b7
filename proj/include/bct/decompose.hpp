#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bct/biclique.hpp"
#include "bct/exec.hpp"
#include "bct/negraph.hpp"

namespace bct {

enum class ScoringRule { EdgeCount, ThetaZero };

std::string to_string(ScoringRule rule);
ScoringRule parse_scoring_rule(const std::string& name);

/// Bicliques whose assignment sets partition the assignments of the graph,
/// apart from `dropped` assignments that no qualifying biclique could cover.
struct BicliqueDecomposition {
  std::size_t n_assignments = 0;
  std::vector<Biclique> bicliques;
  /// owner[k] = index into `bicliques`, or nullopt for dropped assignments.
  std::vector<std::optional<std::size_t>> owner;
  std::vector<std::size_t> dropped;
};

struct CandidateScore {
  double theta_zero = 0.0;
  std::size_t edges = 0;
};

/// Theta-hat-zero of a biclique computed directly from the graph's bitsets.
/// Agrees with theta_zero(SignedAssignmentView::from_biclique(g, c)).
double biclique_theta_zero(const NullExposureGraph& g, const Biclique& c);

std::vector<CandidateScore> score_candidates(const NullExposureGraph& g,
                                             std::span<const Biclique> candidates,
                                             Exec exec = Exec::Parallel);

/// Index of the argmax under `rule`. Ties go to the larger secondary score
/// (|E| for ThetaZero, Theta0 for EdgeCount), then to the lexicographically
/// smallest biclique.
std::size_t select_best(std::span<const Biclique> candidates,
                        std::span<const CandidateScore> scores, ScoringRule rule);

/// Greedy decomposition: enumerate up to cfg.max_bicliques maximal bicliques
/// of the residual graph, keep the best under `rule`, delete its assignments,
/// repeat until no qualifying biclique remains.
BicliqueDecomposition decompose(const NullExposureGraph& g, ScoringRule rule,
                                const EnumerationConfig& cfg, Exec exec = Exec::Parallel);

/// The biclique owning assignment k. Throws UntestableError for dropped or
/// unknown assignments.
const Biclique& find_owner(const BicliqueDecomposition& d, std::size_t k);

struct SummaryRow {
  std::size_t units = 0;
  std::size_t assignments = 0;
  std::size_t edges = 0;
  double p_hat = 0.0;
  double rho_hat = 0.0;
  double theta_zero = 0.0;
};

std::vector<SummaryRow> decomposition_summary(const NullExposureGraph& g,
                                              const BicliqueDecomposition& d);

std::string summary_csv(std::span<const SummaryRow> rows);

/// True iff owned and dropped assignments partition {0..m-1} and every
/// biclique's assignments map back to it in `owner`.
bool is_partition(const BicliqueDecomposition& d);

void write_decomposition_json(const BicliqueDecomposition& d, const std::filesystem::path& path);
BicliqueDecomposition read_decomposition_json(const std::filesystem::path& path);

}  // namespace bct
