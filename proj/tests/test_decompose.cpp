#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "bct/decompose.hpp"
#include "bct/error.hpp"
#include "bct/power.hpp"

using namespace bct;

namespace {

NullExposureGraph from_rows(const std::vector<std::string>& rows) {
  const std::size_t n = rows.size(), m = rows.front().size();
  std::vector<EdgeLabel> labels(n * m, EdgeLabel::None);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k)
      labels[k * n + i] = rows[i][k] == 'a'   ? EdgeLabel::A
                          : rows[i][k] == 'b' ? EdgeLabel::B
                                              : EdgeLabel::None;
  return NullExposureGraph(n, m, std::move(labels), {1, 0});
}

}  // namespace

TEST(Decompose, CompleteGraphSingleBiclique) {
  const auto g = generate_random_graph(8, 6, 1.0, 0.5, 2);
  const auto d = decompose(g, ScoringRule::EdgeCount, {});
  ASSERT_EQ(d.bicliques.size(), 1u);
  EXPECT_EQ(d.bicliques[0].edge_count(), 48u);
  EXPECT_TRUE(d.dropped.empty());
  EXPECT_TRUE(is_partition(d));
}

TEST(Decompose, WorkedExampleScore) {
  const auto g = from_rows({"abba", "abab", "babb"});
  const Biclique c{{0, 1, 2}, {0, 1, 2, 3}};
  EXPECT_NEAR(biclique_theta_zero(g, c), 0.8539, 1e-4);
  const auto rows = decomposition_summary(g, decompose(g, ScoringRule::ThetaZero, {}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].units, 3u);
  EXPECT_EQ(rows[0].assignments, 4u);
  EXPECT_EQ(rows[0].edges, 12u);
  EXPECT_EQ(rows[0].p_hat, 5.0 / 12.0);
  EXPECT_EQ(rows[0].rho_hat, 0.0);
  EXPECT_NEAR(rows[0].theta_zero, std::sqrt(3.0 * 5.0 / 12.0 * 7.0 / 12.0), 1e-12);
}

TEST(Decompose, ConstantPatternBicliqueIsAvoidedByThetaRule) {
  // Units 0-2 keep one exposure across all assignments: that biclique has
  // identical columns, rho-hat = 1 and score 0.
  const auto g = from_rows({"aaaa", "bbbb", "aaaa", "ab.."});
  const Biclique constant{{0, 1, 2}, {0, 1, 2, 3}};
  EXPECT_EQ(biclique_theta_zero(g, constant), 0.0);
  const auto by_edges = decompose(g, ScoringRule::EdgeCount, {});
  EXPECT_EQ(by_edges.bicliques.front(), constant);
  const auto by_theta = decompose(g, ScoringRule::ThetaZero, {});
  EXPECT_EQ(by_theta.bicliques.front(), (Biclique{{0, 1, 2, 3}, {0, 1}}));
  EXPECT_GT(biclique_theta_zero(g, by_theta.bicliques.front()), 0.0);
}

TEST(Decompose, AllAGraphScoresZero) {
  // Every column is degenerate: rho-hat falls back to 0 and the score is 0.
  const auto g = generate_random_graph(5, 5, 1.0, 1.0, 1);
  const auto rows = decomposition_summary(g, decompose(g, ScoringRule::ThetaZero, {}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].rho_hat, 0.0);
  EXPECT_EQ(rows[0].theta_zero, 0.0);
}

TEST(Decompose, EmptyDecompositionSummary) {
  const auto g = generate_random_graph(5, 5, 0.0, 0.5, 1);
  const auto d = decompose(g, ScoringRule::ThetaZero, {});
  EXPECT_TRUE(d.bicliques.empty());
  EXPECT_EQ(d.dropped.size(), 5u);
  EXPECT_TRUE(decomposition_summary(g, d).empty());
  EXPECT_TRUE(is_partition(d));
  EXPECT_THROW(find_owner(d, 0), UntestableError);
}

TEST(Decompose, BitsetScoreMatchesViewScore) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = generate_random_graph(40, 40, 0.8, 0.05 + 0.015 * seed, seed);
    const auto cands = enumerate_maximal(g, {3, 3, 200});
    for (const auto& c : cands) {
      const double view = theta_zero(SignedAssignmentView::from_biclique(g, c));
      EXPECT_NEAR(biclique_theta_zero(g, c), view, 1e-12);
    }
  }
}

TEST(Decompose, PartitionAndBicliquesOfOriginalGraph) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto g = generate_random_graph(60, 60, seed % 2 ? 0.8 : 0.9, 0.1, seed);
    for (auto rule : {ScoringRule::EdgeCount, ScoringRule::ThetaZero}) {
      const auto d = decompose(g, rule, {4, 4, 300});
      EXPECT_TRUE(is_partition(d));
      for (std::size_t b = 0; b < d.bicliques.size(); ++b) {
        const auto& c = d.bicliques[b];
        EXPECT_TRUE(is_biclique(g, c));
        EXPECT_GE(c.units.size(), 4u);
        EXPECT_GE(c.assignments.size(), 4u);
        for (auto k : c.assignments) EXPECT_EQ(&find_owner(d, k), &d.bicliques[b]);
      }
      for (auto k : d.dropped) EXPECT_THROW(find_owner(d, k), UntestableError);
    }
  }
}

TEST(Decompose, ThetaSelectionDominatesOnEachCandidateList) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = generate_random_graph(50, 50, 0.85, seed % 2 ? 0.1 : 0.01, seed);
    const auto cands = enumerate_maximal(g, {3, 3, 500});
    if (cands.empty()) continue;
    const auto scores = score_candidates(g, cands);
    const auto t = select_best(cands, scores, ScoringRule::ThetaZero);
    const auto e = select_best(cands, scores, ScoringRule::EdgeCount);
    EXPECT_GE(scores[t].theta_zero, scores[e].theta_zero);
    EXPECT_GE(scores[e].edges, scores[t].edges);
  }
}

TEST(Decompose, TieBreaks) {
  const std::vector<Biclique> c{{{1}, {0}}, {{0}, {1}}, {{0, 1}, {2}}};
  const std::vector<CandidateScore> s{{1.0, 2}, {1.0, 2}, {0.5, 2}};
  // Equal on both scores: lexicographically smallest wins.
  EXPECT_EQ(select_best(c, s, ScoringRule::ThetaZero), 1u);
  EXPECT_EQ(select_best(c, s, ScoringRule::EdgeCount), 1u);
  const std::vector<CandidateScore> s2{{1.0, 3}, {1.0, 2}, {2.0, 3}};
  EXPECT_EQ(select_best(c, s2, ScoringRule::ThetaZero), 2u);
  EXPECT_EQ(select_best(c, s2, ScoringRule::EdgeCount), 2u);
}

TEST(Decompose, SerialAndParallelScoringAgree) {
  set_worker_count(4);
  const auto g = generate_random_graph(80, 80, 0.85, 0.05, 77);
  const EnumerationConfig cfg{5, 5, 400};
  const auto a = decompose(g, ScoringRule::ThetaZero, cfg, Exec::Serial);
  const auto b = decompose(g, ScoringRule::ThetaZero, cfg, Exec::Parallel);
  EXPECT_EQ(a.bicliques, b.bicliques);
  EXPECT_EQ(a.dropped, b.dropped);
}

TEST(Decompose, CapOneTakesFirstEnumeratedEachRound) {
  const auto g = generate_random_graph(30, 30, 0.8, 0.2, 3);
  const EnumerationConfig cfg{3, 3, 1};
  const auto d = decompose(g, ScoringRule::ThetaZero, cfg);
  EXPECT_TRUE(is_partition(d));
  ASSERT_FALSE(d.bicliques.empty());
  EXPECT_EQ(d.bicliques.front(), enumerate_maximal(g, cfg).front());
}

TEST(FindOwner, ExplicitPartition) {
  BicliqueDecomposition d;
  d.n_assignments = 4;
  d.bicliques = {{{0}, {0, 2}}, {{1}, {1, 3}}};
  d.owner = {0, 1, 0, 1};
  EXPECT_TRUE(is_partition(d));
  EXPECT_EQ(&find_owner(d, 2), &d.bicliques[0]);
  EXPECT_THROW(find_owner(d, 4), UntestableError);
  d.owner[3] = std::nullopt;
  EXPECT_FALSE(is_partition(d));
}

TEST(DecompositionJson, RoundTrip) {
  const auto g = generate_random_graph(30, 30, 0.8, 0.3, 9);
  const auto d = decompose(g, ScoringRule::ThetaZero, {3, 3, 100});
  const auto path = std::filesystem::temp_directory_path() / "bct_decomposition.json";
  write_decomposition_json(d, path);
  const auto back = read_decomposition_json(path);
  EXPECT_EQ(back.bicliques, d.bicliques);
  EXPECT_EQ(back.owner, d.owner);
  EXPECT_EQ(back.dropped, d.dropped);
  const auto csv = summary_csv(decomposition_summary(g, d));
  EXPECT_EQ(csv.rfind("biclique,units,assignments,edges,p_hat,rho_hat,theta_zero\n", 0), 0u);
}

TEST(ScoringRule, Parse) {
  EXPECT_EQ(parse_scoring_rule("theta"), ScoringRule::ThetaZero);
  EXPECT_EQ(parse_scoring_rule("edges"), ScoringRule::EdgeCount);
  EXPECT_THROW(parse_scoring_rule("bogus"), InputError);
}
