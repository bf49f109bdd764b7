#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "bct/crt.hpp"
#include "bct/error.hpp"
#include "bct/rng.hpp"

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

BicliqueDecomposition single(const NullExposureGraph& g) {
  return decompose(g, ScoringRule::EdgeCount, {});
}

}  // namespace

TEST(RestrictedDiffMeans, Examples) {
  const ContrastHypothesis hyp{1, 0};
  const std::vector<std::size_t> u{0, 1, 2};
  EXPECT_DOUBLE_EQ(restricted_diff_means(std::vector<Exposure>{1, 1, 0},
                                         std::vector<double>{1, 2, 3}, u, hyp),
                   -1.5);
  EXPECT_EQ(restricted_diff_means(std::vector<Exposure>{1, 1, 1}, std::vector<double>{1, 2, 3}, u,
                                  hyp),
            0.0);
  EXPECT_EQ(restricted_diff_means(std::vector<Exposure>{1, 0, 0}, std::vector<double>{4, 4, 4}, u,
                                  hyp),
            0.0);
  EXPECT_THROW(restricted_diff_means(std::vector<Exposure>{1, 2, 0},
                                     std::vector<double>{1, 2, 3}, u, hyp),
               InputError);
}

TEST(BicliqueTest, StrictlyLargestGivesOneQuarter) {
  // Four assignments; unit 0 is a only under assignment 0.
  const auto g = from_rows({"abbb", "babb", "bbab"});
  const auto d = single(g);
  ASSERT_EQ(d.bicliques.size(), 1u);
  const std::vector<double> y{10, 0, 1};
  const auto r = biclique_test(g, d, 0, y);
  EXPECT_EQ(r.null_stats.size(), 4u);
  EXPECT_DOUBLE_EQ(r.p_value, 0.25);
  EXPECT_EQ(r.method, PValueMethod::Exact);
}

TEST(BicliqueTest, ConstantOutcomesGiveOne) {
  const auto g = from_rows({"abab", "baab", "bbba"});
  const auto d = single(g);
  const std::vector<double> y{0.1, 0.1, 0.1};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(biclique_test(g, d, k, y).p_value, 1.0);
}

TEST(BicliqueTest, PValueOnGridAndCountsTies) {
  Rng rng(5);
  const auto g = generate_random_graph(12, 12, 1.0, 0.4, 3);
  const auto d = single(g);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> y(12);
    for (auto& v : y) v = std::round(rng.normal() * 2) / 2;
    const auto k = static_cast<std::size_t>(rng.below(12));
    const auto r = biclique_test(g, d, k, y);
    const double scaled = r.p_value * 12;
    EXPECT_NEAR(scaled, std::round(scaled), 1e-9);
    EXPECT_GE(r.p_value, 1.0 / 12.0);
    EXPECT_LE(r.p_value, 1.0);
    std::size_t ge = 0;
    for (double t : r.null_stats) ge += t >= r.t_obs - 1e-9 * (1 + std::abs(r.t_obs));
    EXPECT_DOUBLE_EQ(r.p_value, static_cast<double>(ge) / 12.0);
  }
}

TEST(BicliqueTest, UntestableAndBadInput) {
  const auto g = from_rows({"ab.", "ba."});
  const auto d = decompose(g, ScoringRule::EdgeCount, {});
  ASSERT_EQ(d.dropped, (std::vector<std::size_t>{2}));
  EXPECT_THROW(biclique_test(g, d, 2, std::vector<double>{1, 2}), UntestableError);
  EXPECT_THROW(biclique_test(g, d, 0, std::vector<double>{1}), InputError);
}

TEST(BicliqueTest, PermutingUnitsLeavesPValue) {
  const auto g = generate_random_graph(10, 15, 0.9, 0.3, 8);
  const auto d = decompose(g, ScoringRule::ThetaZero, {2, 2, 100});
  std::vector<std::size_t> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::vector<EdgeLabel> labels(10 * 15);
  for (std::size_t k = 0; k < 15; ++k)
    for (std::size_t i = 0; i < 10; ++i) labels[k * 10 + perm[i]] = g.label(i, k);
  const NullExposureGraph gp(10, 15, labels, g.hypothesis());
  BicliqueDecomposition dp = d;
  for (auto& c : dp.bicliques) {
    for (auto& u : c.units) u = perm[u];
    std::sort(c.units.begin(), c.units.end());
  }
  Rng rng(2);
  std::vector<double> y(10), yp(10);
  for (std::size_t i = 0; i < 10; ++i) yp[perm[i]] = y[i] = rng.normal();
  for (std::size_t k = 0; k < 15; ++k) {
    if (!d.owner[k]) continue;
    EXPECT_EQ(biclique_test(g, d, k, y).p_value, biclique_test(gp, dp, k, yp).p_value);
  }
}

TEST(BicliqueTest, MonteCarloMode) {
  const auto g = generate_random_graph(10, 40, 1.0, 0.5, 1);
  const auto d = single(g);
  Rng rng(3);
  std::vector<double> y(10);
  for (auto& v : y) v = rng.normal();
  TestOptions opts;
  opts.mc_samples = 20000;
  opts.seed = 4;
  const auto mc = biclique_test(g, d, 5, y, opts);
  const auto exact = biclique_test(g, d, 5, y);
  EXPECT_EQ(mc.method, PValueMethod::MonteCarlo);
  EXPECT_NEAR(mc.p_value, exact.p_value, 0.02);
  EXPECT_GT(mc.p_value, 0.0);
}

TEST(BicliqueTest, SerialEqualsParallel) {
  set_worker_count(4);
  const auto g = generate_random_graph(30, 100, 1.0, 0.3, 2);
  const auto d = single(g);
  std::vector<double> y(30);
  Rng rng(1);
  for (auto& v : y) v = rng.normal();
  TestOptions s, p;
  s.exec = Exec::Serial;
  p.exec = Exec::Parallel;
  const auto a = biclique_test(g, d, 3, y, s), b = biclique_test(g, d, 3, y, p);
  EXPECT_EQ(a.null_stats, b.null_stats);
  EXPECT_EQ(a.p_value, b.p_value);
}

TEST(ClassicalTest, Examples) {
  // m = 2 with T(z1) > T(z2).
  const AssignmentSet design(2, {{1, 0}, {0, 1}});
  const auto r = classical_randomization_test(design, std::vector<double>{1, 0}, 0);
  EXPECT_EQ(r.null_stats[0], 1.0);
  EXPECT_EQ(r.null_stats[1], -1.0);
  EXPECT_EQ(r.p_value, 0.5);
  const auto design3 = generate_bernoulli_assignments(9, 12, 0.4, 2);
  EXPECT_EQ(classical_randomization_test(design3, std::vector<double>(9, 0.3), 4).p_value, 1.0);
}

TEST(ClassicalTest, DegenerateAssignmentIsAnError) {
  const AssignmentSet design(2, {{1, 1}, {0, 1}});
  EXPECT_THROW(classical_randomization_test(design, std::vector<double>{1, 0}, 1),
               DegenerateColumnError);
}

TEST(ClassicalTest, WeightedDesign) {
  const AssignmentSet design(2, {{1, 0}, {0, 1}}, {0.25, 0.75});
  // Observed is the smaller statistic, so both assignments count.
  EXPECT_EQ(classical_randomization_test(design, std::vector<double>{1, 0}, 1).p_value, 1.0);
  EXPECT_EQ(classical_randomization_test(design, std::vector<double>{1, 0}, 0).p_value, 0.25);
}

TEST(ClassicalTest, NullLevel) {
  const auto design = generate_bernoulli_assignments(30, 40, 0.5, 6);
  Rng root(7);
  std::size_t rejections = 0;
  const std::size_t reps = 1000;
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng = root.stream(r);
    std::vector<double> y(30);
    for (auto& v : y) v = rng.normal();
    rejections += classical_randomization_test(design, y, rng.below(40), 0.05).reject;
  }
  const double rate = static_cast<double>(rejections) / reps;
  EXPECT_LE(rate, 0.05 + 3 * std::sqrt(0.05 * 0.95 / reps));
}

TEST(Report, JsonShape) {
  const auto g = from_rows({"abbb", "babb", "bbab"});
  const auto r = biclique_test(g, single(g), 0, std::vector<double>{10, 0, 1});
  const auto j = report_json(r);
  for (const char* key : {"\"biclique\"", "\"units\"", "\"assignments\"", "\"t_obs\"",
                          "\"p_value\"", "\"method\"", "\"n_null\""})
    EXPECT_NE(j.find(key), std::string::npos) << key;
}
