#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <vector>

#include "bct/design.hpp"
#include "bct/error.hpp"
#include "bct/rng.hpp"

using namespace bct;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("bct_design_" + name);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(AssignmentSet, ValidatesInvariants) {
  using V = std::vector<std::vector<std::uint8_t>>;
  EXPECT_NO_THROW(AssignmentSet(3, V{{1, 0, 0}, {0, 1, 1}}));
  EXPECT_THROW(AssignmentSet(3, V{{1, 0}, {0, 1, 1}}), InputError);
  EXPECT_THROW(AssignmentSet(3, V{{1, 0, 0}, {1, 0, 0}}), InputError);
  EXPECT_THROW(AssignmentSet(3, V{{1, 0, 2}}), InputError);
  EXPECT_THROW(AssignmentSet(3, V{{1, 0, 0}, {0, 1, 1}}, {0.5, 0.4}), InputError);
  EXPECT_THROW(AssignmentSet(3, V{{1, 0, 0}, {0, 1, 1}}, {1.0, 0.0}), InputError);
  const AssignmentSet s(3, V{{1, 0, 0}, {0, 1, 1}}, {0.25, 0.75});
  EXPECT_EQ(s.treated_count(1), 2u);
  EXPECT_EQ(s.at(0, 0), 1);
}

TEST(ExposureMapping, SpatialThreeUnitExample) {
  SpatialLayout layout{{{0, 0}, {0, 0.5}, {0, 2}}, 1.0};
  const auto f = ExposureMapping::spatial(layout);
  const std::vector<std::uint8_t> z{1, 0, 0};
  EXPECT_EQ(f.exposure_of(0, z), 2);
  EXPECT_EQ(f.exposure_of(1, z), 1);
  EXPECT_EQ(f.exposure_of(2, z), 0);
}

TEST(ExposureMapping, SpatialAllControlIsZero) {
  SpatialLayout layout{{{0, 0}, {0, 0.1}, {0.1, 0}}, 1.0};
  const auto f = ExposureMapping::spatial(layout);
  const std::vector<std::uint8_t> z{0, 0, 0};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(f.exposure_of(i, z), 0);
}

TEST(ExposureMapping, DistanceExactlyRadiusCountsAsInRange) {
  SpatialLayout layout{{{0, 0}, {3, 4}}, 5.0};
  const auto f = ExposureMapping::spatial(layout);
  EXPECT_EQ(f.exposure_of(1, std::vector<std::uint8_t>{1, 0}), 1);
}

TEST(ExposureMapping, FarUnitsDoNotMatter) {
  // Unit 0 has no treated unit in range; toggling far units keeps f = 0.
  SpatialLayout layout{{{0, 0}, {5, 0}, {0, 7}, {0.5, 0}}, 1.0};
  const auto f = ExposureMapping::spatial(layout);
  for (std::uint8_t a : {0, 1})
    for (std::uint8_t b : {0, 1}) EXPECT_EQ(f.exposure_of(0, std::vector<std::uint8_t>{0, a, b, 0}), 0);
}

TEST(ExposureMapping, NoInterferenceAndErrors) {
  const auto f = ExposureMapping::no_interference();
  EXPECT_EQ(f.exposure_of(1, std::vector<std::uint8_t>{0, 1}), 1);
  EXPECT_THROW(f.exposure_of(2, std::vector<std::uint8_t>{0, 1}), InputError);
  EXPECT_THROW(ExposureMapping::spatial({{{0, 0}}, 0.0}), InputError);
  EXPECT_THROW(ExposureMapping::table_backed(2, 1, {0, 5}, {0, 1}), InputError);
}

TEST(ExposureMapping, TableBacked) {
  const AssignmentSet design(2, {{1, 0}, {0, 1}});
  const auto f = ExposureMapping::table_backed(2, 2, {3, 4, 4, 3}, {3, 4});
  EXPECT_EQ(f.exposures(design, 0), (std::vector<Exposure>{3, 4}));
  EXPECT_EQ(f.exposure_of(design, 0, 1), 4);
}

TEST(Contrast, Validation) {
  const std::vector<Exposure> alphabet{0, 1, 2};
  EXPECT_NO_THROW((ContrastHypothesis{1, 0}.validate(alphabet)));
  EXPECT_THROW((ContrastHypothesis{1, 1}.validate(alphabet)), InputError);
  EXPECT_THROW((ContrastHypothesis{3, 0}.validate(alphabet)), InputError);
}

TEST(BernoulliAssignments, DeterministicAndValid) {
  const auto a = generate_bernoulli_assignments(5, 3, 0.5, 11);
  const auto b = generate_bernoulli_assignments(5, 3, 0.5, 11);
  EXPECT_EQ(a, b);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = generate_bernoulli_assignments(6, 20, 0.3, seed);
    std::set<std::vector<std::uint8_t>> distinct;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto t = s.treated_count(k);
      EXPECT_GT(t, 0u);
      EXPECT_LT(t, 6u);
      const auto z = s.assignment(k);
      distinct.emplace(z.begin(), z.end());
      EXPECT_DOUBLE_EQ(s.probs()[k], 1.0 / 20.0);
    }
    EXPECT_EQ(distinct.size(), 20u);
  }
}

TEST(BernoulliAssignments, TreatedFractionWithinBinomialBand) {
  const auto s = generate_bernoulli_assignments(200, 50, 0.2, 5);
  // sd of one column's fraction: sqrt(0.2 * 0.8 / 200) = 0.028. Per-column
  // band is 5 sd; the mean over 50 columns gets a 3 sd band.
  double total = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double frac = static_cast<double>(s.treated_count(k)) / 200.0;
    EXPECT_NEAR(frac, 0.2, 0.142);
    total += frac;
  }
  EXPECT_NEAR(total / 50.0, 0.2, 3 * 0.0283 / std::sqrt(50.0));
}

TEST(BernoulliAssignments, ErrorsOnBadInputAndExhaustion) {
  EXPECT_THROW(generate_bernoulli_assignments(5, 3, 0.0, 1), InputError);
  EXPECT_THROW(generate_bernoulli_assignments(5, 3, 1.0, 1), InputError);
  // Only 2^2 - 2 = 2 non-constant vectors exist over two units.
  EXPECT_THROW(generate_bernoulli_assignments(2, 3, 0.5, 1), GenerationError);
}

TEST(SpatialLayout, MixtureAndDegenerateCluster) {
  const auto clusters = three_blob_clusters();
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.count;
  EXPECT_EQ(total, 1000u);
  const auto layout = generate_spatial_layout(clusters, 0.01, 3);
  EXPECT_EQ(layout.coords.size(), 1000u);
  EXPECT_EQ(layout.coords, generate_spatial_layout(clusters, 0.01, 3).coords);

  const std::vector<Cluster> origin{{4, {0, 0}, 0.0}};
  const auto pts = generate_spatial_layout(origin, 1.0, 9);
  ASSERT_EQ(pts.coords.size(), 4u);
  for (const auto& p : pts.coords) EXPECT_EQ(p, (Point{0, 0}));

  const std::vector<Cluster> bad{{4, {0, 0}, -1.0}};
  EXPECT_THROW(generate_spatial_layout(bad, 1.0, 9), InputError);

  std::size_t scaled = 0;
  for (const auto& c : scaled_mixture_clusters(300)) scaled += c.count;
  EXPECT_EQ(scaled, 300u);
}

TEST(Outcomes, ShiftAndNullIndependence) {
  OutcomeModel model;
  model.tau = 0.5;
  const std::vector<Exposure> all_a(50, 1), all_b(50, 0);
  const std::vector<Exposure> alphabet{0, 1, 2};
  const ContrastHypothesis hyp{1, 0};
  const auto ya = draw_outcomes(model, all_a, hyp, alphabet, 17);
  const auto yb = draw_outcomes(model, all_b, hyp, alphabet, 17);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_DOUBLE_EQ(ya[i] - yb[i], 0.5);

  model.tau = 0.0;
  EXPECT_EQ(draw_outcomes(model, all_a, hyp, alphabet, 17),
            draw_outcomes(model, all_b, hyp, alphabet, 17));

  const std::vector<Exposure> bad(50, 7);
  EXPECT_THROW(draw_outcomes(model, bad, hyp, alphabet, 1), InputError);
}

TEST(Outcomes, ExponentialMean) {
  OutcomeModel model;
  model.base_dist = BaseDistribution::Exponential;
  model.base_mean = 1.0;
  Rng rng(5);
  const auto y = draw_base_outcomes(model, 100000, rng);
  double s = 0;
  for (double v : y) s += v;
  EXPECT_NEAR(s / 100000.0, 1.0, 0.01);
}

TEST(OutcomeModel, Validation) {
  OutcomeModel m;
  m.base_sd = 0.0;
  EXPECT_THROW(m.validate(), InputError);
}

TEST(DesignFiles, RoundTrip) {
  const auto dir = temp_dir("roundtrip");
  const auto s = generate_bernoulli_assignments(7, 4, 0.4, 2);
  write_assignments_csv(s, dir / "assignments.csv");
  EXPECT_EQ(read_assignments_csv(dir / "assignments.csv"), s);

  const auto layout = generate_spatial_layout(scaled_mixture_clusters(20), 0.05, 4);
  write_layout_csv(layout, dir / "layout.csv");
  const auto back = read_layout_csv(dir / "layout.csv", 0.05);
  EXPECT_EQ(back.coords, layout.coords);

  DesignMeta meta{7, 4, 0.4, 2, 0.05};
  write_design_json(meta, dir / "design.json");
  const auto m2 = read_design_json(dir / "design.json");
  EXPECT_EQ(m2.n_units, 7u);
  EXPECT_EQ(m2.m, 4u);
  EXPECT_EQ(m2.p, 0.4);
  EXPECT_EQ(m2.seed, 2u);
  EXPECT_EQ(m2.radius, 0.05);
}
