#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bct/error.hpp"
#include "bct/negraph.hpp"
#include "bct/power.hpp"
#include "bct/rng.hpp"

using namespace bct;

namespace {

using Cols = std::vector<std::vector<std::int8_t>>;

// The 3 x 4 biclique used as the worked example for Theta-hat-zero:
//   a b b a / a b a b / b a b b  (rows are units).
SignedAssignmentView worked_example() {
  return SignedAssignmentView(3, Cols{{1, 1, -1}, {-1, -1, 1}, {-1, 1, -1}, {1, -1, -1}});
}

/// Direct O(m^2 N) evaluation of rho-hat over ordered non-degenerate pairs.
double rho_oracle(const SignedAssignmentView& v) {
  std::vector<std::vector<double>> zt;
  std::vector<std::size_t> usable;
  for (std::size_t k = 0; k < v.n_columns(); ++k) {
    if (v.degenerate(k)) continue;
    usable.push_back(k);
    zt.push_back(ztilde(v.column(k)));
  }
  if (usable.size() < 2) return 0.0;
  double s = 0;
  for (std::size_t a = 0; a < usable.size(); ++a)
    for (std::size_t b = 0; b < usable.size(); ++b) {
      if (a == b) continue;
      const auto z = v.column(usable[b]);
      for (std::size_t i = 0; i < v.n_units(); ++i) s += zt[a][i] * z[i] / 2.0;
    }
  const double mm = static_cast<double>(usable.size());
  return std::max(s / (mm * (mm - 1)), 0.0);
}

SignedAssignmentView random_view(std::size_t n, std::size_t m, double p, std::uint64_t seed) {
  Rng rng(seed);
  Cols cols(m, std::vector<std::int8_t>(n));
  for (auto& c : cols)
    for (auto& x : c) x = rng.bernoulli(p) ? 1 : -1;
  return SignedAssignmentView(n, cols);
}

}  // namespace

TEST(Ztilde, Examples) {
  const std::vector<std::int8_t> z{1, 1, -1};
  const auto t = ztilde(z);
  EXPECT_DOUBLE_EQ(t[0], 0.5);
  EXPECT_DOUBLE_EQ(t[1], 0.5);
  EXPECT_DOUBLE_EQ(t[2], -1.0);
  const auto b = ztilde(std::vector<std::int8_t>{1, -1, 1, -1});
  for (double x : b) EXPECT_DOUBLE_EQ(std::abs(x), 0.5);
  EXPECT_THROW(ztilde(std::vector<std::int8_t>{1, 1}), DegenerateColumnError);
}

TEST(Ztilde, SumZeroAndDotTwoForRandomInputs) {
  Rng rng(3);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 2 + rng.below(40);
    std::vector<std::int8_t> z(n);
    for (auto& x : z) x = rng.bernoulli(0.4) ? 1 : -1;
    z[0] = 1;
    z[1] = -1;
    const auto t = ztilde(z);
    double sum = 0, dot = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += t[i];
      dot += t[i] * z[i];
    }
    EXPECT_NEAR(sum, 0.0, 1e-12);
    EXPECT_NEAR(dot, 2.0, 1e-12);
  }
}

TEST(EstimatePRho, WorkedExample) {
  const auto est = estimate_p_rho(worked_example());
  EXPECT_EQ(est.p_hat, 5.0 / 12.0);
  EXPECT_EQ(est.rho_hat, 0.0);
  // Unclipped value is -1/4.
  EXPECT_NEAR(theta_zero(worked_example()), std::sqrt(3.0 * 5.0 / 12.0 * 7.0 / 12.0), 1e-12);
  EXPECT_NEAR(theta_zero(worked_example()), 0.8539, 1e-4);
}

TEST(EstimatePRho, IdenticalColumnsGiveOne) {
  const SignedAssignmentView v(4, Cols(5, {1, -1, -1, 1}));
  EXPECT_DOUBLE_EQ(estimate_p_rho(v).rho_hat, 1.0);
  EXPECT_DOUBLE_EQ(theta_zero(v), 0.0);
}

TEST(EstimatePRho, MatchesDirectOracle) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto v = random_view(2 + seed % 17, 2 + seed % 13, 0.1 + 0.004 * seed, seed);
    const auto est = estimate_p_rho(v);
    EXPECT_NEAR(est.rho_hat, rho_oracle(v), 1e-12) << seed;
    double p = 0;
    for (std::size_t k = 0; k < v.n_columns(); ++k)
      p += static_cast<double>(v.plus_count(k)) / static_cast<double>(v.n_units());
    EXPECT_NEAR(est.p_hat, p / static_cast<double>(v.n_columns()), 1e-12);
  }
}

TEST(EstimatePRho, DegenerateColumns) {
  // One usable column: rho defaults to 0.
  const SignedAssignmentView v(3, Cols{{1, 1, 1}, {1, -1, -1}, {-1, -1, -1}});
  const auto est = estimate_p_rho(v);
  EXPECT_TRUE(est.rho_defaulted);
  EXPECT_EQ(est.usable_columns, 1u);
  EXPECT_DOUBLE_EQ(est.p_hat, (1.0 + 1.0 / 3.0 + 0.0) / 3.0);
  const SignedAssignmentView all(2, Cols{{1, 1}, {-1, -1}});
  EXPECT_EQ(theta_zero(all), 0.0);
}

TEST(Hadamard, OrthogonalBalancedColumns) {
  for (std::size_t n : {4u, 16u, 32u, 64u}) {
    const auto h = hadamard_design(n);
    EXPECT_EQ(h.n_columns(), n - 1);
    const auto est = estimate_p_rho(h);
    EXPECT_EQ(est.p_hat, 0.5);
    EXPECT_NEAR(est.rho_hat, 0.0, 1e-15);
    // z~_k . z~_l = 1/(N p (1-p)) for k = l and rho/(N p (1-p)) = 0 otherwise.
    for (std::size_t k = 0; k < std::min<std::size_t>(h.n_columns(), 6); ++k) {
      const auto a = ztilde(h.column(k));
      for (std::size_t l = 0; l < std::min<std::size_t>(h.n_columns(), 6); ++l) {
        const auto b = ztilde(h.column(l));
        double dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += a[i] * b[i];
        EXPECT_NEAR(dot, k == l ? 4.0 / static_cast<double>(n) : 0.0, 1e-12);
      }
    }
  }
  EXPECT_THROW(hadamard_design(12), InputError);
}

TEST(ThetaHat, Arithmetic) {
  PowerInputs in{100, 10, 0.5, 0.0, 0.5, 1.0, 0.05};
  EXPECT_DOUBLE_EQ(theta_hat(in), 2.5);
  in.rho_hat = 1.0;
  EXPECT_DOUBLE_EQ(theta_hat(in), 0.0);
  in.p_hat = 1.0;
  EXPECT_THROW(theta_hat(in), InputError);
}

TEST(PowerFormula, NullLevelIsFloorOverM) {
  for (std::size_t m : {20u, 30u, 40u, 60u, 100u, 37u}) {
    const double expected =
        static_cast<double>(rejection_budget(m, 0.05)) / static_cast<double>(m);
    EXPECT_NEAR(power_formula(0.0, m, 0.05), expected, 1e-6) << m;
    EXPECT_LE(power_formula(0.0, m, 0.05), 0.05 + 1e-9);
  }
  EXPECT_NEAR(power_formula(0.0, 30, 0.05), 1.0 / 30.0, 1e-6);
}

TEST(PowerFormula, ZeroBudgetAndErrors) {
  EXPECT_EQ(power_formula(3.0, 15, 0.05), 0.0);
  EXPECT_EQ(rejection_budget(20, 0.05), 1u);
  EXPECT_EQ(rejection_budget(100, 0.05), 5u);
  EXPECT_THROW(power_formula(1.0, 1, 0.05), InputError);
  EXPECT_THROW(power_formula(1.0, 20, 1.5), InputError);
  EXPECT_THROW(power_formula(std::nan(""), 20, 0.05), InputError);
}

TEST(PowerFormula, MonotoneInThetaAndM) {
  double prev = -1;
  for (int i = 0; i <= 20; ++i) {
    const double v = power_formula(0.25 * i, 100, 0.05);
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = -1;
  for (std::size_t m : {20u, 40u, 60u, 80u, 100u}) {
    const double v = power_formula(1.0, m, 0.05);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(power_formula(50.0, 20, 0.05), 1.0, 1e-9);
}

TEST(McOracle, AgreesWithFormula) {
  for (double theta : {0.0, 1.0, 3.0}) {
    for (std::size_t m : {20u, 100u}) {
      const auto mc = mc_power_oracle(theta, m, 0.05, 200000, 11);
      EXPECT_NEAR(mc.estimate, power_formula(theta, m, 0.05), 4 * mc.se + 1e-9)
          << theta << " " << m;
    }
  }
  EXPECT_EQ(mc_power_oracle(50.0, 20, 0.05, 1000, 1).estimate, 1.0);
}

TEST(McOracle, DeterministicAcrossExecution) {
  set_worker_count(3);
  const auto a = mc_power_oracle(1.0, 40, 0.05, 20000, 5, Exec::Serial);
  const auto b = mc_power_oracle(1.0, 40, 0.05, 20000, 5, Exec::Parallel);
  EXPECT_EQ(a.estimate, b.estimate);
}

TEST(EmpiricalPower, NullLevel) {
  const auto v = random_view(40, 40, 0.4, 8);
  for (std::size_t k = 0; k < v.n_columns(); ++k) ASSERT_FALSE(v.degenerate(k));
  OutcomeModel model;
  const auto est = empirical_average_power(v, model, 0.05, 300, 2);
  EXPECT_LE(est.estimate, 0.05 + 3 * est.se);
}

TEST(EmpiricalPower, HadamardMatchesFormula) {
  const auto h = hadamard_design(32);
  OutcomeModel model;
  model.tau = 0.5;
  const auto est = empirical_average_power(h, model, 0.05, 2000, 3);
  const double theta = 0.5 * std::sqrt(32 * 0.25);
  EXPECT_NEAR(est.estimate, power_formula(theta, 31, 0.05), 3.5 * est.se);
}

TEST(EmpiricalPower, SerialEqualsParallelAndRejectsDegenerate) {
  set_worker_count(4);
  const auto v = random_view(20, 20, 0.5, 9);
  OutcomeModel model;
  model.tau = 0.3;
  const auto a = empirical_average_power(v, model, 0.05, 50, 4, Exec::Serial);
  const auto b = empirical_average_power(v, model, 0.05, 50, 4, Exec::Parallel);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.se, b.se);
  const SignedAssignmentView bad(2, Cols{{1, 1}, {1, -1}});
  EXPECT_THROW(empirical_average_power(bad, model, 0.05, 5, 1), DegenerateColumnError);
}

TEST(SignedView, FromBicliqueMapsAToPlus) {
  std::vector<EdgeLabel> labels{EdgeLabel::A, EdgeLabel::B, EdgeLabel::B, EdgeLabel::None};
  const NullExposureGraph g(2, 2, labels, {1, 0});
  const auto v = SignedAssignmentView::from_biclique(g, {{0, 1}, {0}});
  EXPECT_EQ(v.column(0)[0], 1);
  EXPECT_EQ(v.column(0)[1], -1);
  EXPECT_THROW(SignedAssignmentView::from_biclique(g, {{0, 1}, {0, 1}}), InputError);
}
