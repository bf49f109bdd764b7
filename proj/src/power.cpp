#include "bct/power.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "bct/error.hpp"
#include "bct/rng.hpp"

namespace bct {

SignedAssignmentView::SignedAssignmentView(std::size_t n_units,
                                           std::vector<std::vector<std::int8_t>> columns)
    : n_units_(n_units) {
  if (n_units == 0) throw InputError("signed view needs at least one unit");
  data_.reserve(n_units * columns.size());
  plus_.reserve(columns.size());
  for (const auto& col : columns) {
    if (col.size() != n_units) throw InputError("signed column has wrong length");
    std::size_t plus = 0;
    for (auto v : col) {
      if (v != 1 && v != -1) throw InputError("signed entries must be +1 or -1");
      plus += v == 1;
    }
    plus_.push_back(plus);
    data_.insert(data_.end(), col.begin(), col.end());
  }
}

SignedAssignmentView SignedAssignmentView::from_design(const AssignmentSet& design) {
  std::vector<std::vector<std::int8_t>> cols(design.size(),
                                             std::vector<std::int8_t>(design.n_units()));
  for (std::size_t k = 0; k < design.size(); ++k)
    for (std::size_t i = 0; i < design.n_units(); ++i)
      cols[k][i] = design.at(i, k) ? 1 : -1;
  return SignedAssignmentView(design.n_units(), std::move(cols));
}

SignedAssignmentView SignedAssignmentView::from_biclique(const NullExposureGraph& g,
                                                         const Biclique& c) {
  if (!is_biclique(g, c)) throw InputError("not a biclique of the graph");
  std::vector<std::vector<std::int8_t>> cols(c.assignments.size(),
                                             std::vector<std::int8_t>(c.units.size()));
  for (std::size_t k = 0; k < c.assignments.size(); ++k) {
    const BitSet& a = g.a_mask(c.assignments[k]);
    for (std::size_t i = 0; i < c.units.size(); ++i) cols[k][i] = a.test(c.units[i]) ? 1 : -1;
  }
  return SignedAssignmentView(c.units.size(), std::move(cols));
}

std::size_t SignedAssignmentView::degenerate_count() const {
  std::size_t d = 0;
  for (std::size_t k = 0; k < n_columns(); ++k) d += degenerate(k);
  return d;
}

std::vector<double> ztilde(std::span<const std::int8_t> z) {
  std::size_t plus = 0;
  for (auto v : z) plus += v == 1;
  const std::size_t minus = z.size() - plus;
  if (plus == 0 || minus == 0)
    throw DegenerateColumnError("z-tilde undefined for a single-sign assignment");
  std::vector<double> out(z.size());
  const double up = 1.0 / static_cast<double>(plus);
  const double down = -1.0 / static_cast<double>(minus);
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] == 1 ? up : down;
  return out;
}

PRhoEstimate estimate_p_rho(const SignedAssignmentView& view) {
  PRhoEstimate est;
  const std::size_t n = view.n_units();
  const std::size_t m = view.n_columns();
  if (m == 0) throw InputError("estimate_p_rho needs at least one column");

  // Every column has n entries, so the mean fraction is one exact ratio.
  std::size_t plus_total = 0;
  for (std::size_t k = 0; k < m; ++k) plus_total += view.plus_count(k);
  est.p_hat = static_cast<double>(plus_total) / (static_cast<double>(n) * static_cast<double>(m));

  // sum_{k != l} zt_l . z_k = sum_l zt_l . S - sum_l zt_l . z_l, with
  // S = sum_k z_k over usable columns and zt_l . z_l = 2.
  std::vector<long long> col_sum(n, 0);
  std::size_t usable = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (view.degenerate(k)) continue;
    ++usable;
    const auto z = view.column(k);
    for (std::size_t i = 0; i < n; ++i) col_sum[i] += z[i];
  }
  est.usable_columns = usable;
  if (usable < 2) {
    est.rho_hat = 0.0;
    est.rho_defaulted = true;
    return est;
  }
  std::vector<double> terms;
  terms.reserve(usable);
  for (std::size_t l = 0; l < m; ++l) {
    if (view.degenerate(l)) continue;
    const auto z = view.column(l);
    const double plus = static_cast<double>(view.plus_count(l));
    const double minus = static_cast<double>(n - view.plus_count(l));
    long long s_plus = 0, s_minus = 0;
    for (std::size_t i = 0; i < n; ++i) (z[i] == 1 ? s_plus : s_minus) += col_sum[i];
    terms.push_back(static_cast<double>(s_plus) / plus - static_cast<double>(s_minus) / minus -
                    2.0);
  }
  const double pairs = static_cast<double>(usable) * static_cast<double>(usable - 1);
  est.rho_hat = std::max(pairwise_sum(terms) / (2.0 * pairs), 0.0);
  return est;
}

void PowerInputs::validate() const {
  if (n_units == 0 || n_assignments == 0) throw InputError("N and m must be positive");
  if (!(p_hat > 0.0 && p_hat < 1.0)) throw InputError("p-hat must lie in (0, 1)");
  if (!(rho_hat >= 0.0 && rho_hat <= 1.0)) throw InputError("rho-hat must lie in [0, 1]");
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!std::isfinite(tau)) throw InputError("tau must be finite");
}

double theta_hat(const PowerInputs& in) {
  in.validate();
  return in.tau / in.sigma *
         std::sqrt(static_cast<double>(in.n_units) * in.p_hat * (1.0 - in.p_hat) *
                   (1.0 - in.rho_hat));
}

double theta_zero(const SignedAssignmentView& view) {
  if (view.degenerate_count() == view.n_columns()) return 0.0;
  const auto est = estimate_p_rho(view);
  return std::sqrt(static_cast<double>(view.n_units()) * est.p_hat * (1.0 - est.p_hat) *
                   (1.0 - est.rho_hat));
}

std::size_t rejection_budget(std::size_t m, double alpha) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(m) * alpha + 1e-9));
}

double power_formula(double theta, std::size_t m, double alpha) {
  if (m < 2) throw InputError("power formula needs m >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (std::isnan(theta)) throw InputError("theta is NaN");
  const std::size_t budget = rejection_budget(m, alpha);
  if (budget == 0) return 0.0;

  // F_bin(k; n, p) = I_{1-p}(n - k, k + 1) with 1 - p = Phi(theta - z).
  const double n = static_cast<double>(m - 1);
  const double k = static_cast<double>(budget - 1);
  auto integrand = [&](double z) {
    const double one_minus_p = 0.5 * std::erfc((z - theta) / std::sqrt(2.0));
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    double cdf;
    if (one_minus_p <= 0.0)
      cdf = 0.0;
    else if (one_minus_p >= 1.0)
      cdf = 1.0;
    else
      cdf = boost::math::ibeta(n - k, k + 1.0, one_minus_p);
    return cdf * phi;
  };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -10.0, 10.0, 20, 1e-13, &err);
  if (!(err <= 1e-8))
    throw NumericError("power quadrature did not converge (error estimate " +
                       std::to_string(err) + ")");
  return std::clamp(value, 0.0, 1.0);
}

McEstimate mc_power_oracle(double theta, std::size_t m, double alpha, std::size_t reps,
                           std::uint64_t seed, Exec exec) {
  if (reps == 0) throw InputError("reps must be at least 1");
  if (m < 2) throw InputError("m must be at least 2");
  const std::size_t budget = rejection_budget(m, alpha);
  const Rng root(seed);
  const std::size_t hits = count_indices(reps, exec, [&](std::size_t r) {
    if (budget == 0) return false;
    Rng rng = root.stream(r);
    const double threshold = rng.normal() + theta;
    std::size_t above = 0;
    for (std::size_t k = 1; k < m; ++k) {
      if (rng.normal() >= threshold && ++above > budget - 1) return false;
    }
    return true;
  });
  McEstimate out;
  out.samples = reps;
  out.estimate = static_cast<double>(hits) / static_cast<double>(reps);
  out.se = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(reps));
  return out;
}

McEstimate empirical_average_power(const SignedAssignmentView& design, const OutcomeModel& model,
                                   double alpha, std::size_t draws, std::uint64_t seed,
                                   Exec exec) {
  model.validate();
  if (draws == 0) throw InputError("draws must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  const std::size_t n = design.n_units();
  const std::size_t m = design.n_columns();
  if (m == 0) throw InputError("design has no assignments");

  std::vector<std::vector<double>> zt(m);
  for (std::size_t k = 0; k < m; ++k) zt[k] = ztilde(design.column(k));

  // cross[l * m + k] = zt_l . z_k
  std::vector<double> cross(m * m);
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto z = design.column(k);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += zt[l][i] * z[i];
      cross[l * m + k] = s;
    }
  }

  const auto q = static_cast<std::size_t>(
      std::ceil(static_cast<double>(m) * (1.0 - alpha) - 1e-9));
  const std::size_t q_index = std::min(std::max<std::size_t>(q, 1), m) - 1;
  const double half_tau = model.tau / 2.0;
  const Rng root(seed);

  std::vector<double> beta(draws);
  for_each_index(draws, exec, [&](std::size_t d) {
    Rng rng = root.stream(d);
    const auto y0 = draw_base_outcomes(model, n, rng);
    std::vector<double> w(m);
    for (std::size_t l = 0; l < m; ++l) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += zt[l][i] * y0[i];
      w[l] = s;
    }
    std::vector<double> stats(m);
    std::size_t rejections = 0;
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t l = 0; l < m; ++l) stats[l] = half_tau * cross[l * m + k] + w[l];
      const double observed = stats[k];
      std::nth_element(stats.begin(), stats.begin() + static_cast<std::ptrdiff_t>(q_index),
                       stats.end());
      rejections += observed > stats[q_index];
    }
    beta[d] = static_cast<double>(rejections) / static_cast<double>(m);
  });

  McEstimate out;
  out.samples = draws;
  out.estimate = pairwise_sum(beta) / static_cast<double>(draws);
  if (draws > 1) {
    std::vector<double> dev(draws);
    for (std::size_t d = 0; d < draws; ++d) dev[d] = (beta[d] - out.estimate) * (beta[d] - out.estimate);
    const double var = pairwise_sum(dev) / static_cast<double>(draws - 1);
    out.se = std::sqrt(var / static_cast<double>(draws));
  }
  return out;
}

SignedAssignmentView hadamard_design(std::size_t n) {
  if (n < 2 || !std::has_single_bit(n)) throw InputError("Hadamard order must be a power of two");
  std::vector<std::vector<std::int8_t>> cols(n - 1, std::vector<std::int8_t>(n));
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      cols[j - 1][i] = (std::popcount(i & j) % 2 == 0) ? 1 : -1;
  return SignedAssignmentView(n, std::move(cols));
}

}  // namespace bct
