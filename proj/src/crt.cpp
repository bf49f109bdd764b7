#include "bct/crt.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "bct/csv.hpp"
#include "bct/error.hpp"
#include "bct/rng.hpp"

namespace bct {

namespace {

// Group means are not exact in floating point, so statistics that agree up to
// rounding are treated as ties (which count toward the p-value).
bool at_least(double t, double t_obs) {
  return t >= t_obs - 1e-9 * (1.0 + std::abs(t_obs));
}

double mean_difference(double sum_a, std::size_t n_a, double sum_b, std::size_t n_b) {
  if (n_a == 0 || n_b == 0) return 0.0;
  return sum_a / static_cast<double>(n_a) - sum_b / static_cast<double>(n_b);
}

void check_outcomes(std::span<const double> y, std::size_t n_units) {
  if (y.size() != n_units)
    throw InputError("outcome vector has " + std::to_string(y.size()) + " entries, expected " +
                     std::to_string(n_units));
  for (double v : y)
    if (!std::isfinite(v)) throw InputError("outcomes must be finite");
}

}  // namespace

double restricted_diff_means(std::span<const Exposure> exposures, std::span<const double> y,
                             std::span<const std::size_t> units, const ContrastHypothesis& hyp) {
  double sum_a = 0.0, sum_b = 0.0;
  std::size_t n_a = 0, n_b = 0;
  for (auto u : units) {
    if (u >= exposures.size() || u >= y.size()) throw InputError("unit index out of range");
    if (exposures[u] == hyp.exposure_a) {
      sum_a += y[u];
      ++n_a;
    } else if (exposures[u] == hyp.exposure_b) {
      sum_b += y[u];
      ++n_b;
    } else {
      throw InputError("unit " + std::to_string(u) + " has exposure " +
                       std::to_string(exposures[u]) + " outside the contrast");
    }
  }
  return mean_difference(sum_a, n_a, sum_b, n_b);
}

double restricted_diff_means(const NullExposureGraph& g, std::size_t k, std::span<const double> y,
                             std::span<const std::size_t> units) {
  const BitSet& edges = g.edge_mask(k);
  const BitSet& a = g.a_mask(k);
  double sum_a = 0.0, sum_b = 0.0;
  std::size_t n_a = 0, n_b = 0;
  for (auto u : units) {
    if (!edges.test(u))
      throw InputError("unit " + std::to_string(u) + " has no contrast exposure under assignment " +
                       std::to_string(k));
    if (a.test(u)) {
      sum_a += y[u];
      ++n_a;
    } else {
      sum_b += y[u];
      ++n_b;
    }
  }
  return mean_difference(sum_a, n_a, sum_b, n_b);
}

TestReport biclique_test(const NullExposureGraph& g, const BicliqueDecomposition& d,
                         std::size_t z_obs_index, std::span<const double> y_obs,
                         const TestOptions& opts) {
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  check_outcomes(y_obs, g.n_units());
  const Biclique& c = find_owner(d, z_obs_index);

  TestReport r;
  r.biclique_id = *d.owner[z_obs_index];
  r.biclique = c;
  r.t_obs = restricted_diff_means(g, z_obs_index, y_obs, c.units);

  std::vector<std::size_t> draws;
  if (opts.mc_samples == 0) {
    draws = c.assignments;
    r.method = PValueMethod::Exact;
  } else {
    Rng rng(opts.seed);
    draws.resize(opts.mc_samples);
    for (auto& k : draws) k = c.assignments[rng.below(c.assignments.size())];
    r.method = PValueMethod::MonteCarlo;
    r.mc_samples = opts.mc_samples;
  }

  r.null_stats.resize(draws.size());
  for_each_index(draws.size(), opts.exec, [&](std::size_t i) {
    r.null_stats[i] = restricted_diff_means(g, draws[i], y_obs, c.units);
  });
  const auto hits = static_cast<std::size_t>(std::count_if(
      r.null_stats.begin(), r.null_stats.end(), [&](double t) { return at_least(t, r.t_obs); }));
  if (r.method == PValueMethod::Exact)
    r.p_value = static_cast<double>(hits) / static_cast<double>(draws.size());
  else
    r.p_value = static_cast<double>(hits + 1) / static_cast<double>(draws.size() + 1);
  r.reject = r.p_value <= opts.alpha;
  return r;
}

TestReport classical_randomization_test(const AssignmentSet& design, std::span<const double> y_obs,
                                        std::size_t z_obs_index, double alpha, Exec exec) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (z_obs_index >= design.size()) throw InputError("observed assignment index out of range");
  const std::size_t n = design.n_units();
  check_outcomes(y_obs, n);
  for (std::size_t k = 0; k < design.size(); ++k) {
    const auto t = design.treated_count(k);
    if (t == 0 || t == n)
      throw DegenerateColumnError("assignment " + std::to_string(k) +
                                  " treats all units or none; the statistic is undefined");
  }

  auto statistic = [&](std::size_t k) {
    const auto z = design.assignment(k);
    double s1 = 0.0, s0 = 0.0;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (z[i]) {
        s1 += y_obs[i];
        ++n1;
      } else {
        s0 += y_obs[i];
      }
    }
    return mean_difference(s1, n1, s0, n - n1);
  };

  TestReport r;
  r.t_obs = statistic(z_obs_index);
  r.null_stats.resize(design.size());
  for_each_index(design.size(), exec, [&](std::size_t k) { r.null_stats[k] = statistic(k); });

  const auto& probs = design.probs();
  const bool uniform = std::all_of(probs.begin(), probs.end(),
                                   [&](double p) { return p == probs.front(); });
  if (uniform) {
    const auto hits = static_cast<std::size_t>(std::count_if(
        r.null_stats.begin(), r.null_stats.end(), [&](double t) { return at_least(t, r.t_obs); }));
    r.p_value = static_cast<double>(hits) / static_cast<double>(design.size());
  } else {
    std::vector<double> mass(design.size(), 0.0);
    for (std::size_t k = 0; k < design.size(); ++k)
      if (at_least(r.null_stats[k], r.t_obs)) mass[k] = probs[k];
    r.p_value = std::min(pairwise_sum(mass), 1.0);
  }
  r.reject = r.p_value <= alpha;
  return r;
}

std::string report_json(const TestReport& r) {
  nlohmann::ordered_json j;
  if (r.biclique_id)
    j["biclique_id"] = *r.biclique_id;
  else
    j["biclique_id"] = nullptr;
  j["biclique"] = {{"units", r.biclique.units}, {"assignments", r.biclique.assignments}};
  j["t_obs"] = r.t_obs;
  j["p_value"] = r.p_value;
  j["reject"] = r.reject;
  if (r.method == PValueMethod::Exact)
    j["method"] = "exact";
  else
    j["method"] = {{"monte_carlo", r.mc_samples}};
  j["n_null"] = r.null_stats.size();
  return j.dump();
}

void write_report_json(const TestReport& r, const std::filesystem::path& path) {
  csv::write_text(path, report_json(r) + "\n");
}

}  // namespace bct
