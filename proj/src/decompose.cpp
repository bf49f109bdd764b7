#include "bct/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "bct/csv.hpp"
#include "bct/error.hpp"
#include "bct/power.hpp"

namespace bct {

std::string to_string(ScoringRule rule) {
  return rule == ScoringRule::EdgeCount ? "edges" : "theta";
}

ScoringRule parse_scoring_rule(const std::string& name) {
  if (name == "edges" || name == "size" || name == "edgecount") return ScoringRule::EdgeCount;
  if (name == "theta" || name == "theta0" || name == "thetazero") return ScoringRule::ThetaZero;
  throw InputError("unknown scoring rule '" + name + "'");
}

double biclique_theta_zero(const NullExposureGraph& g, const Biclique& c) {
  const std::size_t n = c.units.size();
  const std::size_t m = c.assignments.size();
  if (n == 0 || m == 0) return 0.0;

  BitSet members(g.n_units());
  for (auto u : c.units) members.set(u);

  std::vector<std::size_t> plus(m);
  std::size_t plus_total = 0;
  std::size_t usable = 0;
  for (std::size_t j = 0; j < m; ++j) {
    plus[j] = g.a_mask(c.assignments[j]).count_and(members);
    plus_total += plus[j];
    usable += plus[j] != 0 && plus[j] != n;
  }
  if (usable == 0) return 0.0;
  const double cells = static_cast<double>(n) * static_cast<double>(m);
  const double p_hat = static_cast<double>(plus_total) / cells;

  double rho_hat = 0.0;
  if (usable >= 2) {
    // col_sum over usable columns, indexed by unit id.
    std::vector<long long> col_sum(g.n_units(), 0);
    for (std::size_t j = 0; j < m; ++j) {
      if (plus[j] == 0 || plus[j] == n) continue;
      const BitSet& a = g.a_mask(c.assignments[j]);
      for (auto u : c.units) col_sum[u] += a.test(u) ? 1 : -1;
    }
    long long total = 0;
    for (auto u : c.units) total += col_sum[u];
    std::vector<double> terms;
    terms.reserve(usable);
    for (std::size_t j = 0; j < m; ++j) {
      if (plus[j] == 0 || plus[j] == n) continue;
      const BitSet& a = g.a_mask(c.assignments[j]);
      long long s_plus = 0;
      for (auto u : c.units)
        if (a.test(u)) s_plus += col_sum[u];
      const long long s_minus = total - s_plus;
      terms.push_back(static_cast<double>(s_plus) / static_cast<double>(plus[j]) -
                      static_cast<double>(s_minus) / static_cast<double>(n - plus[j]) - 2.0);
    }
    const double pairs = static_cast<double>(usable) * static_cast<double>(usable - 1);
    rho_hat = std::max(pairwise_sum(terms) / (2.0 * pairs), 0.0);
  }
  return std::sqrt(static_cast<double>(n) * p_hat * (1.0 - p_hat) * (1.0 - rho_hat));
}

std::vector<CandidateScore> score_candidates(const NullExposureGraph& g,
                                             std::span<const Biclique> candidates, Exec exec) {
  std::vector<CandidateScore> scores(candidates.size());
  for_each_index(candidates.size(), exec, [&](std::size_t i) {
    scores[i].theta_zero = biclique_theta_zero(g, candidates[i]);
    scores[i].edges = candidates[i].edge_count();
  });
  return scores;
}

std::size_t select_best(std::span<const Biclique> candidates,
                        std::span<const CandidateScore> scores, ScoringRule rule) {
  if (candidates.empty()) throw InputError("no candidates to select from");
  auto better = [&](std::size_t i, std::size_t j) {
    const auto& a = scores[i];
    const auto& b = scores[j];
    if (rule == ScoringRule::ThetaZero) {
      if (a.theta_zero != b.theta_zero) return a.theta_zero > b.theta_zero;
      if (a.edges != b.edges) return a.edges > b.edges;
    } else {
      if (a.edges != b.edges) return a.edges > b.edges;
      if (a.theta_zero != b.theta_zero) return a.theta_zero > b.theta_zero;
    }
    return candidates[i] < candidates[j];
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (better(i, best)) best = i;
  return best;
}

BicliqueDecomposition decompose(const NullExposureGraph& g, ScoringRule rule,
                                const EnumerationConfig& cfg, Exec exec) {
  cfg.validate();
  BicliqueDecomposition d;
  d.n_assignments = g.n_assignments();
  d.owner.assign(g.n_assignments(), std::nullopt);

  std::vector<std::size_t> active(g.n_assignments());
  std::iota(active.begin(), active.end(), std::size_t{0});

  while (!active.empty()) {
    auto candidates = enumerate_maximal(g, cfg, active);
    if (candidates.empty()) break;
    const auto scores = score_candidates(g, candidates, exec);
    const std::size_t best = select_best(candidates, scores, rule);
    Biclique chosen = std::move(candidates[best]);
    const std::size_t id = d.bicliques.size();
    for (auto k : chosen.assignments) d.owner[k] = id;
    std::vector<std::size_t> rest;
    rest.reserve(active.size());
    std::set_difference(active.begin(), active.end(), chosen.assignments.begin(),
                        chosen.assignments.end(), std::back_inserter(rest));
    active = std::move(rest);
    d.bicliques.push_back(std::move(chosen));
  }
  d.dropped = std::move(active);
  return d;
}

const Biclique& find_owner(const BicliqueDecomposition& d, std::size_t k) {
  if (k >= d.owner.size())
    throw UntestableError("assignment " + std::to_string(k) + " is outside the decomposition");
  if (!d.owner[k])
    throw UntestableError("assignment " + std::to_string(k) +
                          " was dropped from the decomposition; no valid test exists");
  return d.bicliques[*d.owner[k]];
}

std::vector<SummaryRow> decomposition_summary(const NullExposureGraph& g,
                                              const BicliqueDecomposition& d) {
  std::vector<SummaryRow> rows;
  rows.reserve(d.bicliques.size());
  for (const auto& c : d.bicliques) {
    const auto view = SignedAssignmentView::from_biclique(g, c);
    SummaryRow r;
    r.units = c.units.size();
    r.assignments = c.assignments.size();
    r.edges = c.edge_count();
    const auto est = estimate_p_rho(view);
    r.p_hat = est.p_hat;
    r.rho_hat = est.rho_hat;
    r.theta_zero = theta_zero(view);
    rows.push_back(r);
  }
  return rows;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = "biclique,units,assignments,edges,p_hat,rho_hat,theta_zero\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += std::to_string(i) + "," + std::to_string(r.units) + "," +
           std::to_string(r.assignments) + "," + std::to_string(r.edges) + "," +
           csv::format(r.p_hat) + "," + csv::format(r.rho_hat) + "," +
           csv::format(r.theta_zero) + "\n";
  }
  return out;
}

bool is_partition(const BicliqueDecomposition& d) {
  if (d.owner.size() != d.n_assignments) return false;
  std::vector<int> seen(d.n_assignments, 0);
  for (std::size_t b = 0; b < d.bicliques.size(); ++b) {
    for (auto k : d.bicliques[b].assignments) {
      if (k >= d.n_assignments || seen[k]++) return false;
      if (d.owner[k] != b) return false;
    }
  }
  for (auto k : d.dropped) {
    if (k >= d.n_assignments || seen[k]++) return false;
    if (d.owner[k].has_value()) return false;
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

void write_decomposition_json(const BicliqueDecomposition& d, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["n_assignments"] = d.n_assignments;
  j["bicliques"] = nlohmann::json::array();
  for (const auto& b : d.bicliques)
    j["bicliques"].push_back({{"units", b.units}, {"assignments", b.assignments}});
  nlohmann::json owner = nlohmann::json::array();
  for (const auto& o : d.owner) owner.push_back(o ? nlohmann::json(*o) : nlohmann::json(nullptr));
  j["owner"] = owner;
  j["dropped"] = d.dropped;
  csv::write_text(path, j.dump() + "\n");
}

BicliqueDecomposition read_decomposition_json(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(csv::read_text(path));
    BicliqueDecomposition d;
    d.n_assignments = j.at("n_assignments").get<std::size_t>();
    for (const auto& b : j.at("bicliques")) {
      Biclique c;
      c.units = b.at("units").get<std::vector<std::size_t>>();
      c.assignments = b.at("assignments").get<std::vector<std::size_t>>();
      d.bicliques.push_back(std::move(c));
    }
    for (const auto& o : j.at("owner"))
      d.owner.push_back(o.is_null() ? std::nullopt
                                    : std::optional<std::size_t>(o.get<std::size_t>()));
    d.dropped = j.at("dropped").get<std::vector<std::size_t>>();
    if (!is_partition(d)) throw InputError(path.string() + ": decomposition is not a partition");
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace bct
