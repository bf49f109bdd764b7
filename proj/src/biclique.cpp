#include "bct/biclique.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "bct/csv.hpp"
#include "bct/error.hpp"

namespace bct {

std::size_t BicliqueHash::operator()(const Biclique& b) const {
  std::size_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::size_t v) { h = (h ^ v) * 0x100000001b3ULL; };
  for (auto u : b.units) mix(u);
  mix(~std::size_t{0});
  for (auto z : b.assignments) mix(z);
  return h;
}

void EnumerationConfig::validate() const {
  if (min_units < 1 || min_assignments < 1) throw InputError("biclique minima must be >= 1");
  if (max_bicliques < 1) throw InputError("biclique cap must be >= 1");
}

namespace {

std::vector<std::size_t> resolve_active(const NullExposureGraph& g,
                                        std::span<const std::size_t> active) {
  std::vector<std::size_t> out;
  if (active.empty()) {
    out.resize(g.n_assignments());
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  out.assign(active.begin(), active.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (auto k : out)
    if (k >= g.n_assignments()) throw InputError("active assignment index out of range");
  return out;
}

// Bimax recursion. Rows are assignment indices (sorted), columns a unit
// bitset, and `mandatory` lists unit sets the result must intersect.
class BimaxEnumerator {
 public:
  BimaxEnumerator(const NullExposureGraph& g, const EnumerationConfig& cfg)
      : g_(g), cfg_(cfg) {}

  std::vector<Biclique> run(std::vector<std::size_t> rows) {
    BitSet all(g_.n_units(), true);
    std::vector<BitSet> mandatory;
    conquer(std::move(rows), std::move(all), mandatory);
    return std::move(out_);
  }

 private:
  bool full() const { return out_.size() >= cfg_.max_bicliques; }

  void conquer(std::vector<std::size_t> rows, BitSet cols, std::vector<BitSet>& mandatory) {
    if (full()) return;

    // Reduce: drop rows that cannot reach min_units inside cols or that miss
    // a mandatory unit set.
    const std::size_t min_cols = std::max<std::size_t>(cfg_.min_units, 1);
    std::size_t kept = 0;
    bool all_full = true;
    const std::size_t ncols = cols.count();
    for (std::size_t r : rows) {
      const BitSet& e = g_.edge_mask(r);
      const std::size_t c = e.count_and(cols);
      if (c < min_cols) continue;
      bool ok = true;
      for (const auto& mset : mandatory) {
        if (!e.intersects_both(cols, mset)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (c != ncols) all_full = false;
      rows[kept++] = r;
    }
    rows.resize(kept);
    if (rows.size() < cfg_.min_assignments || ncols < min_cols) return;

    if (all_full) {
      emit(cols, rows);
      return;
    }

    // Template: lowest-index row that does not cover every column.
    std::size_t tmpl = rows.size();
    for (std::size_t idx = 0; idx < rows.size(); ++idx) {
      if (g_.edge_mask(rows[idx]).count_and(cols) != ncols) {
        tmpl = idx;
        break;
      }
    }
    BitSet cu = g_.edge_mask(rows[tmpl]) & cols;
    BitSet cv = cols;
    cv.and_not(cu);

    std::vector<std::size_t> gu, gv, gw;
    for (std::size_t r : rows) {
      const BitSet& e = g_.edge_mask(r);
      const bool in_u = e.intersects(cu);
      const bool in_v = e.intersects(cv);
      if (!in_v)
        gu.push_back(r);
      else if (!in_u)
        gv.push_back(r);
      else
        gw.push_back(r);
    }

    {
      std::vector<std::size_t> left;
      left.reserve(gu.size() + gw.size());
      std::merge(gu.begin(), gu.end(), gw.begin(), gw.end(), std::back_inserter(left));
      conquer(std::move(left), cu, mandatory);
    }
    if (full()) return;
    if (!gv.empty() && gw.empty()) {
      conquer(std::move(gv), cv, mandatory);
    } else if (!gw.empty()) {
      std::vector<std::size_t> right;
      right.reserve(gw.size() + gv.size());
      std::merge(gw.begin(), gw.end(), gv.begin(), gv.end(), std::back_inserter(right));
      mandatory.push_back(std::move(cv));
      conquer(std::move(right), std::move(cols), mandatory);
      mandatory.pop_back();
    }
  }

  void emit(const BitSet& cols, const std::vector<std::size_t>& rows) {
    Biclique b;
    b.units = cols.indices();
    b.assignments = rows;
    if (b.units.size() < cfg_.min_units || b.assignments.size() < cfg_.min_assignments) return;
    if (seen_.insert(b).second) out_.push_back(std::move(b));
  }

  const NullExposureGraph& g_;
  const EnumerationConfig& cfg_;
  std::vector<Biclique> out_;
  std::unordered_set<Biclique, BicliqueHash> seen_;
};

}  // namespace

std::vector<Biclique> enumerate_maximal(const NullExposureGraph& g, const EnumerationConfig& cfg,
                                        std::span<const std::size_t> active) {
  cfg.validate();
  auto rows = resolve_active(g, active);
  if (g.n_units() == 0 || rows.empty()) return {};
  return BimaxEnumerator(g, cfg).run(std::move(rows));
}

std::vector<Biclique> brute_force_maximal(const NullExposureGraph& g,
                                          const EnumerationConfig& cfg) {
  cfg.validate();
  const std::size_t n = g.n_units();
  const std::size_t m = g.n_assignments();
  if (n > 20) throw InputError("brute-force oracle limited to 20 units");

  // Per-unit neighbourhoods over assignments.
  std::vector<BitSet> unit_nb(n, BitSet(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k)
      if (g.has_edge(i, k)) unit_nb[i].set(k);

  std::vector<Biclique> out;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
    BitSet common(m, true);
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) common &= unit_nb[i];
    if (common.none()) continue;
    // Closure: every unit adjacent to all of `common`.
    std::uint32_t closure = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (common.is_subset_of(unit_nb[i])) closure |= std::uint32_t{1} << i;
    if (closure != mask) continue;
    Biclique b;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) b.units.push_back(i);
    b.assignments = common.indices();
    if (b.units.size() < cfg.min_units || b.assignments.size() < cfg.min_assignments) continue;
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end());
  if (out.size() > cfg.max_bicliques) out.resize(cfg.max_bicliques);
  return out;
}

bool is_biclique(const NullExposureGraph& g, const Biclique& c) {
  for (auto u : c.units)
    if (u >= g.n_units()) throw InputError("unit index out of range");
  for (auto k : c.assignments)
    if (k >= g.n_assignments()) throw InputError("assignment index out of range");
  if (c.units.empty() || c.assignments.empty()) return false;
  for (auto k : c.assignments)
    for (auto u : c.units)
      if (!g.has_edge(u, k)) return false;
  return true;
}

bool is_maximal(const NullExposureGraph& g, const Biclique& c,
                std::span<const std::size_t> active) {
  if (!is_biclique(g, c)) return false;
  const auto rows = resolve_active(g, active);
  for (std::size_t u = 0; u < g.n_units(); ++u) {
    if (std::binary_search(c.units.begin(), c.units.end(), u)) continue;
    bool all = true;
    for (auto k : c.assignments)
      if (!g.has_edge(u, k)) {
        all = false;
        break;
      }
    if (all) return false;
  }
  for (auto k : rows) {
    if (std::binary_search(c.assignments.begin(), c.assignments.end(), k)) continue;
    bool all = true;
    for (auto u : c.units)
      if (!g.has_edge(u, k)) {
        all = false;
        break;
      }
    if (all) return false;
  }
  return true;
}

std::string to_json_line(const Biclique& c) {
  nlohmann::ordered_json j;
  j["units"] = c.units;
  j["assignments"] = c.assignments;
  return j.dump();
}

Biclique biclique_from_json(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    Biclique b;
    b.units = j.at("units").get<std::vector<std::size_t>>();
    b.assignments = j.at("assignments").get<std::vector<std::size_t>>();
    std::sort(b.units.begin(), b.units.end());
    std::sort(b.assignments.begin(), b.assignments.end());
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad biclique record: ") + e.what());
  }
}

void write_bicliques_jsonl(std::span<const Biclique> bicliques,
                           const std::filesystem::path& path) {
  std::string out;
  for (const auto& b : bicliques) out += to_json_line(b) + "\n";
  csv::write_text(path, out);
}

std::vector<Biclique> read_bicliques_jsonl(const std::filesystem::path& path) {
  std::istringstream in(csv::read_text(path));
  std::vector<Biclique> out;
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      out.push_back(biclique_from_json(line));
  return out;
}

}  // namespace bct
