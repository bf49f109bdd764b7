#include "bct/negraph.hpp"

#include <string>

#include "json.hpp"

#include "bct/csv.hpp"
#include "bct/error.hpp"

namespace bct {

NullExposureGraph::NullExposureGraph(std::size_t n_units, std::size_t n_assignments,
                                     std::vector<EdgeLabel> labels,
                                     ContrastHypothesis hypothesis)
    : n_units_(n_units),
      n_assignments_(n_assignments),
      labels_(std::move(labels)),
      hypothesis_(hypothesis) {
  if (labels_.size() != n_units_ * n_assignments_)
    throw InputError("label matrix has wrong size");
  if (hypothesis_.exposure_a == hypothesis_.exposure_b)
    throw InputError("contrast exposures must differ");
  edge_mask_.assign(n_assignments_, BitSet(n_units_));
  a_mask_.assign(n_assignments_, BitSet(n_units_));
  for (std::size_t k = 0; k < n_assignments_; ++k) {
    for (std::size_t i = 0; i < n_units_; ++i) {
      const EdgeLabel l = labels_[k * n_units_ + i];
      if (l != EdgeLabel::None) edge_mask_[k].set(i);
      if (l == EdgeLabel::A) a_mask_[k].set(i);
    }
  }
}

std::size_t NullExposureGraph::edge_count() const {
  std::size_t c = 0;
  for (const auto& m : edge_mask_) c += m.count();
  return c;
}

NullExposureGraph build_graph(const AssignmentSet& design, const ExposureMapping& mapping,
                              const ContrastHypothesis& hyp, Exec exec) {
  hyp.validate(mapping.alphabet());
  const std::size_t n = design.n_units();
  const std::size_t m = design.size();
  std::vector<EdgeLabel> labels(n * m, EdgeLabel::None);
  // Validate dimensions once up front so the parallel body cannot throw.
  if (n > 0 && m > 0) (void)mapping.exposures(design, 0);
  for_each_index(m, exec, [&](std::size_t k) {
    const auto ex = mapping.exposures(design, k);
    for (std::size_t i = 0; i < n; ++i) {
      if (ex[i] == hyp.exposure_a)
        labels[k * n + i] = EdgeLabel::A;
      else if (ex[i] == hyp.exposure_b)
        labels[k * n + i] = EdgeLabel::B;
    }
  });
  return NullExposureGraph(n, m, std::move(labels), hyp);
}

GraphStats graph_stats(const NullExposureGraph& g) {
  GraphStats s;
  for (std::size_t k = 0; k < g.n_assignments(); ++k) {
    s.edges += g.edge_mask(k).count();
    s.a_edges += g.a_mask(k).count();
  }
  const double cells = static_cast<double>(g.n_units()) * static_cast<double>(g.n_assignments());
  s.density = cells > 0 ? static_cast<double>(s.edges) / cells : 0.0;
  if (s.edges > 0) s.balance = static_cast<double>(s.a_edges) / static_cast<double>(s.edges);
  return s;
}

NullExposureGraph generate_random_graph(std::size_t n_units, std::size_t n_assignments,
                                        double density, double balance, std::uint64_t seed,
                                        ContrastHypothesis hyp) {
  if (!(density >= 0.0 && density <= 1.0) || !(balance >= 0.0 && balance <= 1.0))
    throw InputError("density and balance must lie in [0, 1]");
  Rng rng(seed);
  std::vector<EdgeLabel> labels(n_units * n_assignments, EdgeLabel::None);
  for (std::size_t k = 0; k < n_assignments; ++k) {
    for (std::size_t i = 0; i < n_units; ++i) {
      const bool edge = rng.uniform() < density;
      const bool a = rng.uniform() < balance;
      if (edge) labels[k * n_units + i] = a ? EdgeLabel::A : EdgeLabel::B;
    }
  }
  return NullExposureGraph(n_units, n_assignments, std::move(labels), hyp);
}

void write_graph(const NullExposureGraph& g, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path) {
  std::string out;
  out.reserve(g.n_units() * (2 * g.n_assignments() + 1));
  for (std::size_t i = 0; i < g.n_units(); ++i) {
    for (std::size_t k = 0; k < g.n_assignments(); ++k) {
      if (k) out += ',';
      switch (g.label(i, k)) {
        case EdgeLabel::None: out += '.'; break;
        case EdgeLabel::A: out += 'a'; break;
        case EdgeLabel::B: out += 'b'; break;
      }
    }
    out += '\n';
  }
  csv::write_text(csv_path, out);

  nlohmann::ordered_json j;
  j["n"] = g.n_units();
  j["m"] = g.n_assignments();
  j["exposure_a"] = g.hypothesis().exposure_a;
  j["exposure_b"] = g.hypothesis().exposure_b;
  csv::write_text(json_path, j.dump(2) + "\n");
}

NullExposureGraph read_graph(const std::filesystem::path& csv_path,
                             const std::filesystem::path& json_path) {
  std::size_t n = 0, m = 0;
  ContrastHypothesis hyp;
  try {
    const auto j = nlohmann::json::parse(csv::read_text(json_path));
    n = j.at("n").get<std::size_t>();
    m = j.at("m").get<std::size_t>();
    hyp.exposure_a = j.at("exposure_a").get<Exposure>();
    hyp.exposure_b = j.at("exposure_b").get<Exposure>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(json_path.string() + ": " + e.what());
  }
  const auto rows = csv::read(csv_path);
  if (rows.size() != n) throw InputError(csv_path.string() + ": row count differs from n");
  std::vector<EdgeLabel> labels(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m)
      throw InputError(csv_path.string() + ": row " + std::to_string(i) + " has wrong width");
    for (std::size_t k = 0; k < m; ++k) {
      const auto& cell = rows[i][k];
      EdgeLabel l;
      if (cell == ".")
        l = EdgeLabel::None;
      else if (cell == "a")
        l = EdgeLabel::A;
      else if (cell == "b")
        l = EdgeLabel::B;
      else
        throw InputError(csv_path.string() + ": bad cell '" + cell + "'");
      labels[k * n + i] = l;
    }
  }
  return NullExposureGraph(n, m, std::move(labels), hyp);
}

}  // namespace bct
