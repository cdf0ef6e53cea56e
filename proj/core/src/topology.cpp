#include "t3f/topology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <tuple>

#include "t3f/error.hpp"

namespace t3f {

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t i) {
  std::size_t root = i;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[i] != root) {
    const std::size_t next = parent_[i];
    parent_[i] = root;
    i = next;
  }
  return root;
}

bool UnionFind::unite(std::size_t i, std::size_t j) {
  i = find(i);
  j = find(j);
  if (i == j) return false;
  if (rank_[i] < rank_[j]) std::swap(i, j);
  parent_[j] = i;
  if (rank_[i] == rank_[j]) ++rank_[i];
  return true;
}

CliqueComplex2 clique_complex(std::size_t vertices, std::span<const Edge> edges) {
  CliqueComplex2 cx;
  cx.vertices = vertices;
  cx.edges.assign(edges.begin(), edges.end());
  for (auto& e : cx.edges) e = Edge::make(e.u, e.v);
  std::sort(cx.edges.begin(), cx.edges.end());
  cx.edges.erase(std::unique(cx.edges.begin(), cx.edges.end()), cx.edges.end());

  std::vector<std::vector<NodeId>> higher(vertices);
  for (const auto& e : cx.edges) {
    if (e.v >= vertices) throw Error(ErrorCode::OutOfRangeNode, "edge outside complex");
    higher[e.u].push_back(e.v);
  }
  // Edges are sorted, so each `higher` list is already ascending.
  for (const auto& e : cx.edges) {
    const auto& a = higher[e.u];
    const auto& b = higher[e.v];
    auto ia = std::upper_bound(a.begin(), a.end(), e.v);
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        cx.triangles.push_back({e.u, e.v, *ia});
        ++ia;
        ++ib;
      }
    }
  }
  std::sort(cx.triangles.begin(), cx.triangles.end());
  return cx;
}

CliqueComplex2 clique_complex(const WindowGraph& window) {
  const auto local = window.local_edges();
  return clique_complex(window.num_nodes(), local);
}

Gf2Matrix::Gf2Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64), bits_(rows * words_, 0) {}

bool Gf2Matrix::get(std::size_t r, std::size_t c) const {
  return (bits_[r * words_ + c / 64] >> (c % 64)) & 1U;
}

void Gf2Matrix::set(std::size_t r, std::size_t c, bool value) {
  auto& w = bits_[r * words_ + c / 64];
  const std::uint64_t mask = std::uint64_t{1} << (c % 64);
  w = value ? (w | mask) : (w & ~mask);
}

void Gf2Matrix::flip(std::size_t r, std::size_t c) {
  bits_[r * words_ + c / 64] ^= std::uint64_t{1} << (c % 64);
}

std::size_t gf2_rank(Gf2Matrix m) {
  const std::size_t words = m.words_;
  auto row = [&](std::size_t r) { return m.bits_.data() + r * words; };
  std::size_t rank = 0;
  for (std::size_t w = 0; w < words && rank < m.rows_; ++w) {
    for (unsigned bit = 0; bit < 64 && rank < m.rows_; ++bit) {
      const std::uint64_t mask = std::uint64_t{1} << bit;
      std::size_t pivot = rank;
      while (pivot < m.rows_ && !(row(pivot)[w] & mask)) ++pivot;
      if (pivot == m.rows_) continue;
      if (pivot != rank) std::swap_ranges(row(pivot), row(pivot) + words, row(rank));
      const std::uint64_t* p = row(rank);
      for (std::size_t r = rank + 1; r < m.rows_; ++r) {
        std::uint64_t* q = row(r);
        if (q[w] & mask) {
          for (std::size_t k = w; k < words; ++k) q[k] ^= p[k];
        }
      }
      ++rank;
    }
  }
  return rank;
}

namespace {

std::size_t edge_position(const std::vector<Edge>& edges, NodeId a, NodeId b) {
  const Edge key = Edge::make(a, b);
  const auto it = std::lower_bound(edges.begin(), edges.end(), key);
  return static_cast<std::size_t>(it - edges.begin());
}

}  // namespace

Gf2Matrix boundary2(const CliqueComplex2& complex) {
  Gf2Matrix m(complex.edges.size(), complex.triangles.size());
  for (std::size_t t = 0; t < complex.triangles.size(); ++t) {
    const auto& [a, b, c] = complex.triangles[t];
    m.set(edge_position(complex.edges, a, b), t);
    m.set(edge_position(complex.edges, a, c), t);
    m.set(edge_position(complex.edges, b, c), t);
  }
  return m;
}

std::size_t betti0(const CliqueComplex2& complex) {
  UnionFind uf(complex.vertices);
  std::size_t components = complex.vertices;
  for (const auto& e : complex.edges) {
    if (uf.unite(e.u, e.v)) --components;
  }
  return components;
}

std::size_t betti0(const WindowGraph& window) {
  UnionFind uf(window.num_nodes());
  std::size_t components = window.num_nodes();
  for (const auto& e : window.local_edges()) {
    if (uf.unite(e.u, e.v)) --components;
  }
  return components;
}

std::size_t betti1(const CliqueComplex2& complex) {
  const std::size_t cycle_rank = complex.edges.size() + betti0(complex) - complex.vertices;
  if (complex.triangles.empty()) return cycle_rank;
  // Triangle-by-edge layout: same rank as boundary2, fewer rows to sweep.
  Gf2Matrix m(complex.triangles.size(), complex.edges.size());
  for (std::size_t t = 0; t < complex.triangles.size(); ++t) {
    const auto& [a, b, c] = complex.triangles[t];
    m.set(t, edge_position(complex.edges, a, b));
    m.set(t, edge_position(complex.edges, a, c));
    m.set(t, edge_position(complex.edges, b, c));
  }
  return cycle_rank - gf2_rank(std::move(m));
}

PersistenceDiagram sublevel_persistence0(std::size_t num_nodes, std::span<const Edge> edges,
                                         std::span<const double> values,
                                         bool keep_zero_persistence) {
  if (values.size() != edges.size()) {
    throw Error(ErrorCode::MissingEdgeValue, std::to_string(edges.size()) + " edges but " +
                                                 std::to_string(values.size()) + " values");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> vertex_birth(num_nodes, inf);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw Error(ErrorCode::OutOfRangeNode, "edge endpoint outside node range");
    }
    if (std::isnan(values[i])) throw Error(ErrorCode::MissingEdgeValue, "edge value is NaN");
    vertex_birth[e.u] = std::min(vertex_birth[e.u], values[i]);
    vertex_birth[e.v] = std::min(vertex_birth[e.v], values[i]);
  }

  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  // Per root: birth of the component and smallest vertex id it contains.
  std::vector<double> comp_birth = vertex_birth;
  std::vector<std::size_t> comp_oldest(num_nodes);
  std::iota(comp_oldest.begin(), comp_oldest.end(), std::size_t{0});
  UnionFind uf(num_nodes);

  PersistenceDiagram pd;
  pd.dimension = 0;
  for (const std::size_t i : order) {
    const std::size_t ru = uf.find(edges[i].u);
    const std::size_t rv = uf.find(edges[i].v);
    if (ru == rv) continue;
    const bool u_older = std::tie(comp_birth[ru], comp_oldest[ru]) <
                         std::tie(comp_birth[rv], comp_oldest[rv]);
    const std::size_t elder = u_older ? ru : rv;
    const std::size_t younger = u_older ? rv : ru;
    const double birth = comp_birth[younger];
    if (keep_zero_persistence || birth < values[i]) pd.points.push_back({birth, values[i]});
    const double elder_birth = comp_birth[elder];
    const std::size_t elder_oldest = comp_oldest[elder];
    uf.unite(ru, rv);
    const std::size_t root = uf.find(ru);
    comp_birth[root] = elder_birth;
    comp_oldest[root] = elder_oldest;
  }
  for (std::size_t v = 0; v < num_nodes; ++v) {
    if (vertex_birth[v] == inf || uf.find(v) != v) continue;
    pd.points.push_back({comp_birth[v], inf});
  }
  return pd;
}

std::vector<double> earliest_edge_times(const TemporalGraph& graph) {
  const StaticGraph sg = static_projection(graph);
  std::vector<double> earliest(sg.edges.size(), std::numeric_limits<double>::infinity());
  for (const auto& e : graph.events()) {
    const auto pos = edge_position(sg.edges, e.u, e.v);
    earliest[pos] = std::min(earliest[pos], e.t);
  }
  return earliest;
}

PersistenceDiagram sublevel_persistence0(const TemporalGraph& graph, bool keep_zero_persistence) {
  const StaticGraph sg = static_projection(graph);
  const auto values = earliest_edge_times(graph);
  return sublevel_persistence0(sg.num_nodes, sg.edges, values, keep_zero_persistence);
}

BettiVector betti_curve(const PersistenceDiagram& pd, std::span<const double> thresholds) {
  if (thresholds.empty()) throw Error(ErrorCode::EmptyThresholds, "no thresholds given");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw Error(ErrorCode::EmptyThresholds, "thresholds must be sorted");
  }
  BettiVector bv;
  bv.thresholds.assign(thresholds.begin(), thresholds.end());
  bv.values.assign(thresholds.size(), 0);
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    const double t = thresholds[j];
    std::int64_t count = 0;
    for (const auto& p : pd.points) {
      if (p.birth <= t && t < p.death) ++count;
    }
    bv.values[j] = count;
  }
  return bv;
}

namespace {

void require_same_grid(const BettiVector& a, const BettiVector& b) {
  if (a.thresholds != b.thresholds || a.values.size() != b.values.size()) {
    throw Error(ErrorCode::ThresholdMismatch, "Betti vectors sampled on different grids");
  }
}

}  // namespace

double l1_distance(const BettiVector& a, const BettiVector& b) {
  require_same_grid(a, b);
  double sum = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    sum += std::fabs(static_cast<double>(a.values[j] - b.values[j]));
  }
  return sum;
}

double gap_weighted_l1_distance(const BettiVector& a, const BettiVector& b) {
  require_same_grid(a, b);
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < a.values.size(); ++j) {
    const double gap = a.thresholds[j + 1] - a.thresholds[j];
    sum += std::fabs(static_cast<double>(a.values[j] - b.values[j])) * gap;
  }
  return sum;
}

TopoDescriptor topo_descriptor(const WindowGraph& window, bool count_multiplicity) {
  TopoDescriptor d;
  if (window.empty()) return d;
  const CliqueComplex2 cx = clique_complex(window);
  d.v_count = static_cast<std::int64_t>(window.num_nodes());
  if (count_multiplicity) {
    d.e_count = std::accumulate(window.multiplicity.begin(), window.multiplicity.end(),
                                std::int64_t{0});
  } else {
    d.e_count = static_cast<std::int64_t>(window.num_edges());
  }
  d.betti0 = static_cast<std::int64_t>(betti0(cx));
  d.betti1 = static_cast<std::int64_t>(betti1(cx));
  return d;
}

}  // namespace t3f
