#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "t3f/temporal_graph.hpp"

namespace t3f {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0);

  std::size_t find(std::size_t i);
  // Returns false when i and j were already connected.
  bool unite(std::size_t i, std::size_t j);
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

/// Clique complex truncated at dimension 2, over local vertex indices.
struct CliqueComplex2 {
  std::size_t vertices = 0;
  std::vector<Edge> edges;                           // sorted, u < v
  std::vector<std::array<NodeId, 3>> triangles;      // sorted ascending, each triple sorted
};

CliqueComplex2 clique_complex(const WindowGraph& window);
CliqueComplex2 clique_complex(std::size_t vertices, std::span<const Edge> edges);

/// Bit-packed matrix over GF(2).
class Gf2Matrix {
 public:
  Gf2Matrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  bool get(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, bool value = true);
  void flip(std::size_t r, std::size_t c);

 private:
  friend std::size_t gf2_rank(Gf2Matrix m);

  std::size_t rows_;
  std::size_t cols_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

/// Rank over GF(2) by Gaussian elimination (takes a copy it can reduce in place).
std::size_t gf2_rank(Gf2Matrix m);

/// Edge-by-triangle incidence matrix of the complex (the boundary map from
/// triangles to edges).
Gf2Matrix boundary2(const CliqueComplex2& complex);

std::size_t betti0(const WindowGraph& window);
std::size_t betti0(const CliqueComplex2& complex);

/// beta_1 = (|E| - |V| + beta_0) - rank(boundary2).
std::size_t betti1(const CliqueComplex2& complex);

struct PersistencePair {
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();

  bool essential() const noexcept { return death == std::numeric_limits<double>::infinity(); }
  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

struct PersistenceDiagram {
  int dimension = 0;
  std::vector<PersistencePair> points;
};

/// Degree-0 sublevel persistence of a graph filtered by edge values.
///
/// A vertex enters at the smallest value among its incident edges; vertices with
/// no incident edge never enter. Edges are swept in ascending value order (ties
/// by position). An edge joining two components kills the one born later (elder
/// rule; equal births keep the component whose oldest vertex has the smaller id)
/// and records (birth, value). Each final component yields (birth, +inf).
/// Points with birth == death are dropped unless `keep_zero_persistence`.
///
/// `edges` and `values` are parallel; `edges` must hold distinct pairs.
PersistenceDiagram sublevel_persistence0(std::size_t num_nodes, std::span<const Edge> edges,
                                         std::span<const double> values,
                                         bool keep_zero_persistence = false);

/// Same, with each pair valued at its earliest event.
PersistenceDiagram sublevel_persistence0(const TemporalGraph& graph,
                                         bool keep_zero_persistence = false);

/// Per-pair minimum event timestamp, in static_projection(graph).edges order.
std::vector<double> earliest_edge_times(const TemporalGraph& graph);

struct BettiVector {
  std::vector<double> thresholds;
  std::vector<std::int64_t> values;
};

/// values[j] = #{(b, d) in pd : b <= thresholds[j] < d}.
BettiVector betti_curve(const PersistenceDiagram& pd, std::span<const double> thresholds);

/// Plain L1 distance between two curves on the same grid.
double l1_distance(const BettiVector& a, const BettiVector& b);

/// L1 distance of the step functions the curves sample: the difference at
/// thresholds[j] is weighted by thresholds[j+1] - thresholds[j]. The last grid
/// point carries no weight.
double gap_weighted_l1_distance(const BettiVector& a, const BettiVector& b);

/// phi_t = (|V_t|, |E_t|, beta_0, beta_1) of a window's clique complex.
struct TopoDescriptor {
  std::int64_t v_count = 0;
  std::int64_t e_count = 0;
  std::int64_t betti0 = 0;
  std::int64_t betti1 = 0;

  friend bool operator==(const TopoDescriptor&, const TopoDescriptor&) = default;
};

/// With `count_multiplicity`, e_count counts events instead of distinct pairs.
TopoDescriptor topo_descriptor(const WindowGraph& window, bool count_multiplicity = false);

}  // namespace t3f
