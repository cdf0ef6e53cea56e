#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "t3f/error.hpp"
#include "t3f/topology.hpp"

using namespace t3f;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Edge> complete(NodeId n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) e.push_back({u, v});
  return e;
}

const std::vector<Edge> kC4{{0, 1}, {1, 2}, {2, 3}, {0, 3}};

bool contains(const PersistenceDiagram& pd, PersistencePair p) {
  return std::find(pd.points.begin(), pd.points.end(), p) != pd.points.end();
}

}  // namespace

TEST_CASE("clique complex counts") {
  const auto k3 = clique_complex(3, complete(3));
  CHECK(k3.vertices == 3);
  CHECK(k3.edges.size() == 3);
  CHECK(k3.triangles.size() == 1);
  CHECK(clique_complex(4, kC4).triangles.empty());
  const auto k4 = clique_complex(4, complete(4));
  CHECK(k4.edges.size() == 6);
  CHECK(k4.triangles.size() == 4);

  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.below(8);
    const auto edges = oracle::random_graph(n, 0.5, rng);
    const auto cx = clique_complex(n, edges);
    std::set<Edge> es(edges.begin(), edges.end());
    std::size_t tri = 0;
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b)
        for (NodeId c = b + 1; c < n; ++c) tri += es.count({a, b}) && es.count({a, c}) && es.count({b, c});
    CHECK(cx.triangles.size() == tri);
    for (const auto& t : cx.triangles) {
      CHECK(t[0] < t[1]);
      CHECK(t[1] < t[2]);
    }
  }
}

TEST_CASE("gf2 rank") {
  Gf2Matrix id(3, 3);
  for (std::size_t i = 0; i < 3; ++i) id.set(i, i);
  CHECK(gf2_rank(id) == 3);
  CHECK(gf2_rank(Gf2Matrix(4, 5)) == 0);
  CHECK(gf2_rank(boundary2(clique_complex(4, complete(4)))) == 3);

  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng.below(90), c = 1 + rng.below(90);
    Gf2Matrix m(r, c);
    std::vector<std::vector<int>> dense(r, std::vector<int>(c, 0));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (rng.uniform() < 0.3) {
          m.set(i, j);
          dense[i][j] = 1;
        }
    CHECK(gf2_rank(m) == oracle::dense_gf2_rank(dense));
  }
}

TEST_CASE("betti numbers on small complexes") {
  CHECK(betti0(WindowGraph{}) == 0);
  CHECK(betti0(WindowGraph::from_edges(std::vector<Edge>{{0, 1}, {2, 3}})) == 2);
  CHECK(betti1(clique_complex(4, kC4)) == 1);
  CHECK(betti1(clique_complex(4, complete(4))) == 0);
  const std::vector<Edge> two_tri{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}};
  CHECK(betti1(clique_complex(6, two_tri)) == 0);
  CHECK(betti0(clique_complex(6, two_tri)) == 2);
}

TEST_CASE("betti numbers match BFS and full boundary matrices") {
  Rng rng(21);
  const double ps[] = {0.2, 0.4, 0.6};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    const auto edges = oracle::random_graph(n, ps[trial % 3], rng);
    const auto w = WindowGraph::from_edges(edges);
    const auto cx = clique_complex(w);
    CHECK(betti0(w) == oracle::bfs_components(n, edges));
    CHECK(betti1(cx) == oracle::betti1_full(n, edges));
    // Euler characteristic of the 2-complex.
    const auto rank2 = cx.triangles.empty() ? 0 : gf2_rank(boundary2(cx));
    const auto b2 = static_cast<long>(cx.triangles.size() - rank2);
    CHECK(static_cast<long>(cx.vertices) - static_cast<long>(cx.edges.size()) +
              static_cast<long>(cx.triangles.size()) ==
          static_cast<long>(betti0(cx)) - static_cast<long>(betti1(cx)) + b2);
  }
}

TEST_CASE("topo descriptor") {
  CHECK(topo_descriptor(WindowGraph{}) == TopoDescriptor{0, 0, 0, 0});
  CHECK(topo_descriptor(WindowGraph::from_edges(kC4)) == TopoDescriptor{4, 4, 1, 1});
  CHECK(topo_descriptor(WindowGraph::from_edges(complete(4))) == TopoDescriptor{4, 6, 1, 0});
  auto w = WindowGraph::from_edges(kC4);
  w.multiplicity = {3, 1, 1, 1};
  CHECK(topo_descriptor(w, true).e_count == 6);
  CHECK(topo_descriptor(w, false).e_count == 4);
}

TEST_CASE("sublevel persistence examples") {
  const std::vector<Edge> path{{0, 1}, {1, 2}};
  const std::vector<double> pv{1, 2};
  const auto pd = sublevel_persistence0(3, path, pv);
  CHECK(pd.points == std::vector<PersistencePair>{{1, kInf}});
  const auto pdz = sublevel_persistence0(3, path, pv, true);
  CHECK(contains(pdz, {2, 2}));
  CHECK(contains(pdz, {1, kInf}));
  // Every vertex is born once, so each contributes exactly one point.
  CHECK(pdz.points.size() == 3);

  const std::vector<Edge> single{{0, 1}};
  const std::vector<double> sv{4.5};
  CHECK(sublevel_persistence0(2, single, sv).points == std::vector<PersistencePair>{{4.5, kInf}});

  CHECK(betti_curve(pd, std::vector<double>{1, 2}).values == std::vector<std::int64_t>{1, 1});
  CHECK_THROWS_AS(sublevel_persistence0(3, path, std::vector<double>{1}), Error);
}

TEST_CASE("triangle persistence against a sweep") {
  const std::vector<Edge> tri{{0, 1}, {1, 2}, {0, 2}};
  const std::vector<double> vals{1, 2, 3};
  const auto pd = sublevel_persistence0(3, tri, vals, true);
  for (const double t : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    const auto bc = betti_curve(pd, std::vector<double>{t});
    CHECK(static_cast<std::size_t>(bc.values[0]) ==
          oracle::sublevel_components(3, tri, vals, t));
  }
  CHECK(contains(pd, {1, kInf}));
}

TEST_CASE("betti curve of PD0 equals sublevel component count") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(12);
    auto edges = oracle::random_graph(n, 0.4, rng);
    if (edges.empty()) continue;
    std::vector<double> vals;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      vals.push_back(trial % 2 ? static_cast<double>(rng.below(5)) : rng.uniform(0, 10));
    }
    const auto pd = sublevel_persistence0(n, edges, vals, trial % 3 == 0);
    std::vector<double> grid;
    for (double t = -1; t <= 11; t += 0.25) grid.push_back(t);
    const auto bc = betti_curve(pd, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      CHECK(static_cast<std::size_t>(bc.values[j]) ==
            oracle::sublevel_components(n, edges, vals, grid[j]));
    }
    for (const auto& p : pd.points) CHECK(p.birth <= p.death);
    // Once all vertices have entered, the curve can only go down.
    const double all_born = *std::max_element(vals.begin(), vals.end());
    for (std::size_t j = 1; j < grid.size(); ++j) {
      if (grid[j - 1] >= all_born) CHECK(bc.values[j] <= bc.values[j - 1]);
    }
  }
}

TEST_CASE("temporal graph persistence uses the earliest event per pair") {
  const auto g = TemporalGraph::from_events(3, {{0, 1, 5}, {1, 2, 2}, {0, 1, 1}});
  CHECK(earliest_edge_times(g) == std::vector<double>{1, 2});
  const auto pd = sublevel_persistence0(g, true);
  CHECK(contains(pd, {1, kInf}));
  CHECK(contains(pd, {2, 2}));
}

TEST_CASE("betti curves and distances") {
  PersistenceDiagram pd{0, {{1, kInf}}};
  CHECK(betti_curve(pd, std::vector<double>{0, 1, 2}).values == std::vector<std::int64_t>{0, 1, 1});
  CHECK(betti_curve(PersistenceDiagram{}, std::vector<double>{0, 1}).values ==
        std::vector<std::int64_t>{0, 0});
  CHECK_THROWS_AS(betti_curve(pd, std::vector<double>{}), Error);
  CHECK_THROWS_AS(betti_curve(pd, std::vector<double>{2, 1}), Error);

  const BettiVector a{{1, 2}, {1, 1}}, b{{1, 2}, {0, 1}}, c{{1, 3}, {0, 1}};
  CHECK(l1_distance(a, a) == 0);
  CHECK(l1_distance(a, b) == 1);
  CHECK_THROWS_AS(l1_distance(a, c), Error);
  CHECK(gap_weighted_l1_distance(a, b) == 1);
  const BettiVector d{{0, 0.5, 2}, {2, 1, 1}}, e{{0, 0.5, 2}, {1, 1, 3}};
  CHECK(gap_weighted_l1_distance(d, e) == doctest::Approx(0.5));

  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    BettiVector x, y;
    double sum = 0;
    for (int j = 0; j < 30; ++j) {
      x.thresholds.push_back(j);
      y.thresholds.push_back(j);
      x.values.push_back(static_cast<std::int64_t>(rng.below(6)));
      y.values.push_back(static_cast<std::int64_t>(rng.below(6)));
      sum += std::abs(static_cast<double>(x.values.back() - y.values.back()));
    }
    CHECK(l1_distance(x, y) == sum);
  }
}
