#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "t3f/error.hpp"
#include "t3f/stability.hpp"

using namespace t3f;

namespace {

TemporalGraph random_temporal(Rng& rng, std::size_t n) {
  std::vector<Event> ev;
  for (const auto& e : oracle::random_graph(n, 0.3, rng)) {
    for (int k = 0; k < 2; ++k) ev.push_back({e.u, e.v, rng.uniform(0, 10)});
  }
  if (ev.empty()) ev.push_back({0, 1, 1.0});
  return TemporalGraph::from_events(n, ev);
}

}  // namespace

TEST_CASE("timestamp perturbation") {
  Rng rng(1);
  const auto g = random_temporal(rng, 12);
  for (const double eps : {1.0, 1e-3, 1e-9}) {
    const auto p = perturb_timestamps(g, eps, 5);
    CHECK(p.graph.events().size() == g.events().size());
    CHECK(p.l1 <= eps * static_cast<double>(g.events().size()));
    CHECK(static_projection(p.graph).edges == static_projection(g).edges);
  }
  CHECK(perturb_timestamps(g, 1e-12, 5).l1 < 1e-9);

  // Re-sum |dt| by matching events by pair and order of appearance.
  const auto one = TemporalGraph::from_events(2, {{0, 1, 2.0}});
  const auto p1 = perturb_timestamps(one, 0.5, 9);
  CHECK(p1.l1 == doctest::Approx(std::abs(p1.graph.events()[0].t - 2.0)));

  Rng r2(7);
  for (int t = 0; t < 20; ++t) {
    std::vector<Event> ev;
    for (int k = 0; k < 15; ++k) ev.push_back({static_cast<NodeId>(k), static_cast<NodeId>(k + 1), r2.uniform(0, 100)});
    const auto gg = TemporalGraph::from_events(16, ev);
    const auto pp = perturb_timestamps(gg, 0.4, t);
    // Each pair carries one event, so the pair identifies it.
    double resum = 0;
    for (const auto& a : gg.events())
      for (const auto& b : pp.graph.events())
        if (a.u == b.u && a.v == b.v) resum += std::abs(a.t - b.t);
    CHECK(pp.l1 == doctest::Approx(resum).epsilon(1e-12));
  }
  CHECK_THROWS_AS(perturb_timestamps(g, 0.0, 1), Error);
}

TEST_CASE("edge perturbation") {
  const auto k3 = StaticGraph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(perturb_edges(k3, 0, 1).edges == k3.edges);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = perturb_edges(k3, 1, seed);
    CHECK(p.edges.size() == 2);
    CHECK(oracle::bfs_components(3, p.edges) == 1);
  }
  const auto k2 = WindowGraph::from_edges(std::vector<Edge>{{4, 9}});
  CHECK_THROWS_AS(perturb_edges(k2, 1, 1), Error);
  try {
    spectral_stability_trial(k2, 1, 1);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleK);
  }

  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 5 + rng.below(30);
    auto edges = oracle::random_graph(n, 0.3, rng);
    if (edges.size() < 2) continue;
    const auto w = WindowGraph::from_edges(edges);
    const std::size_t k = rng.below(6);
    const auto p = perturb_edges(w, k, t);
    CHECK(edge_symmetric_difference(w.edges, p.edges) == k);
    CHECK(p.nodes == w.nodes);
  }
}

TEST_CASE("topological trials") {
  Rng rng(2);
  const auto g = random_temporal(rng, 10);
  // Identical functions: nothing to compare.
  const auto proj = static_projection(g);
  const auto times = earliest_edge_times(g);
  CHECK(betti0_curve_distance(g.num_nodes(), proj.edges, times, times) == 0);

  // A 3-edge path whose first two values swap places.
  const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}};
  const std::vector<double> a{1, 2, 3}, b{2, 1, 3};
  CHECK(betti0_curve_distance(4, path, a, b) ==
        doctest::Approx(oracle::sublevel_curve_l1(4, path, a, b)));
  const std::vector<double> c{1, 3, 2};
  CHECK(betti0_curve_distance(4, path, a, c) ==
        doctest::Approx(oracle::sublevel_curve_l1(4, path, a, c)));

  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 4 + rng.below(8);
    const auto edges = oracle::random_graph(n, 0.5, rng);
    if (edges.empty()) continue;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      x.push_back(rng.uniform(0, 5));
      y.push_back(x.back() + rng.uniform(-1, 1));
    }
    CHECK(betti0_curve_distance(n, edges, x, y) ==
          doctest::Approx(oracle::sublevel_curve_l1(n, edges, x, y)));
  }

  // Shifting a repeated, non-earliest event leaves every earliest time alone,
  // so the curves cannot move even though the timestamps did.
  const auto rep = TemporalGraph::from_events(3, {{0, 1, 1}, {1, 2, 2}, {0, 1, 5}});
  const auto shifted = TemporalGraph::from_events(3, {{0, 1, 1}, {1, 2, 2}, {0, 1, 5.01}});
  CHECK(betti0_curve_distance(3, static_projection(rep).edges, earliest_edge_times(rep),
                              earliest_edge_times(shifted)) == 0);

  const auto trial = topo_stability_trial(g, 1e-3, 4);
  CHECK(trial.lhs >= 0);
  CHECK(trial.rhs > 0);
}

TEST_CASE("spectral trials") {
  Rng rng(4);
  const auto w = WindowGraph::from_edges(oracle::random_graph(30, 0.2, rng));
  const auto zero = spectral_stability_trial(w, 0, 1);
  CHECK(zero.w1 == 0);
  CHECK(zero.ratio_base == 0);
  const auto t = spectral_stability_trial(w, 2, 77);
  CHECK(t.ratio_base == doctest::Approx(2.0 / static_cast<double>(w.num_nodes())));
  const auto again = perturb_edges(w, 2, 77);
  const double direct = wasserstein1_hist(spectral_descriptor(w), spectral_descriptor(again));
  CHECK(t.w1 == direct);
}

TEST_CASE("campaigns") {
  auto spec = CampaignSpec::topo_default();
  spec.trials = 30;
  const auto a = run_campaign(spec);
  const auto b = run_campaign(spec);
  std::ostringstream sa, sb;
  write_stability_csv(sa, a);
  write_stability_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(a.trials.size() == 90);
  CHECK(a.per_eps.size() == 3);
  CHECK(std::isfinite(a.empirical_constant));
  for (const auto& t : a.trials) CHECK(t.distance >= 0);
  CHECK(sa.str().rfind("trial,mode,magnitude,distance,ratio\n", 0) == 0);
  CHECK(sa.str().find("\nsummary,topo,") != std::string::npos);

  auto none = CampaignSpec::spectral_default();
  none.trials = 30;
  none.max_k = 0;
  const auto z = run_campaign(none);
  for (const auto& t : z.trials) CHECK(t.distance == 0);
  CHECK(z.empirical_constant == 0);

  CHECK(parse_stability_mode("spectral") == StabilityMode::Spectral);
  CHECK_THROWS_AS(parse_stability_mode("x"), Error);
}
