#include "t3f/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <string>

#include "t3f/error.hpp"
#include "t3f/rng.hpp"
#include "t3f/text.hpp"

namespace t3f {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Edge> erdos_renyi(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) edges.push_back({u, v});
    }
  }
  return edges;
}

std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

std::vector<Edge> toggle_pairs(std::size_t n, std::span<const Edge> edges, std::size_t k,
                               std::uint64_t seed) {
  std::set<Edge> present(edges.begin(), edges.end());
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : present) {
    ++degree[e.u];
    ++degree[e.v];
  }
  std::set<Edge> touched;
  Rng rng(seed);
  std::vector<Edge> candidates;
  for (std::size_t step = 0; step < k; ++step) {
    candidates.clear();
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        const Edge e{u, v};
        if (touched.count(e)) continue;
        if (present.count(e) && (degree[u] == 1 || degree[v] == 1)) continue;
        candidates.push_back(e);
      }
    }
    if (candidates.empty()) {
      throw Error(ErrorCode::InfeasibleK, "no admissible pair left after " + std::to_string(step) +
                                              " of " + std::to_string(k) + " modifications");
    }
    const Edge e = candidates[rng.below(candidates.size())];
    touched.insert(e);
    if (present.erase(e)) {
      --degree[e.u];
      --degree[e.v];
    } else {
      present.insert(e);
      ++degree[e.u];
      ++degree[e.v];
    }
  }
  return {present.begin(), present.end()};
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return kNaN;
  double s = 0.0;
  for (const double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double ratio_of(double distance, double magnitude) {
  return magnitude > 0.0 ? distance / magnitude : kNaN;
}

void finish(StabilityReport& r, std::span<const double> eps_list) {
  r.empirical_constant = 0.0;
  for (const auto& t : r.trials) {
    if (t.magnitude > 0.0) r.empirical_constant = std::max(r.empirical_constant, t.ratio);
  }
  if (r.mode != StabilityMode::Topo) return;
  for (const double eps : eps_list) {
    EpsSummary s;
    s.eps = eps;
    std::vector<double> mags, dists;
    for (const auto& t : r.trials) {
      if (t.eps != eps) continue;
      mags.push_back(t.magnitude);
      dists.push_back(t.distance);
      if (t.magnitude > 0.0) s.sup_ratio = std::max(s.sup_ratio, t.ratio);
    }
    s.mean_magnitude = mean_of(mags);
    s.mean_distance = mean_of(dists);
    r.per_eps.push_back(s);
  }
}

void add_topo_trials(StabilityReport& r, const TemporalGraph& g, std::size_t trial,
                     std::span<const double> eps_list, std::uint64_t seed) {
  const auto projection = static_projection(g);
  for (const double eps : eps_list) {
    const auto t = topo_stability_trial(g, eps, seed);
    r.trials.push_back({trial, t.rhs, t.lhs, ratio_of(t.lhs, t.rhs), eps, g.num_nodes(),
                        projection.edges.size()});
  }
}

}  // namespace

PerturbedTimestamps perturb_timestamps(const TemporalGraph& graph, double eps, std::uint64_t seed) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidSpec, "eps must be positive");
  Rng rng(seed);
  std::vector<Event> events(graph.events().begin(), graph.events().end());
  double l1 = 0.0;
  for (auto& e : events) {
    const double shifted = e.t + eps * rng.uniform(-1.0, 1.0);
    l1 += std::abs(shifted - e.t);
    e.t = shifted;
  }
  return {TemporalGraph::from_events(graph.num_nodes(), std::move(events), graph.label(), true), l1};
}

StaticGraph perturb_edges(const StaticGraph& graph, std::size_t k, std::uint64_t seed) {
  return StaticGraph::from_edges(graph.num_nodes, toggle_pairs(graph.num_nodes, graph.edges, k, seed));
}

WindowGraph perturb_edges(const WindowGraph& window, std::size_t k, std::uint64_t seed) {
  const auto local = window.local_edges();
  auto toggled = toggle_pairs(window.num_nodes(), local, k, seed);
  for (auto& e : toggled) e = Edge::make(window.nodes[e.u], window.nodes[e.v]);
  auto out = WindowGraph::from_edges(toggled);
  out.window_index = window.window_index;
  out.t_start = window.t_start;
  out.delta = window.delta;
  return out;
}

std::size_t edge_symmetric_difference(std::span<const Edge> a, std::span<const Edge> b) {
  std::set<Edge> sa(a.begin(), a.end());
  std::set<Edge> sb(b.begin(), b.end());
  std::vector<Edge> diff;
  std::set_symmetric_difference(sa.begin(), sa.end(), sb.begin(), sb.end(),
                                std::back_inserter(diff));
  return diff.size();
}

double betti0_curve_distance(std::size_t num_nodes, std::span<const Edge> edges,
                             std::span<const double> values_a, std::span<const double> values_b) {
  if (edges.empty()) return 0.0;
  const auto pa = sublevel_persistence0(num_nodes, edges, values_a);
  const auto pb = sublevel_persistence0(num_nodes, edges, values_b);
  std::vector<double> grid(values_a.begin(), values_a.end());
  grid.insert(grid.end(), values_b.begin(), values_b.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return gap_weighted_l1_distance(betti_curve(pa, grid), betti_curve(pb, grid));
}

TopoTrial topo_stability_trial(const TemporalGraph& graph, double eps, std::uint64_t seed) {
  if (graph.empty()) throw Error(ErrorCode::EmptyEventList, "stability trial needs events");
  const auto perturbed = perturb_timestamps(graph, eps, seed);
  const auto projection = static_projection(graph);
  const auto a = earliest_edge_times(graph);
  const auto b = earliest_edge_times(perturbed.graph);
  return {betti0_curve_distance(graph.num_nodes(), projection.edges, a, b), perturbed.l1};
}

SpectralTrial spectral_stability_trial(const WindowGraph& window, std::size_t k,
                                       std::uint64_t seed, std::size_t dos_bins) {
  if (window.empty()) throw Error(ErrorCode::EmptyWindow, "stability trial needs a non-empty window");
  const auto before = spectral_descriptor(window, dos_bins);
  const auto after = spectral_descriptor(perturb_edges(window, k, seed), dos_bins);
  return {wasserstein1_hist(before, after),
          static_cast<double>(k) / static_cast<double>(window.num_nodes())};
}

std::string_view to_string(StabilityMode mode) noexcept {
  return mode == StabilityMode::Topo ? "topo" : "spectral";
}

StabilityMode parse_stability_mode(std::string_view s) {
  if (s == "topo") return StabilityMode::Topo;
  if (s == "spectral") return StabilityMode::Spectral;
  throw Error(ErrorCode::InvalidConfig, "unknown stability mode '" + std::string(s) + "'");
}

CampaignSpec CampaignSpec::topo_default() { return {}; }

CampaignSpec CampaignSpec::spectral_default() {
  CampaignSpec s;
  s.mode = StabilityMode::Spectral;
  s.min_nodes = 20;
  s.max_nodes = 60;
  return s;
}

StabilityReport run_campaign(const CampaignSpec& spec) {
  if (spec.min_nodes < 2 || spec.max_nodes < spec.min_nodes) {
    throw Error(ErrorCode::InvalidSpec, "bad node range");
  }
  StabilityReport r;
  r.mode = spec.mode;
  for (std::size_t i = 0; i < spec.trials; ++i) {
    Rng rng(mix_seed(spec.seed, i));
    const std::size_t n = uniform_size(rng, spec.min_nodes, spec.max_nodes);
    auto edges = erdos_renyi(n, spec.edge_prob, rng);
    if (edges.empty()) edges.push_back({0, 1});
    const std::uint64_t trial_seed = rng.next_u64();
    if (spec.mode == StabilityMode::Topo) {
      std::vector<Event> events;
      for (const auto& e : edges) {
        const std::size_t count = uniform_size(rng, 1, 3);
        for (std::size_t c = 0; c < count; ++c) {
          events.push_back({e.u, e.v, rng.uniform(0.0, spec.time_span)});
        }
      }
      const auto g = TemporalGraph::from_events(n, std::move(events));
      add_topo_trials(r, g, i, spec.eps, trial_seed);
    } else {
      const auto w = WindowGraph::from_edges(edges);
      const std::size_t k = uniform_size(rng, std::min<std::size_t>(1, spec.max_k), spec.max_k);
      const auto t = spectral_stability_trial(w, k, trial_seed, spec.dos_bins);
      r.trials.push_back({i, t.ratio_base, t.w1, ratio_of(t.w1, t.ratio_base), 0.0,
                          w.num_nodes(), w.num_edges()});
    }
  }
  finish(r, spec.eps);
  return r;
}

StabilityReport run_campaign(const Dataset& dataset, const CampaignSpec& spec,
                             const WindowSpec& window_spec) {
  dataset.validate();
  StabilityReport r;
  r.mode = spec.mode;
  for (std::size_t i = 0; i < spec.trials; ++i) {
    Rng rng(mix_seed(spec.seed, i));
    const auto& g = dataset.graphs[i % dataset.size()];
    const std::uint64_t trial_seed = rng.next_u64();
    if (spec.mode == StabilityMode::Topo) {
      add_topo_trials(r, g, i, spec.eps, trial_seed);
      continue;
    }
    std::vector<WindowGraph> windows;
    for (auto& w : window_sequence(g, window_spec)) {
      if (!w.empty()) windows.push_back(std::move(w));
    }
    if (windows.empty()) {
      ++r.skipped;
      continue;
    }
    const auto& w = windows[rng.below(windows.size())];
    const std::size_t k = uniform_size(rng, std::min<std::size_t>(1, spec.max_k), spec.max_k);
    try {
      const auto t = spectral_stability_trial(w, k, trial_seed, spec.dos_bins);
      r.trials.push_back({i, t.ratio_base, t.w1, ratio_of(t.w1, t.ratio_base), 0.0,
                          w.num_nodes(), w.num_edges()});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleK) throw;
      ++r.skipped;
    }
  }
  finish(r, spec.eps);
  return r;
}

void write_stability_csv(std::ostream& out, const StabilityReport& report) {
  using text::format_double;
  const auto mode = to_string(report.mode);
  out << "trial,mode,magnitude,distance,ratio\n";
  std::vector<double> mags, dists;
  for (const auto& t : report.trials) {
    out << t.trial << ',' << mode << ',' << format_double(t.magnitude) << ','
        << format_double(t.distance) << ',' << format_double(t.ratio) << '\n';
    mags.push_back(t.magnitude);
    dists.push_back(t.distance);
  }
  for (const auto& s : report.per_eps) {
    out << "eps=" << format_double(s.eps) << ',' << mode << ',' << format_double(s.mean_magnitude)
        << ',' << format_double(s.mean_distance) << ',' << format_double(s.sup_ratio) << '\n';
  }
  out << "summary," << mode << ',' << format_double(mean_of(mags)) << ','
      << format_double(mean_of(dists)) << ',' << format_double(report.empirical_constant) << '\n';
}

}  // namespace t3f
