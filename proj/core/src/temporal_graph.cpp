#include "t3f/temporal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "t3f/error.hpp"
#include "t3f/text.hpp"

namespace t3f {

TemporalGraph TemporalGraph::from_events(std::size_t num_nodes, std::vector<Event> events,
                                         std::optional<int> label, bool allow_empty) {
  if (events.empty() && !allow_empty) {
    throw Error(ErrorCode::EmptyEventList, "temporal graph has no events");
  }
  for (const auto& e : events) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw Error(ErrorCode::OutOfRangeNode,
                  "event (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                      ") outside [0," + std::to_string(num_nodes) + ")");
    }
    if (e.u == e.v) {
      throw Error(ErrorCode::SelfLoop, "event on node " + std::to_string(e.u));
    }
    if (!std::isfinite(e.t)) {
      throw Error(ErrorCode::NonFiniteValue, "event timestamp is not finite");
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });

  TemporalGraph g;
  g.num_nodes_ = num_nodes;
  g.events_ = std::move(events);
  g.label_ = label;
  if (!g.events_.empty()) {
    g.t_min_ = g.events_.front().t;
    g.t_max_ = g.events_.back().t;
  }
  return g;
}

TemporalGraph TemporalGraph::with_label(std::optional<int> label) const {
  TemporalGraph g = *this;
  g.label_ = label;
  return g;
}

WindowSpec WindowSpec::make(double delta, double sigma) {
  WindowSpec spec{delta, sigma};
  spec.validate();
  return spec;
}

void WindowSpec::validate() const {
  if (!(delta > 0.0) || !(sigma > 0.0) || !(sigma < delta) || !std::isfinite(delta)) {
    throw Error(ErrorCode::InvalidWindowSpec, "need 0 < sigma < delta, got delta=" +
                                                  text::format_double(delta) +
                                                  " sigma=" + text::format_double(sigma));
  }
}

std::size_t WindowGraph::local_index(NodeId global) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), global);
  if (it == nodes.end() || *it != global) {
    throw Error(ErrorCode::OutOfRangeNode, "node " + std::to_string(global) + " not in window");
  }
  return static_cast<std::size_t>(it - nodes.begin());
}

std::vector<Edge> WindowGraph::local_edges() const {
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (const auto& e : edges) {
    out.push_back(Edge{static_cast<NodeId>(local_index(e.u)),
                       static_cast<NodeId>(local_index(e.v))});
  }
  return out;
}

WindowGraph WindowGraph::from_edges(std::span<const Edge> input) {
  WindowGraph w;
  std::vector<Edge> all;
  all.reserve(input.size());
  for (const auto& e : input) {
    if (e.u == e.v) throw Error(ErrorCode::SelfLoop, "self-loop in window edge list");
    all.push_back(Edge::make(e.u, e.v));
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    w.edges.push_back(all[i]);
    w.multiplicity.push_back(static_cast<std::uint32_t>(j - i));
    w.nodes.push_back(all[i].u);
    w.nodes.push_back(all[i].v);
    i = j;
  }
  std::sort(w.nodes.begin(), w.nodes.end());
  w.nodes.erase(std::unique(w.nodes.begin(), w.nodes.end()), w.nodes.end());
  return w;
}

StaticGraph StaticGraph::from_edges(std::size_t num_nodes, std::vector<Edge> edges) {
  StaticGraph g;
  g.num_nodes = num_nodes;
  for (auto& e : edges) {
    if (e.u == e.v) throw Error(ErrorCode::SelfLoop, "self-loop in static graph");
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw Error(ErrorCode::OutOfRangeNode, "edge endpoint outside node range");
    }
    e = Edge::make(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);
  g.neighbors.assign(num_nodes, {});
  for (const auto& e : g.edges) {
    g.neighbors[e.u].push_back(e.v);
    g.neighbors[e.v].push_back(e.u);
  }
  for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());
  return g;
}

namespace {

// Smallest k >= 0 such that window k, [t_min + k*sigma, t_min + k*sigma + delta],
// reaches t_max. Starts from the closed formula and corrects for rounding so that
// the count agrees with the membership test used by window().
std::size_t last_window_index(double t_min, double t_max, const WindowSpec& spec) {
  const double span = t_max - t_min;
  if (span <= spec.delta) return 0;
  auto k = static_cast<std::size_t>(std::max(0.0, std::ceil((span - spec.delta) / spec.sigma)));
  const auto reaches = [&](std::size_t i) {
    return t_min + static_cast<double>(i) * spec.sigma + spec.delta >= t_max;
  };
  while (k > 0 && reaches(k - 1)) --k;
  while (!reaches(k)) ++k;
  return k;
}

}  // namespace

std::size_t window_count(double span, const WindowSpec& spec) {
  spec.validate();
  return last_window_index(0.0, span, spec) + 1;
}

std::size_t window_count(const TemporalGraph& graph, const WindowSpec& spec) {
  spec.validate();
  if (graph.empty()) throw Error(ErrorCode::EmptyGraph, "window_count on a graph with no events");
  return last_window_index(graph.t_min(), graph.t_max(), spec) + 1;
}

WindowGraph window(const TemporalGraph& graph, double t, double delta, std::size_t window_index) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidWindowSpec, "window length must be positive");
  const double t_end = t + delta;
  const auto events = graph.events();
  const auto first = std::lower_bound(events.begin(), events.end(), t,
                                      [](const Event& e, double x) { return e.t < x; });
  const auto last = std::upper_bound(first, events.end(), t_end,
                                     [](double x, const Event& e) { return x < e.t; });
  std::vector<Edge> pairs;
  pairs.reserve(static_cast<std::size_t>(last - first));
  for (auto it = first; it != last; ++it) pairs.push_back(Edge::make(it->u, it->v));

  WindowGraph w = WindowGraph::from_edges(pairs);
  w.window_index = window_index;
  w.t_start = t;
  w.delta = delta;
  return w;
}

std::vector<WindowGraph> window_sequence(const TemporalGraph& graph, const WindowSpec& spec) {
  const std::size_t n = window_count(graph, spec);
  std::vector<WindowGraph> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double start = graph.t_min() + static_cast<double>(i) * spec.sigma;
    out.push_back(window(graph, start, spec.delta, i));
  }
  return out;
}

std::vector<double> distinct_timestamps(const TemporalGraph& graph) {
  std::vector<double> ts;
  ts.reserve(graph.events().size());
  for (const auto& e : graph.events()) {
    if (ts.empty() || ts.back() != e.t) ts.push_back(e.t);
  }
  return ts;
}

DenseMatrix temporal_degree(const TemporalGraph& graph, std::span<const double> timesteps) {
  if (timesteps.empty()) throw Error(ErrorCode::EmptyTimesteps, "empty timestep grid");
  DenseMatrix deg(graph.num_nodes(), timesteps.size());
  for (const auto& e : graph.events()) {
    const auto it = std::lower_bound(timesteps.begin(), timesteps.end(), e.t);
    if (it == timesteps.end() || *it != e.t) continue;
    const auto j = static_cast<std::size_t>(it - timesteps.begin());
    deg(e.u, j) += 1.0;
    deg(e.v, j) += 1.0;
  }
  return deg;
}

DenseMatrix binarize(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (double& x : out.data()) x = x != 0.0 ? 1.0 : 0.0;
  return out;
}

StaticGraph static_projection(const TemporalGraph& graph) {
  std::vector<Edge> edges;
  edges.reserve(graph.events().size());
  for (const auto& e : graph.events()) edges.push_back(Edge::make(e.u, e.v));
  return StaticGraph::from_edges(graph.num_nodes(), std::move(edges));
}

TemporalGraph read_temporal_graph(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> num_nodes;
  std::optional<int> label;
  std::vector<Event> events;

  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = text::split_ws(body);

    if (!num_nodes) {
      if (fields.size() < 2 || fields[0] != "n") {
        throw ParseError(source_name, line_no, "expected header `n <num_nodes> label <class-id>`");
      }
      const auto n = text::parse_int(fields[1]);
      if (!n || *n < 0) throw ParseError(source_name, line_no, "bad node count");
      num_nodes = static_cast<std::size_t>(*n);
      if (fields.size() == 4 && fields[2] == "label") {
        const auto c = text::parse_int(fields[3]);
        if (!c) throw ParseError(source_name, line_no, "bad label");
        label = static_cast<int>(*c);
      } else if (fields.size() != 2) {
        throw ParseError(source_name, line_no, "expected header `n <num_nodes> label <class-id>`");
      }
      continue;
    }

    if (fields.size() != 3) throw ParseError(source_name, line_no, "expected `u v t`");
    const auto u = text::parse_int(fields[0]);
    const auto v = text::parse_int(fields[1]);
    const auto t = text::parse_double(fields[2]);
    if (!u || !v || !t || !std::isfinite(*t)) {
      throw ParseError(source_name, line_no, "expected `u v t`");
    }
    if (*u < 0 || *v < 0 || static_cast<std::size_t>(*u) >= *num_nodes ||
        static_cast<std::size_t>(*v) >= *num_nodes) {
      throw ParseError(source_name, line_no, "node id out of range");
    }
    if (*u == *v) throw ParseError(source_name, line_no, "self-loop");
    events.push_back(Event{static_cast<NodeId>(*u), static_cast<NodeId>(*v), *t});
  }
  if (!num_nodes) throw ParseError(source_name, line_no, "missing header");
  return TemporalGraph::from_events(*num_nodes, std::move(events), label, true);
}

TemporalGraph read_temporal_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return read_temporal_graph(in, path);
}

void write_temporal_graph(std::ostream& out, const TemporalGraph& graph) {
  out << "n " << graph.num_nodes();
  if (graph.label()) out << " label " << *graph.label();
  out << '\n';
  for (const auto& e : graph.events()) {
    out << e.u << ' ' << e.v << ' ' << text::format_double(e.t) << '\n';
  }
}

}  // namespace t3f
