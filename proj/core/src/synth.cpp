#include "t3f/synth.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>

#include "t3f/error.hpp"
#include "t3f/rng.hpp"
#include "t3f/text.hpp"

namespace t3f {

void SynthSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); };
  if (classes < 2) fail("need at least two classes");
  if (cycle_density.size() != classes) fail("cycle_density needs one entry per class");
  if (std::set<std::size_t>(cycle_density.begin(), cycle_density.end()).size() != classes) {
    fail("cycle_density entries must be distinct across classes");
  }
  if (nodes < 4) fail("need at least 4 nodes");
  if (timesteps < 2) fail("need at least 2 timesteps");
  if (num_graphs < classes) fail("need at least one graph per class");
  if (!(fire_prob > 0.0 && fire_prob <= 1.0)) fail("fire_prob must lie in (0, 1]");
  const std::size_t max_chords = *std::max_element(cycle_density.begin(), cycle_density.end());
  // Triangle-free chord placement needs room; a loose bound.
  if (max_chords > (nodes * (nodes - 1)) / 8) fail("cycle_density too large for the node count");
}

SynthSpec parse_synth_spec(std::istream& in, const std::string& source_name) {
  SynthSpec spec;
  std::string line;
  std::size_t line_no = 0;
  const auto count = [&](std::string_view v) {
    const auto x = text::parse_int(v);
    if (!x || *x < 0) throw ParseError(source_name, line_no, "expected a non-negative integer");
    return static_cast<std::size_t>(*x);
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto body = text::trim(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = text::trim(body.substr(0, hash));
    }
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(source_name, line_no, "expected `key = value`");
    const auto key = text::trim(body.substr(0, eq));
    const auto value = text::trim(body.substr(eq + 1));
    if (key == "name") spec.name = std::string(value);
    else if (key == "num_graphs") spec.num_graphs = count(value);
    else if (key == "nodes") spec.nodes = count(value);
    else if (key == "timesteps") spec.timesteps = count(value);
    else if (key == "classes") spec.classes = count(value);
    else if (key == "redraw_every") spec.redraw_every = count(value);
    else if (key == "fire_prob") {
      const auto p = text::parse_double(value);
      if (!p) throw ParseError(source_name, line_no, "expected a number");
      spec.fire_prob = *p;
    } else if (key == "cycle_density") {
      spec.cycle_density.clear();
      for (const auto item : text::split(value, ',')) spec.cycle_density.push_back(count(item));
    } else {
      throw ParseError(source_name, line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  spec.validate();
  return spec;
}

SynthSpec read_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidSpec, "cannot open synth spec " + path);
  return parse_synth_spec(in, path);
}

namespace {

std::vector<Edge> draw_scaffold(std::size_t n, std::size_t chords, Rng& rng) {
  // Random recursive tree over a shuffled vertex order.
  std::vector<NodeId> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<NodeId>(i);
  rng.shuffle(order.begin(), order.end());
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    const NodeId parent = order[rng.below(i)];
    edges.push_back(Edge::make(order[i], parent));
    adj[order[i]][parent] = adj[parent][order[i]] = true;
  }
  const auto closes_triangle = [&](NodeId a, NodeId b) {
    for (std::size_t w = 0; w < n; ++w) {
      if (adj[a][w] && adj[b][w]) return true;
    }
    return false;
  };
  std::size_t placed = 0;
  for (std::size_t attempt = 0; placed < chords && attempt < 100000; ++attempt) {
    const auto a = static_cast<NodeId>(rng.below(n));
    const auto b = static_cast<NodeId>(rng.below(n));
    if (a == b || adj[a][b] || closes_triangle(a, b)) continue;
    edges.push_back(Edge::make(a, b));
    adj[a][b] = adj[b][a] = true;
    ++placed;
  }
  if (placed < chords) throw Error(ErrorCode::InvalidSpec, "could not place triangle-free chords");
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

Dataset synth_generate(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  Dataset ds;
  ds.name = spec.name;
  ds.num_classes = spec.classes;
  const std::size_t width = std::to_string(spec.num_graphs - 1).size();

  for (std::size_t i = 0; i < spec.num_graphs; ++i) {
    const int label = static_cast<int>(i % spec.classes);
    Rng rng(mix_seed(seed, i));
    std::vector<Edge> scaffold;
    std::vector<Event> events;
    for (std::size_t t = 0; t < spec.timesteps; ++t) {
      if (t == 0 || (spec.redraw_every > 0 && t % spec.redraw_every == 0)) {
        scaffold = draw_scaffold(spec.nodes, spec.cycle_density[label], rng);
      }
      const double ts = static_cast<double>(t);
      bool fired = false;
      for (const auto& e : scaffold) {
        if (rng.bernoulli(spec.fire_prob)) {
          events.push_back(Event{e.u, e.v, ts});
          fired = true;
        }
      }
      // Keep the time span fixed at [0, timesteps - 1].
      if (!fired && (t == 0 || t + 1 == spec.timesteps)) {
        const auto& e = scaffold[rng.below(scaffold.size())];
        events.push_back(Event{e.u, e.v, ts});
      }
    }
    std::string id = std::to_string(i);
    id.insert(0, width - id.size(), '0');
    ds.graphs.push_back(TemporalGraph::from_events(spec.nodes, std::move(events), label));
    ds.graph_ids.push_back("g" + id);
    ds.provided_features.emplace_back();
  }
  return ds;
}

}  // namespace t3f
