#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "t3f/matrix.hpp"

namespace t3f {

using NodeId = std::uint32_t;

struct Event {
  NodeId u = 0;
  NodeId v = 0;
  double t = 0.0;

  friend bool operator==(const Event&, const Event&) = default;
};

// Undirected pair, always stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  static Edge make(NodeId a, NodeId b) noexcept { return a < b ? Edge{a, b} : Edge{b, a}; }

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Node set plus a time-sorted multiset of timestamped undirected interactions.
///
/// Immutable once built. The same pair may carry several events.
class TemporalGraph {
 public:
  TemporalGraph() = default;

  /// Validates endpoints, rejects self-loops and sorts events by time (stable, so
  /// events with equal timestamps keep their input order). An empty event list is
  /// rejected unless `allow_empty` is set.
  static TemporalGraph from_events(std::size_t num_nodes, std::vector<Event> events,
                                   std::optional<int> label = std::nullopt,
                                   bool allow_empty = false);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::span<const Event> events() const noexcept { return events_; }
  bool empty() const noexcept { return events_.empty(); }
  std::optional<int> label() const noexcept { return label_; }

  // Only meaningful when !empty().
  double t_min() const noexcept { return t_min_; }
  double t_max() const noexcept { return t_max_; }

  TemporalGraph with_label(std::optional<int> label) const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Event> events_;
  std::optional<int> label_;
  double t_min_ = 0.0;
  double t_max_ = 0.0;
};

/// Sliding-window parameters: window length `delta` and stride `sigma`, 0 < sigma < delta.
struct WindowSpec {
  double delta = 6.0;
  double sigma = 4.0;

  static WindowSpec make(double delta, double sigma);
  void validate() const;
};

/// The subgraph induced by the events with timestamp in [t_start, t_start + delta].
struct WindowGraph {
  std::size_t window_index = 0;
  double t_start = 0.0;
  double delta = 0.0;
  std::vector<NodeId> nodes;            // sorted global ids, endpoints only
  std::vector<Edge> edges;              // sorted, deduplicated, global ids
  std::vector<std::uint32_t> multiplicity;  // events per entry of `edges`

  std::size_t num_nodes() const noexcept { return nodes.size(); }
  std::size_t num_edges() const noexcept { return edges.size(); }
  bool empty() const noexcept { return nodes.empty(); }

  /// Position of a global node id in `nodes`. The node must be present.
  std::size_t local_index(NodeId global) const;

  /// Edges re-expressed over local indices [0, num_nodes()).
  std::vector<Edge> local_edges() const;

  /// Builds a window directly from a pair list; nodes are the endpoints.
  static WindowGraph from_edges(std::span<const Edge> edges);
};

/// Static projection: every interacting pair once, timestamps dropped.
struct StaticGraph {
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;                     // sorted, deduplicated
  std::vector<std::vector<NodeId>> neighbors;  // sorted per node

  static StaticGraph from_edges(std::size_t num_nodes, std::vector<Edge> edges);
};

/// Number of windows N = ceil((t_max - t_min - delta) / sigma) + 1, clamped to >= 1.
/// Window i starts at t_min + i * sigma; the last window is the first one whose
/// closed interval reaches t_max.
std::size_t window_count(const TemporalGraph& graph, const WindowSpec& spec);

/// Same count, from the time span alone.
std::size_t window_count(double span, const WindowSpec& spec);

WindowGraph window(const TemporalGraph& graph, double t, double delta,
                   std::size_t window_index = 0);

std::vector<WindowGraph> window_sequence(const TemporalGraph& graph, const WindowSpec& spec);

/// Sorted distinct event timestamps.
std::vector<double> distinct_timestamps(const TemporalGraph& graph);

/// Entry (v, j) counts events incident to v whose timestamp equals timesteps[j].
/// Events whose timestamp is not on the grid are not counted.
DenseMatrix temporal_degree(const TemporalGraph& graph, std::span<const double> timesteps);

/// Replaces every nonzero entry by 1.
DenseMatrix binarize(const DenseMatrix& m);

StaticGraph static_projection(const TemporalGraph& graph);

// Text format: a header `n <num_nodes> label <class-id>` followed by one `u v t` line
// per event. Blank lines and lines starting with '#' are ignored.
TemporalGraph read_temporal_graph(std::istream& in, const std::string& source_name);
TemporalGraph read_temporal_graph_file(const std::string& path);
void write_temporal_graph(std::ostream& out, const TemporalGraph& graph);

}  // namespace t3f
