#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "t3f/matrix.hpp"
#include "t3f/temporal_graph.hpp"

namespace t3f {

/// A labelled collection of temporal graphs.
///
/// On disk: a directory holding `manifest.txt` (one graph file name per line,
/// optional `classes <k>` and `name <s>` directives, '#' comments) and the graph
/// files it lists. A graph file `g.txt` may come with `g.txt.features`, one
/// whitespace-separated feature row per node, used by feature_mode = provided.
struct Dataset {
  std::string name;
  std::size_t num_classes = 0;
  std::vector<TemporalGraph> graphs;
  std::vector<std::string> graph_ids;
  std::vector<std::optional<DenseMatrix>> provided_features;

  std::size_t size() const noexcept { return graphs.size(); }
  std::vector<int> labels() const;

  /// Checks non-emptiness, label range and per-graph bookkeeping sizes.
  void validate() const;
};

inline constexpr const char* kManifestName = "manifest.txt";

Dataset load_dataset(const std::string& directory);

/// Writes the manifest, one file per graph named `<graph_id>.txt`, and any
/// provided-feature sidecars. Creates the directory if needed.
void write_dataset(const Dataset& dataset, const std::string& directory);

}  // namespace t3f
