#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "t3f/dataset.hpp"
#include "t3f/spectral.hpp"
#include "t3f/temporal_graph.hpp"
#include "t3f/topology.hpp"

namespace t3f {

struct PerturbedTimestamps {
  TemporalGraph graph;
  double l1 = 0.0;  // sum over events of |t' - t|
};

/// Shifts every event timestamp by independent uniform noise in [-eps, eps].
/// The noise for a given seed is eps * u with u fixed, so campaigns at several
/// scales perturb in the same directions.
PerturbedTimestamps perturb_timestamps(const TemporalGraph& graph, double eps, std::uint64_t seed);

/// Applies exactly k modifications to distinct vertex pairs, each an insertion of
/// a missing pair or a deletion of a present one. At each step the pair is drawn
/// uniformly from the admissible ones: pairs not yet touched whose deletion would
/// not leave an endpoint isolated. Throws InfeasibleK when none remain.
StaticGraph perturb_edges(const StaticGraph& graph, std::size_t k, std::uint64_t seed);

/// Same on a window's node set (global ids are preserved).
WindowGraph perturb_edges(const WindowGraph& window, std::size_t k, std::uint64_t seed);

/// Size of the symmetric difference of two edge sets.
std::size_t edge_symmetric_difference(std::span<const Edge> a, std::span<const Edge> b);

struct TopoTrial {
  double lhs = 0.0;  // threshold-gap-weighted L1 between the two Betti-0 curves
  double rhs = 0.0;  // L1 distance between the timestamp functions
};

/// Betti-0 curves of two edge valuations of the same graph, evaluated on the
/// sorted union of all values, compared with the gap-weighted L1 distance.
double betti0_curve_distance(std::size_t num_nodes, std::span<const Edge> edges,
                             std::span<const double> values_a, std::span<const double> values_b);

/// Perturbs the timestamps of `graph` and compares the degree-0 Betti curves of
/// the earliest-event filtrations before and after.
TopoTrial topo_stability_trial(const TemporalGraph& graph, double eps, std::uint64_t seed);

struct SpectralTrial {
  double w1 = 0.0;
  double ratio_base = 0.0;  // k / n
};

SpectralTrial spectral_stability_trial(const WindowGraph& window, std::size_t k,
                                       std::uint64_t seed, std::size_t dos_bins = 4);

enum class StabilityMode { Topo, Spectral };

std::string_view to_string(StabilityMode mode) noexcept;
StabilityMode parse_stability_mode(std::string_view s);

struct CampaignSpec {
  StabilityMode mode = StabilityMode::Topo;
  std::size_t trials = 100;
  std::uint64_t seed = 7;
  // topo: every trial graph is perturbed at each scale
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  // generated graphs: node count uniform in [min_nodes, max_nodes], edge prob p
  std::size_t min_nodes = 10;
  std::size_t max_nodes = 40;
  double edge_prob = 0.2;
  double time_span = 10.0;  // topo: event times uniform in [0, time_span]
  // spectral: k uniform in [1, max_k]
  std::size_t max_k = 5;
  std::size_t dos_bins = 4;

  static CampaignSpec topo_default();
  static CampaignSpec spectral_default();
};

struct StabilityTrialRecord {
  std::size_t trial = 0;
  double magnitude = 0.0;  // ||dtau||_1 or k / n
  double distance = 0.0;   // Betti-curve L1 or W1
  double ratio = 0.0;      // distance / magnitude; NaN when magnitude == 0
  double eps = 0.0;        // topo only
  std::size_t n = 0;
  std::size_t m = 0;
};

struct EpsSummary {
  double eps = 0.0;
  double mean_magnitude = 0.0;
  double mean_distance = 0.0;
  double sup_ratio = 0.0;
};

struct StabilityReport {
  StabilityMode mode = StabilityMode::Topo;
  std::vector<StabilityTrialRecord> trials;
  double empirical_constant = 0.0;  // sup ratio over trials with magnitude > 0
  std::vector<EpsSummary> per_eps;  // topo only, in spec order
  std::size_t skipped = 0;          // infeasible spectral draws on a dataset
};

/// Random graphs from the spec's generator: for topo, Erdos-Renyi pairs carrying
/// 1-3 events each; for spectral, Erdos-Renyi windows.
StabilityReport run_campaign(const CampaignSpec& spec);

/// Trials drawn from a dataset: topo perturbs whole graphs, spectral perturbs a
/// random non-empty window (under `window_spec`) of each graph.
StabilityReport run_campaign(const Dataset& dataset, const CampaignSpec& spec,
                             const WindowSpec& window_spec = {});

/// trial,mode,magnitude,distance,ratio; then one `eps=<e>` row per scale (topo)
/// with the means and the per-scale sup ratio, and a final `summary` row carrying
/// the mean magnitude, mean distance and the empirical constant.
void write_stability_csv(std::ostream& out, const StabilityReport& report);

}  // namespace t3f
