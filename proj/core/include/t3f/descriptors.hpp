#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "t3f/config.hpp"
#include "t3f/dataset.hpp"
#include "t3f/model.hpp"
#include "t3f/spectral.hpp"
#include "t3f/topology.hpp"

namespace t3f {

/// Per-window descriptors of every graph in a dataset.
struct DescriptorTable {
  WindowSpec spec;
  std::size_t dos_bins = 4;
  bool count_multiplicity = false;
  std::vector<std::vector<TopoDescriptor>> topo;  // [graph][window]
  std::vector<std::vector<DosHistogram>> dos;     // [graph][window]
};

struct GraphDescriptors {
  std::vector<TopoDescriptor> topo;
  std::vector<DosHistogram> dos;
};

GraphDescriptors describe_graph(const TemporalGraph& graph, const WindowSpec& spec,
                                std::size_t dos_bins, bool count_multiplicity);

DescriptorTable compute_descriptors(const Dataset& dataset, const WindowSpec& spec,
                                    std::size_t dos_bins, bool count_multiplicity);

// Descriptor CSVs: `topo.csv` with columns graph_id,window_index,v,e,b0,b1 and
// `dos.csv` with graph_id,window_index,dos_0..dos_{B-1},empty_flag, plus a
// `descriptors.meta` file recording the extraction parameters.
void write_descriptor_csv(const DescriptorTable& table, const std::vector<std::string>& graph_ids,
                          const std::string& directory);
DescriptorTable read_descriptor_csv(const std::string& directory,
                                    const std::vector<std::string>& graph_ids);

/// True when `directory` holds descriptors extracted with the same parameters for
/// the same graph ids.
bool descriptor_cache_matches(const std::string& directory, const std::vector<std::string>& graph_ids,
                              const WindowSpec& spec, std::size_t dos_bins, bool count_multiplicity);

/// Sorted distinct timestamps over the whole dataset; the column grid of the
/// temporal-degree features.
std::vector<double> dataset_timestep_grid(const Dataset& dataset);

struct ExtractedDataset {
  DescriptorTable table;
  std::vector<nn::GraphSample> samples;
  std::vector<double> timestep_grid;
  std::size_t node_feature_dim = 0;
  bool cache_hit = false;
};

/// Builds the model inputs for one graph from its descriptors.
nn::GraphSample make_sample(const TemporalGraph& graph, const GraphDescriptors& descriptors,
                            const RunConfig& config, const std::vector<double>& timestep_grid,
                            const std::optional<DenseMatrix>& provided_features);

/// Descriptors plus model inputs for every graph. With a non-empty `cache_dir`,
/// matching cached CSVs are reused and fresh ones are written otherwise.
/// `timestep_grid` overrides the dataset grid (evaluation with a trained model).
ExtractedDataset extract_descriptors(const Dataset& dataset, const RunConfig& config,
                                     const std::string& cache_dir = {},
                                     const std::vector<double>* timestep_grid = nullptr);

}  // namespace t3f
