#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "t3f/config.hpp"
#include "t3f/dataset.hpp"
#include "t3f/descriptors.hpp"
#include "t3f/model.hpp"

namespace t3f {

nn::ModelConfig model_config_for(const RunConfig& config, std::size_t node_feature_dim,
                                 std::size_t num_classes);

struct TrainResult {
  nn::Model model;
  std::vector<double> loss_history;  // mean training loss per epoch
  double seconds = 0.0;
};

/// Per-graph Adam updates over `config.epochs` epochs, visiting the training
/// graphs in a freshly shuffled order each epoch. Deterministic for a given seed.
/// Throws NonFiniteLoss if a loss stops being finite.
TrainResult train(std::span<const nn::GraphSample> samples, std::span<const std::size_t> indices,
                  const RunConfig& config, std::size_t num_classes, std::uint64_t seed);

struct EvalResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  std::array<double, 3> view_weights{};  // mean over evaluated graphs
  std::vector<int> predictions;
  std::vector<std::vector<double>> embeddings;  // classifier inputs
};

EvalResult evaluate(const nn::Model& model, std::span<const nn::GraphSample> samples,
                    std::span<const std::size_t> indices);

/// Test-index sets of a stratified partition. Each class is shuffled with the
/// seed and dealt round-robin across folds, continuing where the previous class
/// stopped so fold sizes differ by at most one. Throws TooFewGraphs.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels,
                                                       std::size_t folds, std::uint64_t seed);

/// Stratified hold-out split: (train, test).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> labels, double test_fraction, std::uint64_t seed);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double accuracy = 0.0;
  double final_loss = 0.0;
  std::array<double, 3> view_weights{};
};

struct Metrics {
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population standard deviation over folds
  std::vector<std::vector<double>> loss_history;  // per fold
  std::vector<std::pair<std::string, double>> timings;  // wall clock, seconds
};

Metrics kfold_cv(const ExtractedDataset& data, std::size_t num_classes, const RunConfig& config);

struct GridPoint {
  std::size_t hidden_dim = 0;
  double lr = 0.0;
  double dropout = 0.0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
};

struct GridSearchResult {
  std::vector<GridPoint> points;
  RunConfig best;
  Metrics best_metrics;
};

/// Cross-validates every (hidden_dim, lr, dropout) combination of the published
/// grid and keeps the best mean accuracy (first wins on ties).
GridSearchResult grid_search(const ExtractedDataset& data, std::size_t num_classes,
                             const RunConfig& config);

struct SweepCell {
  double delta = 0.0;
  double sigma = 0.0;
  bool valid = false;  // false when sigma >= delta; accuracy fields are NaN then
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
};

/// Cross-validated accuracy for every (delta, sigma) pair.
std::vector<SweepCell> sweep_windows(const Dataset& dataset, const RunConfig& config,
                                     std::span<const double> deltas, std::span<const double> sigmas);

struct AttentionReport {
  std::string dataset;
  std::array<double, 3> totals{};  // structural, topological, spectral
};

AttentionReport attention_report(const std::string& dataset_name, const EvalResult& eval);

}  // namespace t3f
