#include "t3f/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "t3f/error.hpp"
#include "t3f/optimizer.hpp"
#include "t3f/rng.hpp"

namespace t3f {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

nn::ModelConfig model_config_for(const RunConfig& config, std::size_t node_feature_dim,
                                 std::size_t num_classes) {
  nn::ModelConfig mc;
  mc.node_feature_dim = node_feature_dim;
  mc.topo_dim = 4;
  mc.dos_bins = config.dos_bins;
  mc.sage_layers = config.sage_layers;
  mc.sage_hidden = config.hidden_dim;
  mc.d_model = config.d_model;
  mc.heads = config.heads;
  mc.encoder_layers = config.encoder_layers;
  mc.ffn_dim = config.ffn_dim;
  mc.view_dim = config.view_dim;
  mc.num_classes = num_classes;
  mc.dropout = config.dropout;
  mc.mode = config.mode;
  return mc;
}

TrainResult train(std::span<const nn::GraphSample> samples, std::span<const std::size_t> indices,
                  const RunConfig& config, std::size_t num_classes, std::uint64_t seed) {
  config.validate();
  if (indices.empty()) throw Error(ErrorCode::TooFewGraphs, "no training graphs");
  const auto start = Clock::now();
  const std::size_t feature_dim = samples[indices.front()].node_features.cols();

  TrainResult result{nn::Model(model_config_for(config, feature_dim, num_classes),
                               mix_seed(seed, 0)),
                     {},
                     0.0};
  nn::Model& model = result.model;
  auto params = model.params().tensors();
  nn::AdamState adam;
  adam.hyper.lr = config.lr;
  adam.hyper.weight_decay = config.weight_decay;

  Rng order_rng(mix_seed(seed, 1));
  Rng dropout_rng(mix_seed(seed, 2));
  nn::ForwardContext ctx{true, config.dropout, &dropout_rng};

  std::vector<std::size_t> order(indices.begin(), indices.end());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(order.begin(), order.end());
    double total = 0.0;
    for (const std::size_t i : order) {
      const auto& sample = samples[i];
      model.params().zero_grad();
      const auto out = model.forward(sample, ctx);
      const int label = sample.label;
      nn::Tensor loss;
      try {
        loss = nn::cross_entropy_with_logits(out.logits, std::span(&label, 1));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteValue) throw;
        throw Error(ErrorCode::NonFiniteLoss, "non-finite logits on sample " + std::to_string(i) +
                                                  " in epoch " + std::to_string(epoch));
      }
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFiniteLoss, "loss became " + std::to_string(value) +
                                                  " at epoch " + std::to_string(epoch) +
                                                  ", graph index " + std::to_string(i));
      }
      loss.backward();
      nn::adam_step(params, adam);
      total += value;
    }
    result.loss_history.push_back(total / static_cast<double>(order.size()));
  }
  result.seconds = seconds_since(start);
  return result;
}

EvalResult evaluate(const nn::Model& model, std::span<const nn::GraphSample> samples,
                    std::span<const std::size_t> indices) {
  EvalResult r;
  for (const std::size_t i : indices) {
    const auto& s = samples[i];
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= model.config().num_classes) {
      throw Error(ErrorCode::LabelOutOfRange, "evaluation label outside the model's classes");
    }
    const auto out = model.forward(s);
    const int pred = static_cast<int>(argmax(out.logits.data()));
    r.predictions.push_back(pred);
    r.embeddings.emplace_back(out.fused.data().begin(), out.fused.data().end());
    for (std::size_t j = 0; j < 3; ++j) r.view_weights[j] += out.view_weights[j];
    if (pred == s.label) ++r.correct;
    ++r.total;
  }
  if (r.total > 0) {
    r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
    for (double& w : r.view_weights) w /= static_cast<double>(r.total);
  }
  return r;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels,
                                                       std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::InvalidConfig, "need at least 2 folds");
  if (labels.size() < folds) {
    throw Error(ErrorCode::TooFewGraphs, std::to_string(labels.size()) + " graphs for " +
                                             std::to_string(folds) + " folds");
  }
  const int max_label = *std::max_element(labels.begin(), labels.end());
  Rng rng(mix_seed(seed, 0xf01d));
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t next = 0;
  for (int c = 0; c <= max_label; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    rng.shuffle(members.begin(), members.end());
    for (const auto i : members) {
      out[next].push_back(i);
      next = (next + 1) % folds;
    }
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "test_fraction must lie in (0, 1)");
  }
  if (labels.size() < 2) throw Error(ErrorCode::TooFewGraphs, "need >= 2 graphs to split");
  const int max_label = *std::max_element(labels.begin(), labels.end());
  Rng rng(mix_seed(seed, 0x5b117));
  std::vector<std::size_t> train_idx, test_idx;
  for (int c = 0; c <= max_label; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    rng.shuffle(members.begin(), members.end());
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    for (std::size_t k = 0; k < members.size(); ++k) {
      (k < n_test ? test_idx : train_idx).push_back(members[k]);
    }
  }
  if (train_idx.empty() || test_idx.empty()) {
    throw Error(ErrorCode::TooFewGraphs, "split leaves an empty side");
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {train_idx, test_idx};
}

Metrics kfold_cv(const ExtractedDataset& data, std::size_t num_classes, const RunConfig& config) {
  config.validate();
  std::vector<int> labels;
  for (const auto& s : data.samples) labels.push_back(s.label);
  const auto test_sets = stratified_folds(labels, config.folds, config.seed);

  Metrics m;
  for (std::size_t f = 0; f < test_sets.size(); ++f) {
    const auto& test = test_sets[f];
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!std::binary_search(test.begin(), test.end(), i)) train_idx.push_back(i);
    }
    auto trained = train(data.samples, train_idx, config, num_classes, mix_seed(config.seed, f));
    const auto start = Clock::now();
    const auto eval = evaluate(trained.model, data.samples, test);
    m.timings.emplace_back("fold" + std::to_string(f) + ".train", trained.seconds);
    m.timings.emplace_back("fold" + std::to_string(f) + ".eval", seconds_since(start));

    FoldResult fr;
    fr.fold = f;
    fr.train_size = train_idx.size();
    fr.test_size = test.size();
    fr.accuracy = eval.accuracy;
    fr.final_loss = trained.loss_history.empty() ? 0.0 : trained.loss_history.back();
    fr.view_weights = eval.view_weights;
    m.folds.push_back(fr);
    m.loss_history.push_back(std::move(trained.loss_history));
  }
  double sum = 0.0;
  for (const auto& f : m.folds) sum += f.accuracy;
  m.mean_accuracy = sum / static_cast<double>(m.folds.size());
  double var = 0.0;
  for (const auto& f : m.folds) var += (f.accuracy - m.mean_accuracy) * (f.accuracy - m.mean_accuracy);
  m.std_accuracy = std::sqrt(var / static_cast<double>(m.folds.size()));
  return m;
}

GridSearchResult grid_search(const ExtractedDataset& data, std::size_t num_classes,
                             const RunConfig& config) {
  GridSearchResult result;
  double best = -1.0;
  for (const auto hidden : kHiddenGrid) {
    for (const auto lr : kLrGrid) {
      for (const auto dropout : kDropoutGrid) {
        RunConfig c = config;
        c.hidden_dim = hidden;
        c.lr = lr;
        c.dropout = dropout;
        c.grid_search = false;
        auto metrics = kfold_cv(data, num_classes, c);
        result.points.push_back({hidden, lr, dropout, metrics.mean_accuracy, metrics.std_accuracy});
        if (metrics.mean_accuracy > best) {
          best = metrics.mean_accuracy;
          result.best = c;
          result.best_metrics = std::move(metrics);
        }
      }
    }
  }
  return result;
}

std::vector<SweepCell> sweep_windows(const Dataset& dataset, const RunConfig& config,
                                     std::span<const double> deltas,
                                     std::span<const double> sigmas) {
  std::vector<SweepCell> cells;
  for (const double delta : deltas) {
    for (const double sigma : sigmas) {
      SweepCell cell;
      cell.delta = delta;
      cell.sigma = sigma;
      if (!(sigma > 0.0 && sigma < delta)) {
        cell.mean_accuracy = cell.std_accuracy = std::numeric_limits<double>::quiet_NaN();
        cells.push_back(cell);
        continue;
      }
      RunConfig c = config;
      c.delta = delta;
      c.sigma = sigma;
      const auto data = extract_descriptors(dataset, c);
      const auto metrics = kfold_cv(data, dataset.num_classes, c);
      cell.valid = true;
      cell.mean_accuracy = metrics.mean_accuracy;
      cell.std_accuracy = metrics.std_accuracy;
      cells.push_back(cell);
    }
  }
  return cells;
}

AttentionReport attention_report(const std::string& dataset_name, const EvalResult& eval) {
  AttentionReport r;
  r.dataset = dataset_name;
  const double total = eval.view_weights[0] + eval.view_weights[1] + eval.view_weights[2];
  for (std::size_t j = 0; j < 3; ++j) r.totals[j] = total > 0.0 ? eval.view_weights[j] / total : 0.0;
  return r;
}

}  // namespace t3f
