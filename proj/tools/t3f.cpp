// t3f: command-line front end.
//
//   t3f extract   --data DIR --out DIR [--delta F --sigma F --bins N]
//   t3f synth     --spec FILE --out DIR --seed N
//   t3f train     --data DIR --config FILE --out DIR
//   t3f eval      --model FILE --data DIR --report FILE
//   t3f cv        --data DIR --config FILE
//   t3f sweep     --data DIR --deltas LIST --sigmas LIST
//   t3f stability --data DIR --mode {topo|spectral}
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "t3f/checkpoint.hpp"
#include "t3f/config.hpp"
#include "t3f/dataset.hpp"
#include "t3f/descriptors.hpp"
#include "t3f/error.hpp"
#include "t3f/reports.hpp"
#include "t3f/stability.hpp"
#include "t3f/synth.hpp"
#include "t3f/text.hpp"
#include "t3f/training.hpp"

namespace fs = std::filesystem;
using namespace t3f;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  return out;
}

RunConfig load_config(const std::string& path) {
  return path.empty() ? RunConfig{} : read_run_config(path);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto field : text::split(s, ',')) {
    const auto v = text::parse_double(field);
    if (!v) throw Error(ErrorCode::InvalidConfig, "bad number '" + std::string(field) + "' in list");
    out.push_back(*v);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ' ';
    s += text::format_double(xs[i]);
  }
  return s;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto f : text::split_ws(s)) {
    const auto v = text::parse_double(f);
    if (!v) throw Error(ErrorCode::ParseError, "bad number in checkpoint metadata");
    out.push_back(*v);
  }
  return out;
}

int cmd_extract(const std::string& data, const std::string& out, double delta, double sigma,
                std::size_t bins, bool multiplicity) {
  const auto ds = load_dataset(data);
  const auto spec = WindowSpec::make(delta, sigma);
  const auto table = compute_descriptors(ds, spec, bins, multiplicity);
  write_descriptor_csv(table, ds.graph_ids, out);
  std::size_t windows = 0;
  for (const auto& g : table.topo) windows += g.size();
  std::cout << "extracted " << ds.size() << " graphs, " << windows << " windows -> " << out << '\n';
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out, std::uint64_t seed) {
  const SynthSpec spec = spec_path.empty() ? SynthSpec{} : read_synth_spec(spec_path);
  const auto ds = synth_generate(spec, seed);
  write_dataset(ds, out);
  std::cout << "wrote " << ds.size() << " graphs to " << out << '\n';
  return 0;
}

int cmd_train(const std::string& data, const std::string& config_path, const std::string& out,
              bool use_all) {
  const RunConfig config = load_config(config_path);
  const auto ds = load_dataset(data);
  const auto ex = extract_descriptors(ds, config, (fs::path(out) / "descriptors").string());

  std::vector<std::size_t> train_idx, test_idx;
  if (use_all) {
    for (std::size_t i = 0; i < ds.size(); ++i) train_idx.push_back(i);
  } else {
    std::tie(train_idx, test_idx) = stratified_split(ds.labels(), config.test_fraction, config.seed);
  }
  auto trained = train(ex.samples, train_idx, config, ds.num_classes, config.seed);

  std::string test_ids;
  for (const auto i : test_idx) test_ids += (test_ids.empty() ? "" : " ") + ds.graph_ids[i];
  const auto ckpt = nn::make_checkpoint(trained.model, {{"run_config", to_config_text(config)},
                                                       {"timestep_grid", join_doubles(ex.timestep_grid)},
                                                       {"test_ids", test_ids},
                                                       {"dataset", ds.name}});
  nn::write_checkpoint((fs::path(out) / "model.json").string(), ckpt);
  {
    auto f = open_out(fs::path(out) / "loss.csv");
    write_loss_csv(f, {trained.loss_history});
  }
  std::cout << "trained on " << train_idx.size() << " graphs, final loss "
            << text::format_double(trained.loss_history.empty() ? 0.0 : trained.loss_history.back())
            << ", " << test_idx.size() << " held out -> " << out << "/model.json\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data, const std::string& report,
             const std::string& embeddings, bool use_all) {
  const auto ckpt = nn::read_checkpoint(model_path);
  const auto model = nn::restore_model(ckpt);
  const auto meta = [&](const std::string& key) {
    const auto it = ckpt.metadata.find(key);
    if (it == ckpt.metadata.end()) throw Error(ErrorCode::ParseError, "checkpoint lacks " + key);
    return it->second;
  };
  std::istringstream cfg_text(meta("run_config"));
  const RunConfig config = parse_run_config(cfg_text, model_path + "#run_config");
  const auto grid = split_doubles(meta("timestep_grid"));

  const auto ds = load_dataset(data);
  const auto ex = extract_descriptors(ds, config, {}, &grid);
  if (ex.node_feature_dim != model.config().node_feature_dim) {
    throw Error(ErrorCode::ShapeMismatch, "dataset features have width " +
                                              std::to_string(ex.node_feature_dim) + ", model expects " +
                                              std::to_string(model.config().node_feature_dim));
  }

  std::vector<std::size_t> idx;
  const auto ids = text::split_ws(ckpt.metadata.count("test_ids") ? ckpt.metadata.at("test_ids") : "");
  if (!use_all && !ids.empty()) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (std::find(ids.begin(), ids.end(), ds.graph_ids[i]) != ids.end()) idx.push_back(i);
    }
  } else {
    for (std::size_t i = 0; i < ds.size(); ++i) idx.push_back(i);
  }
  const auto eval = evaluate(model, ex.samples, idx);
  const AttentionReport row = attention_report(ds.name, eval);
  {
    auto f = open_out(report);
    write_attention_csv(f, std::span(&row, 1));
  }
  if (!embeddings.empty()) {
    std::vector<std::string> gids;
    std::vector<int> labels;
    for (const auto i : idx) {
      gids.push_back(ds.graph_ids[i]);
      labels.push_back(ex.samples[i].label);
    }
    auto f = open_out(embeddings);
    write_embeddings_csv(f, gids, labels, eval);
  }
  std::cout << "accuracy " << text::format_double(eval.accuracy) << " (" << eval.correct << "/"
            << eval.total << ")\n";
  return 0;
}

int cmd_cv(const std::string& data, const std::string& config_path, const std::string& out) {
  const RunConfig config = load_config(config_path);
  const auto ds = load_dataset(data);
  const auto ex = extract_descriptors(ds, config);
  Metrics metrics;
  if (config.grid_search) {
    auto gs = grid_search(ex, ds.num_classes, config);
    metrics = std::move(gs.best_metrics);
    if (!out.empty()) {
      auto f = open_out(fs::path(out) / "grid.csv");
      write_grid_csv(f, gs.points);
    }
  } else {
    metrics = kfold_cv(ex, ds.num_classes, config);
  }
  if (!out.empty()) {
    auto m = open_out(fs::path(out) / "metrics.csv");
    write_metrics_csv(m, metrics);
    auto l = open_out(fs::path(out) / "loss.csv");
    write_loss_csv(l, metrics.loss_history);
    auto t = open_out(fs::path(out) / "timings.csv");
    write_timings_csv(t, metrics);
  } else {
    write_metrics_csv(std::cout, metrics);
  }
  std::cout << "cv accuracy " << text::format_double(metrics.mean_accuracy) << " +- "
            << text::format_double(metrics.std_accuracy) << '\n';
  return 0;
}

int cmd_sweep(const std::string& data, const std::string& config_path, const std::string& deltas,
              const std::string& sigmas, const std::string& out) {
  const RunConfig config = load_config(config_path);
  const auto ds = load_dataset(data);
  const auto d = parse_list(deltas);
  const auto s = parse_list(sigmas);
  const auto cells = sweep_windows(ds, config, d, s);
  if (out.empty()) {
    write_sweep_csv(std::cout, cells);
  } else {
    auto f = open_out(out);
    write_sweep_csv(f, cells);
  }
  return 0;
}

int cmd_stability(const std::string& data, const std::string& mode, std::size_t trials,
                  std::uint64_t seed, const std::string& config_path, const std::string& out) {
  const StabilityMode m = parse_stability_mode(mode);
  CampaignSpec spec = m == StabilityMode::Topo ? CampaignSpec::topo_default()
                                               : CampaignSpec::spectral_default();
  spec.trials = trials;
  spec.seed = seed;
  StabilityReport report;
  if (data.empty()) {
    report = run_campaign(spec);
  } else {
    const RunConfig config = load_config(config_path);
    spec.dos_bins = config.dos_bins;
    report = run_campaign(load_dataset(data), spec, config.window_spec());
  }
  if (out.empty()) {
    write_stability_csv(std::cout, report);
  } else {
    auto f = open_out(out);
    write_stability_csv(f, report);
    std::cout << to_string(m) << ": " << report.trials.size() << " trials, empirical constant "
              << text::format_double(report.empirical_constant) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal graph classification with topological and spectral descriptors"};
  app.require_subcommand(1);

  std::string data, out, config_path, spec_path, model_path, report, embeddings;
  std::string deltas, sigmas, mode = "topo";
  double delta = 6.0, sigma = 4.0;
  std::size_t bins = 4, trials = 100;
  std::uint64_t seed = 7;
  bool multiplicity = false, use_all = false;

  auto* extract = app.add_subcommand("extract", "Compute per-window descriptor CSVs");
  extract->add_option("--data", data, "Dataset directory")->required();
  extract->add_option("--out", out, "Output directory")->required();
  extract->add_option("--delta", delta, "Window length");
  extract->add_option("--sigma", sigma, "Window stride");
  extract->add_option("--bins", bins, "Density-of-states bins");
  extract->add_flag("--count-multiplicity", multiplicity, "Count repeated events as edges");

  auto* synth = app.add_subcommand("synth", "Generate a planted synthetic dataset");
  synth->add_option("--spec", spec_path, "Spec file (key = value)");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--seed", seed, "Random seed");

  auto* trn = app.add_subcommand("train", "Train on a stratified split and save the model");
  trn->add_option("--data", data, "Dataset directory")->required();
  trn->add_option("--config", config_path, "Run configuration");
  trn->add_option("--out", out, "Output directory")->required();
  trn->add_flag("--all", use_all, "Train on every graph, no held-out split");

  auto* ev = app.add_subcommand("eval", "Evaluate a saved model and write the attention report");
  ev->add_option("--model", model_path, "Checkpoint file")->required();
  ev->add_option("--data", data, "Dataset directory")->required();
  ev->add_option("--report", report, "Attention report CSV")->required();
  ev->add_option("--embeddings", embeddings, "Fused embedding CSV");
  ev->add_flag("--all", use_all, "Evaluate every graph instead of the held-out split");

  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
  cv->add_option("--data", data, "Dataset directory")->required();
  cv->add_option("--config", config_path, "Run configuration");
  cv->add_option("--out", out, "Directory for metrics.csv, loss.csv, timings.csv");

  auto* sweep = app.add_subcommand("sweep", "Cross-validate over window lengths and strides");
  sweep->add_option("--data", data, "Dataset directory")->required();
  sweep->add_option("--deltas", deltas, "Comma-separated window lengths")->required();
  sweep->add_option("--sigmas", sigmas, "Comma-separated strides")->required();
  sweep->add_option("--config", config_path, "Run configuration");
  sweep->add_option("--out", out, "Output CSV (default stdout)");

  auto* stab = app.add_subcommand("stability", "Empirical descriptor stability campaign");
  stab->add_option("--data", data, "Dataset directory (default: random graphs)");
  stab->add_option("--mode", mode, "topo or spectral")->check(CLI::IsMember({"topo", "spectral"}));
  stab->add_option("--trials", trials, "Number of trials");
  stab->add_option("--seed", seed, "Random seed");
  stab->add_option("--config", config_path, "Run configuration (window and bins)");
  stab->add_option("--out", out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*extract) return cmd_extract(data, out, delta, sigma, bins, multiplicity);
    if (*synth) return cmd_synth(spec_path, out, seed);
    if (*trn) return cmd_train(data, config_path, out, use_all);
    if (*ev) return cmd_eval(model_path, data, report, embeddings, use_all);
    if (*cv) return cmd_cv(data, config_path, out);
    if (*sweep) return cmd_sweep(data, config_path, deltas, sigmas, out);
    if (*stab) return cmd_stability(data, mode, trials, seed, config_path, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(classify(e.code()));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
