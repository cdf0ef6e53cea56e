#include "t3f/reports.hpp"

#include <ostream>

#include "t3f/error.hpp"
#include "t3f/text.hpp"

namespace t3f {

namespace {

using text::format_double;

}  // namespace

void write_metrics_csv(std::ostream& out, const Metrics& metrics) {
  out << "fold,train_size,test_size,accuracy,final_loss,w_structural,w_topo,w_dos\n";
  for (const auto& f : metrics.folds) {
    out << f.fold << ',' << f.train_size << ',' << f.test_size << ',' << format_double(f.accuracy)
        << ',' << format_double(f.final_loss);
    for (const double w : f.view_weights) out << ',' << format_double(w);
    out << '\n';
  }
  out << "mean,,," << format_double(metrics.mean_accuracy) << ",,,,\n";
  out << "std,,," << format_double(metrics.std_accuracy) << ",,,,\n";
}

void write_timings_csv(std::ostream& out, const Metrics& metrics) {
  out << "phase,seconds\n";
  for (const auto& [phase, seconds] : metrics.timings) {
    out << phase << ',' << format_double(seconds) << '\n';
  }
}

void write_loss_csv(std::ostream& out, const std::vector<std::vector<double>>& histories) {
  out << "fold,epoch,loss\n";
  for (std::size_t f = 0; f < histories.size(); ++f) {
    for (std::size_t e = 0; e < histories[f].size(); ++e) {
      out << f << ',' << e << ',' << format_double(histories[f][e]) << '\n';
    }
  }
}

void write_attention_csv(std::ostream& out, std::span<const AttentionReport> rows) {
  out << "dataset,structural,topo,dos\n";
  for (const auto& r : rows) {
    out << r.dataset;
    for (const double w : r.totals) out << ',' << format_double(w);
    out << '\n';
  }
}

void write_embeddings_csv(std::ostream& out, const std::vector<std::string>& graph_ids,
                          const std::vector<int>& labels, const EvalResult& eval) {
  if (graph_ids.size() != eval.embeddings.size() || labels.size() != eval.embeddings.size()) {
    throw Error(ErrorCode::ShapeMismatch, "embedding rows do not match graph ids");
  }
  const std::size_t dim = eval.embeddings.empty() ? 0 : eval.embeddings.front().size();
  out << "graph_id,label,prediction";
  for (std::size_t j = 0; j < dim; ++j) out << ",e" << j;
  out << '\n';
  for (std::size_t i = 0; i < graph_ids.size(); ++i) {
    out << graph_ids[i] << ',' << labels[i] << ',' << eval.predictions[i];
    for (const double x : eval.embeddings[i]) out << ',' << format_double(x);
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells) {
  out << "delta,sigma,mean_accuracy,std_accuracy\n";
  for (const auto& c : cells) {
    out << format_double(c.delta) << ',' << format_double(c.sigma) << ','
        << format_double(c.mean_accuracy) << ',' << format_double(c.std_accuracy) << '\n';
  }
}

void write_grid_csv(std::ostream& out, std::span<const GridPoint> points) {
  out << "hidden_dim,lr,dropout,mean_accuracy,std_accuracy\n";
  for (const auto& p : points) {
    out << p.hidden_dim << ',' << format_double(p.lr) << ',' << format_double(p.dropout) << ','
        << format_double(p.mean_accuracy) << ',' << format_double(p.std_accuracy) << '\n';
  }
}

}  // namespace t3f
