#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "t3f/training.hpp"

namespace t3f {

// All reports are CSV with a header row. Reals use the shortest round-trip
// form; NaN is written as `nan`.

/// fold,train_size,test_size,accuracy,final_loss,w_structural,w_topo,w_dos
/// followed by `mean` and `std` rows. Contains no timings, so identical runs give
/// identical bytes.
void write_metrics_csv(std::ostream& out, const Metrics& metrics);

/// phase,seconds
void write_timings_csv(std::ostream& out, const Metrics& metrics);

/// fold,epoch,loss
void write_loss_csv(std::ostream& out, const std::vector<std::vector<double>>& histories);

/// dataset,structural,topo,dos
void write_attention_csv(std::ostream& out, std::span<const AttentionReport> rows);

/// graph_id,label,prediction,e0..e{d-1}
void write_embeddings_csv(std::ostream& out, const std::vector<std::string>& graph_ids,
                          const std::vector<int>& labels, const EvalResult& eval);

/// delta,sigma,mean_accuracy,std_accuracy
void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells);

/// hidden_dim,lr,dropout,mean_accuracy,std_accuracy
void write_grid_csv(std::ostream& out, std::span<const GridPoint> points);

}  // namespace t3f
