#include <benchmark/benchmark.h>

#include <vector>

#include "t3f/config.hpp"
#include "t3f/descriptors.hpp"
#include "t3f/model.hpp"
#include "t3f/optimizer.hpp"
#include "t3f/spectral.hpp"
#include "t3f/synth.hpp"
#include "t3f/topology.hpp"
#include "t3f/training.hpp"

namespace {

using namespace t3f;

WindowGraph er_window(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.uniform() < p) edges.push_back({u, v});
  return WindowGraph::from_edges(edges);
}

void BM_Eigensolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto l = normalized_laplacian(er_window(n, 0.2, 1));
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues_sym(l));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Eigensolve)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_Betti1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto w = er_window(n, 0.15, 2);
  for (auto _ : state) benchmark::DoNotOptimize(betti1(clique_complex(w)));
}
BENCHMARK(BM_Betti1)->RangeMultiplier(2)->Range(8, 64);

void BM_ExtractDescriptors(benchmark::State& state) {
  SynthSpec spec;
  spec.num_graphs = 20;
  const auto ds = synth_generate(spec, 7);
  const RunConfig c;
  for (auto _ : state) benchmark::DoNotOptimize(extract_descriptors(ds, c));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.size()));
}
BENCHMARK(BM_ExtractDescriptors)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  SynthSpec spec;
  spec.num_graphs = 4;
  const auto ds = synth_generate(spec, 7);
  const RunConfig c;
  const auto ex = extract_descriptors(ds, c);
  nn::Model model(model_config_for(c, ex.node_feature_dim, ds.num_classes), 1);
  auto params = model.params().tensors();
  nn::AdamState adam;
  Rng rng(3);
  nn::ForwardContext ctx{true, 0.0, &rng};
  const auto& sample = ex.samples.front();
  for (auto _ : state) {
    model.params().zero_grad();
    const auto out = model.forward(sample, ctx);
    const int label = sample.label;
    const auto loss = nn::cross_entropy_with_logits(out.logits, std::span(&label, 1));
    loss.backward();
    nn::adam_step(params, adam);
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
