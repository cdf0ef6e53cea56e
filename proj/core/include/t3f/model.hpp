#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "t3f/autodiff.hpp"
#include "t3f/matrix.hpp"
#include "t3f/rng.hpp"
#include "t3f/temporal_graph.hpp"

namespace t3f::nn {

/// Named parameter arrays in creation order. The order fixes checkpoint layout
/// and the optimizer's traversal.
class ParamStore {
 public:
  enum class Init { FanInUniform, Zeros, Ones };

  Tensor create(std::string name, std::size_t rows, std::size_t cols, Init init, Rng& rng);

  const Tensor& get(std::string_view name) const;
  std::vector<std::pair<std::string, Tensor>>& entries() noexcept { return entries_; }
  const std::vector<std::pair<std::string, Tensor>>& entries() const noexcept { return entries_; }
  std::vector<Tensor> tensors() const;

  std::size_t scalar_count() const noexcept;
  void zero_grad();

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

/// y = x W + b with W: in x out, b: 1 x out.
struct Linear {
  Tensor weight;
  Tensor bias;

  static Linear create(ParamStore& store, const std::string& name, std::size_t in,
                       std::size_t out, Rng& rng);
  Tensor forward(const Tensor& x) const;
};

struct SageLayerParams {
  Tensor w_self;   // d_in x d_out
  Tensor w_neigh;  // d_in x d_out
  Tensor bias;     // 1 x d_out
};

enum class Activation { Identity, Relu };

/// h'_v = act(h_v W_self + mean_{u in N(v)} h_u W_neigh + b); the mean over an empty
/// neighbourhood is zero.
Tensor sage_layer(const Tensor& features, const StaticGraph& graph, const SageLayerParams& params,
                  Activation activation = Activation::Relu);

/// Mean over node rows; throws EmptyGraph for zero rows.
Tensor global_mean_pool(const Tensor& node_embeddings);

/// Sinusoidal code over positions 0..n-1: entry (p, 2i) = sin(p / 10000^(2i/d)),
/// (p, 2i+1) = cos of the same angle.
DenseMatrix time_embedding(std::size_t n, std::size_t d_model);

struct AttentionHeadParams {
  Tensor wq, wk, wv;  // d_model x d_head
};

struct EncoderLayerParams {
  Tensor ln1_gamma, ln1_beta;
  std::vector<AttentionHeadParams> heads;
  Linear attn_out;  // heads*d_head -> d_model
  Tensor ln2_gamma, ln2_beta;
  Linear ff1, ff2;
};

struct TransformerParams {
  Linear input;  // d_in -> d_model
  std::vector<EncoderLayerParams> layers;
  Tensor final_gamma, final_beta;
  Linear output;  // d_model -> view_dim
};

struct TransformerShape {
  std::size_t d_in = 4;
  std::size_t d_model = 32;
  std::size_t heads = 2;
  std::size_t layers = 2;
  std::size_t ffn_dim = 64;
  std::size_t view_dim = 10;
};

TransformerParams create_transformer(ParamStore& store, const std::string& prefix,
                                     const TransformerShape& shape, Rng& rng);

/// Per-call options shared by the stochastic layers.
struct ForwardContext {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;  // required when training with dropout > 0
};

/// Attention matrices recorded during a forward pass, [layer][head].
struct EncoderTrace {
  std::vector<std::vector<DenseMatrix>> attention;
};

/// Token stream (N x d_in) -> view vector (1 x view_dim).
///
/// Input projection, plus sinusoidal time codes, then pre-norm encoder layers
/// (x += MHA(LN(x)); x += FFN(LN(x))), a final layer norm, mean over tokens and a
/// linear map to the view dimension.
Tensor transformer_encoder(const Tensor& tokens, const TransformerParams& params,
                           const ForwardContext& ctx = {}, EncoderTrace* trace = nullptr);

struct FusionParams {
  Tensor wq, wk, wv;  // view_dim x view_dim
};

struct FusionOutput {
  Tensor fused;                      // 1 x (3 * view_dim)
  Tensor attention;                  // 3 x 3, row-stochastic
  std::array<double, 3> view_weights{};  // column sums / 3
};

/// Single-head self-attention over the three view tokens (rows of `views`, ordered
/// structural, topological, spectral). The attended tokens are flattened into one
/// row. view_weights[j] is the share of attention mass received by view j.
FusionOutput fusion_attention(const Tensor& views, const FusionParams& params);

/// Affine map to class logits, no activation.
Tensor classify(const Tensor& fused, const Linear& classifier);

enum class FusionMode { Full, GsageOnly, TopoOnly, DosOnly, ConcatFuse };

std::string_view to_string(FusionMode mode) noexcept;
FusionMode parse_fusion_mode(std::string_view s);

struct ModelConfig {
  std::size_t node_feature_dim = 1;
  std::size_t topo_dim = 4;
  std::size_t dos_bins = 4;
  std::size_t sage_layers = 2;
  std::size_t sage_hidden = 32;
  std::size_t d_model = 32;
  std::size_t heads = 2;
  std::size_t encoder_layers = 2;
  std::size_t ffn_dim = 64;
  std::size_t view_dim = 10;
  std::size_t num_classes = 2;
  double dropout = 0.0;
  FusionMode mode = FusionMode::Full;

  void validate() const;
};

/// Everything the model reads for one temporal graph.
struct GraphSample {
  DenseMatrix node_features;  // num_nodes x node_feature_dim
  StaticGraph graph;
  DenseMatrix topo_tokens;    // windows x topo_dim
  DenseMatrix dos_tokens;     // windows x dos_bins
  int label = -1;
};

struct ForwardResult {
  Tensor logits;                         // 1 x num_classes
  Tensor fused;                          // classifier input
  std::array<double, 3> view_weights{};  // structural, topological, spectral
};

class Model {
 public:
  Model(const ModelConfig& config, std::uint64_t seed);

  // Parameters are shared handles; a copy would alias them.
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  const ModelConfig& config() const noexcept { return config_; }
  ParamStore& params() noexcept { return store_; }
  const ParamStore& params() const noexcept { return store_; }

  ForwardResult forward(const GraphSample& sample, const ForwardContext& ctx = {}) const;

  // Branch outputs, 1 x view_dim each. Exposed for tests and ablations.
  Tensor structural_view(const GraphSample& sample, const ForwardContext& ctx) const;
  Tensor topo_view(const GraphSample& sample, const ForwardContext& ctx) const;
  Tensor dos_view(const GraphSample& sample, const ForwardContext& ctx) const;

 private:
  bool uses_structural() const noexcept;
  bool uses_topo() const noexcept;
  bool uses_dos() const noexcept;

  ModelConfig config_;
  ParamStore store_;
  std::vector<SageLayerParams> sage_;
  Linear sage_projection_;
  TransformerParams topo_encoder_;
  TransformerParams dos_encoder_;
  FusionParams fusion_;
  Linear classifier_;
};

}  // namespace t3f::nn
