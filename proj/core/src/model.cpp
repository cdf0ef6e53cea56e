#include "t3f/model.hpp"

#include <cmath>

#include "t3f/error.hpp"

namespace t3f::nn {

Tensor ParamStore::create(std::string name, std::size_t rows, std::size_t cols, Init init,
                          Rng& rng) {
  std::vector<double> data(rows * cols, 0.0);
  switch (init) {
    case Init::FanInUniform: {
      const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
      for (double& x : data) x = rng.uniform(-bound, bound);
      break;
    }
    case Init::Zeros:
      break;
    case Init::Ones:
      std::fill(data.begin(), data.end(), 1.0);
      break;
  }
  Tensor t = Tensor::parameter(rows, cols, std::move(data));
  entries_.emplace_back(std::move(name), t);
  return t;
}

const Tensor& ParamStore::get(std::string_view name) const {
  for (const auto& [n, t] : entries_) {
    if (n == name) return t;
  }
  throw Error(ErrorCode::ShapeMismatch, "no parameter named " + std::string(name));
}

std::vector<Tensor> ParamStore::tensors() const {
  std::vector<Tensor> out;
  out.reserve(entries_.size());
  for (const auto& [n, t] : entries_) out.push_back(t);
  return out;
}

std::size_t ParamStore::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, t] : entries_) t.zero_grad();
}

Linear Linear::create(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
                      Rng& rng) {
  Linear l;
  l.weight = store.create(name + ".weight", in, out, ParamStore::Init::FanInUniform, rng);
  l.bias = store.create(name + ".bias", 1, out, ParamStore::Init::Zeros, rng);
  return l;
}

Tensor Linear::forward(const Tensor& x) const { return add(matmul(x, weight), bias); }

Tensor sage_layer(const Tensor& features, const StaticGraph& graph, const SageLayerParams& params,
                  Activation activation) {
  if (features.rows() != graph.num_nodes) {
    throw Error(ErrorCode::ShapeMismatch, "sage_layer: " + std::to_string(features.rows()) +
                                              " feature rows for " +
                                              std::to_string(graph.num_nodes) + " nodes");
  }
  const Tensor self_term = matmul(features, params.w_self);
  const Tensor neigh_term = matmul(neighbor_mean(features, graph.neighbors), params.w_neigh);
  Tensor h = add(add(self_term, neigh_term), params.bias);
  return activation == Activation::Relu ? relu(h) : h;
}

Tensor global_mean_pool(const Tensor& node_embeddings) {
  if (!node_embeddings.defined() || node_embeddings.rows() == 0) {
    throw Error(ErrorCode::EmptyGraph, "global_mean_pool over zero nodes");
  }
  return mean_pool(node_embeddings, 0);
}

DenseMatrix time_embedding(std::size_t n, std::size_t d_model) {
  DenseMatrix pe(n, d_model);
  for (std::size_t pos = 0; pos < n; ++pos) {
    for (std::size_t i = 0; i < d_model; i += 2) {
      const double angle =
          static_cast<double>(pos) /
          std::pow(10000.0, static_cast<double>(i) / static_cast<double>(d_model));
      pe(pos, i) = std::sin(angle);
      if (i + 1 < d_model) pe(pos, i + 1) = std::cos(angle);
    }
  }
  return pe;
}

TransformerParams create_transformer(ParamStore& store, const std::string& prefix,
                                     const TransformerShape& shape, Rng& rng) {
  if (shape.heads == 0 || shape.d_model % shape.heads != 0) {
    throw Error(ErrorCode::InvalidConfig, "d_model must be a positive multiple of heads");
  }
  using Init = ParamStore::Init;
  const std::size_t d_head = shape.d_model / shape.heads;
  TransformerParams p;
  p.input = Linear::create(store, prefix + ".input", shape.d_in, shape.d_model, rng);
  for (std::size_t l = 0; l < shape.layers; ++l) {
    const std::string lp = prefix + ".layer" + std::to_string(l);
    EncoderLayerParams layer;
    layer.ln1_gamma = store.create(lp + ".ln1.gamma", 1, shape.d_model, Init::Ones, rng);
    layer.ln1_beta = store.create(lp + ".ln1.beta", 1, shape.d_model, Init::Zeros, rng);
    for (std::size_t h = 0; h < shape.heads; ++h) {
      const std::string hp = lp + ".head" + std::to_string(h);
      AttentionHeadParams head;
      head.wq = store.create(hp + ".wq", shape.d_model, d_head, Init::FanInUniform, rng);
      head.wk = store.create(hp + ".wk", shape.d_model, d_head, Init::FanInUniform, rng);
      head.wv = store.create(hp + ".wv", shape.d_model, d_head, Init::FanInUniform, rng);
      layer.heads.push_back(std::move(head));
    }
    layer.attn_out = Linear::create(store, lp + ".attn_out", shape.d_model, shape.d_model, rng);
    layer.ln2_gamma = store.create(lp + ".ln2.gamma", 1, shape.d_model, Init::Ones, rng);
    layer.ln2_beta = store.create(lp + ".ln2.beta", 1, shape.d_model, Init::Zeros, rng);
    layer.ff1 = Linear::create(store, lp + ".ff1", shape.d_model, shape.ffn_dim, rng);
    layer.ff2 = Linear::create(store, lp + ".ff2", shape.ffn_dim, shape.d_model, rng);
    p.layers.push_back(std::move(layer));
  }
  p.final_gamma = store.create(prefix + ".final_ln.gamma", 1, shape.d_model, Init::Ones, rng);
  p.final_beta = store.create(prefix + ".final_ln.beta", 1, shape.d_model, Init::Zeros, rng);
  p.output = Linear::create(store, prefix + ".output", shape.d_model, shape.view_dim, rng);
  return p;
}

namespace {

Tensor maybe_dropout(const Tensor& x, const ForwardContext& ctx) {
  if (!ctx.training || ctx.dropout == 0.0) return x;
  if (ctx.rng == nullptr) throw Error(ErrorCode::InvalidConfig, "dropout needs an Rng");
  return dropout(x, ctx.dropout, *ctx.rng, true);
}

}  // namespace

Tensor transformer_encoder(const Tensor& tokens, const TransformerParams& params,
                           const ForwardContext& ctx, EncoderTrace* trace) {
  if (tokens.rows() == 0) throw Error(ErrorCode::ShapeMismatch, "encoder needs >= 1 token");
  if (tokens.cols() != params.input.weight.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "encoder input width " + std::to_string(tokens.cols()) +
                                              ", expected " +
                                              std::to_string(params.input.weight.rows()));
  }
  const std::size_t n = tokens.rows();
  const std::size_t d_model = params.input.weight.cols();
  Tensor x = params.input.forward(tokens);
  x = embedding_add(x, Tensor::constant(time_embedding(n, d_model)));

  if (trace) trace->attention.clear();
  for (const auto& layer : params.layers) {
    const Tensor h = layer_norm(x, layer.ln1_gamma, layer.ln1_beta);
    std::vector<Tensor> head_out;
    std::vector<DenseMatrix> maps;
    for (const auto& head : layer.heads) {
      const Tensor q = matmul(h, head.wq);
      const Tensor k = matmul(h, head.wk);
      const Tensor v = matmul(h, head.wv);
      const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head.wq.cols()));
      const Tensor attn = softmax_rows(scale(matmul(q, transpose(k)), inv_sqrt));
      if (trace) maps.push_back(attn.to_matrix());
      head_out.push_back(matmul(attn, v));
    }
    const Tensor mixed = layer.attn_out.forward(concat(head_out, 1));
    x = add(x, maybe_dropout(mixed, ctx));
    const Tensor h2 = layer_norm(x, layer.ln2_gamma, layer.ln2_beta);
    const Tensor ff = layer.ff2.forward(relu(layer.ff1.forward(h2)));
    x = add(x, maybe_dropout(ff, ctx));
    if (trace) trace->attention.push_back(std::move(maps));
  }
  x = layer_norm(x, params.final_gamma, params.final_beta);
  return params.output.forward(mean_pool(x, 0));
}

FusionOutput fusion_attention(const Tensor& views, const FusionParams& params) {
  if (views.rows() != 3 || views.cols() != params.wq.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "fusion expects 3 view tokens of width " +
                                              std::to_string(params.wq.rows()));
  }
  const Tensor q = matmul(views, params.wq);
  const Tensor k = matmul(views, params.wk);
  const Tensor v = matmul(views, params.wv);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(params.wq.cols()));
  FusionOutput out;
  out.attention = softmax_rows(scale(matmul(q, transpose(k)), inv_sqrt));
  const Tensor attended = matmul(out.attention, v);
  out.fused = reshape(attended, 1, attended.size());
  for (std::size_t j = 0; j < 3; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < 3; ++i) col += out.attention.at(i, j);
    out.view_weights[j] = col / 3.0;
  }
  return out;
}

Tensor classify(const Tensor& fused, const Linear& classifier) {
  if (fused.rows() != 1 || fused.cols() != classifier.weight.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "classifier input width mismatch");
  }
  return classifier.forward(fused);
}

std::string_view to_string(FusionMode mode) noexcept {
  switch (mode) {
    case FusionMode::Full: return "full";
    case FusionMode::GsageOnly: return "gsage-only";
    case FusionMode::TopoOnly: return "topo-only";
    case FusionMode::DosOnly: return "dos-only";
    case FusionMode::ConcatFuse: return "concat-fuse";
  }
  return "full";
}

FusionMode parse_fusion_mode(std::string_view s) {
  for (auto m : {FusionMode::Full, FusionMode::GsageOnly, FusionMode::TopoOnly,
                 FusionMode::DosOnly, FusionMode::ConcatFuse}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown model mode '" + std::string(s) + "'");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (node_feature_dim == 0) fail("node_feature_dim must be positive");
  if (topo_dim == 0 || dos_bins == 0) fail("descriptor widths must be positive");
  if (sage_layers == 0 || sage_hidden == 0) fail("GSAGE needs >= 1 layer of positive width");
  if (heads == 0 || d_model % heads != 0) fail("d_model must be a multiple of heads");
  if (view_dim == 0 || ffn_dim == 0) fail("view_dim and ffn_dim must be positive");
  if (num_classes < 2) fail("need at least two classes");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
}

Model::Model(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed);
  using Init = ParamStore::Init;

  if (uses_structural()) {
    std::size_t in = config_.node_feature_dim;
    for (std::size_t l = 0; l < config_.sage_layers; ++l) {
      const std::string p = "sage.layer" + std::to_string(l);
      SageLayerParams layer;
      layer.w_self = store_.create(p + ".w_self", in, config_.sage_hidden, Init::FanInUniform, rng);
      layer.w_neigh =
          store_.create(p + ".w_neigh", in, config_.sage_hidden, Init::FanInUniform, rng);
      layer.bias = store_.create(p + ".bias", 1, config_.sage_hidden, Init::Zeros, rng);
      sage_.push_back(std::move(layer));
      in = config_.sage_hidden;
    }
    sage_projection_ =
        Linear::create(store_, "sage.projection", config_.sage_hidden, config_.view_dim, rng);
  }
  TransformerShape shape;
  shape.d_model = config_.d_model;
  shape.heads = config_.heads;
  shape.layers = config_.encoder_layers;
  shape.ffn_dim = config_.ffn_dim;
  shape.view_dim = config_.view_dim;
  if (uses_topo()) {
    shape.d_in = config_.topo_dim;
    topo_encoder_ = create_transformer(store_, "topo", shape, rng);
  }
  if (uses_dos()) {
    shape.d_in = config_.dos_bins;
    dos_encoder_ = create_transformer(store_, "dos", shape, rng);
  }
  if (config_.mode == FusionMode::Full) {
    const std::size_t d = config_.view_dim;
    fusion_.wq = store_.create("fusion.wq", d, d, Init::FanInUniform, rng);
    fusion_.wk = store_.create("fusion.wk", d, d, Init::FanInUniform, rng);
    fusion_.wv = store_.create("fusion.wv", d, d, Init::FanInUniform, rng);
  }
  const bool single = config_.mode == FusionMode::GsageOnly ||
                      config_.mode == FusionMode::TopoOnly || config_.mode == FusionMode::DosOnly;
  const std::size_t fused_dim = single ? config_.view_dim : 3 * config_.view_dim;
  classifier_ = Linear::create(store_, "classifier", fused_dim, config_.num_classes, rng);
}

bool Model::uses_structural() const noexcept {
  return config_.mode == FusionMode::Full || config_.mode == FusionMode::ConcatFuse ||
         config_.mode == FusionMode::GsageOnly;
}
bool Model::uses_topo() const noexcept {
  return config_.mode == FusionMode::Full || config_.mode == FusionMode::ConcatFuse ||
         config_.mode == FusionMode::TopoOnly;
}
bool Model::uses_dos() const noexcept {
  return config_.mode == FusionMode::Full || config_.mode == FusionMode::ConcatFuse ||
         config_.mode == FusionMode::DosOnly;
}

Tensor Model::structural_view(const GraphSample& sample, const ForwardContext& ctx) const {
  if (sample.node_features.cols() != config_.node_feature_dim) {
    throw Error(ErrorCode::ShapeMismatch,
                "node features have " + std::to_string(sample.node_features.cols()) +
                    " columns, model expects " + std::to_string(config_.node_feature_dim));
  }
  Tensor h = Tensor::constant(sample.node_features);
  for (const auto& layer : sage_) h = maybe_dropout(sage_layer(h, sample.graph, layer), ctx);
  return sage_projection_.forward(global_mean_pool(h));
}

Tensor Model::topo_view(const GraphSample& sample, const ForwardContext& ctx) const {
  return transformer_encoder(Tensor::constant(sample.topo_tokens), topo_encoder_, ctx);
}

Tensor Model::dos_view(const GraphSample& sample, const ForwardContext& ctx) const {
  return transformer_encoder(Tensor::constant(sample.dos_tokens), dos_encoder_, ctx);
}

ForwardResult Model::forward(const GraphSample& sample, const ForwardContext& ctx) const {
  ForwardResult r;
  switch (config_.mode) {
    case FusionMode::Full: {
      const std::vector<Tensor> views{structural_view(sample, ctx), topo_view(sample, ctx),
                                      dos_view(sample, ctx)};
      FusionOutput f = fusion_attention(concat(views, 0), fusion_);
      r.fused = f.fused;
      r.view_weights = f.view_weights;
      break;
    }
    case FusionMode::ConcatFuse: {
      const std::vector<Tensor> views{structural_view(sample, ctx), topo_view(sample, ctx),
                                      dos_view(sample, ctx)};
      r.fused = concat(views, 1);
      r.view_weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
      break;
    }
    case FusionMode::GsageOnly:
      r.fused = structural_view(sample, ctx);
      r.view_weights = {1.0, 0.0, 0.0};
      break;
    case FusionMode::TopoOnly:
      r.fused = topo_view(sample, ctx);
      r.view_weights = {0.0, 1.0, 0.0};
      break;
    case FusionMode::DosOnly:
      r.fused = dos_view(sample, ctx);
      r.view_weights = {0.0, 0.0, 1.0};
      break;
  }
  r.logits = classify(maybe_dropout(r.fused, ctx), classifier_);
  return r;
}

}  // namespace t3f::nn
