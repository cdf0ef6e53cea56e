#include "t3f/optimizer.hpp"

#include <cmath>

#include "t3f/error.hpp"

namespace t3f::nn {

void adam_update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::size_t t, const AdamHyper& hyper) {
  if (grad.size() != param.size() || m.size() != param.size() || v.size() != param.size()) {
    throw Error(ErrorCode::ShapeMismatch, "adam_update: buffer sizes differ");
  }
  if (!(hyper.lr >= 0.0)) throw Error(ErrorCode::InvalidConfig, "learning rate must be >= 0");
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    param[i] -= hyper.lr * hyper.weight_decay * param[i];
    m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * grad[i];
    v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    param[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
  }
}

void adam_step(std::span<Tensor> params, AdamState& state) {
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "adam_step: parameter list changed between steps");
  }
  ++state.step;
  std::vector<double> zeros;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    if (state.m[k].size() != p.size()) {
      throw Error(ErrorCode::ShapeMismatch, "adam_step: parameter shape changed");
    }
    std::span<const double> g = p.grad();
    if (g.empty()) {
      zeros.assign(p.size(), 0.0);
      g = zeros;
    }
    adam_update(p.mutable_data(), g, state.m[k], state.v[k], state.step, state.hyper);
  }
}

}  // namespace t3f::nn
