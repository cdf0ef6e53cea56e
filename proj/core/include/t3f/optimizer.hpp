#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "t3f/autodiff.hpp"

namespace t3f::nn {

struct AdamHyper {
  double lr = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

struct AdamState {
  std::size_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  AdamHyper hyper;
};

/// One Adam update of a single array at (1-based) step `t`. Weight decay is
/// decoupled and applied first: p <- p - lr * wd * p. Then the moments are updated
/// and p <- p - lr * m_hat / (sqrt(v_hat) + eps).
void adam_update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::size_t t, const AdamHyper& hyper);

/// Applies one step to every tensor using its accumulated gradient (a tensor that
/// received no gradient is treated as having a zero gradient). Lazily sizes the
/// moment buffers on the first call.
void adam_step(std::span<Tensor> params, AdamState& state);

}  // namespace t3f::nn
