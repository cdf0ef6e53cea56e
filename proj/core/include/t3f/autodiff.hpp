#pragma once

// Minimal reverse-mode automatic differentiation over row-major 2-D tensors.
//
// Every op allocates a node holding its value, its parents and a closure that
// pushes the node's gradient into the parents. Tensor::backward() orders the
// reachable nodes topologically and runs the closures in reverse. The graph is
// owned through shared_ptr, so it is released when the last output handle goes
// away; parameter leaves outlive it and keep their accumulated gradients.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "t3f/matrix.hpp"
#include "t3f/rng.hpp"

namespace t3f::nn {

namespace detail {

struct Node {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  std::vector<double>& grad_buffer() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Tensor constant(const DenseMatrix& m);
  static Tensor zeros(std::size_t rows, std::size_t cols);
  /// Leaf that accumulates gradients.
  static Tensor parameter(std::size_t rows, std::size_t cols, std::vector<double> data);

  bool defined() const noexcept { return node_ != nullptr; }
  std::size_t rows() const noexcept { return node_->rows; }
  std::size_t cols() const noexcept { return node_->cols; }
  std::size_t size() const noexcept { return node_->value.size(); }
  bool requires_grad() const noexcept { return node_->requires_grad; }

  std::span<const double> data() const noexcept { return node_->value; }
  // Writable view of a leaf's storage (optimizer updates, checkpoint loads).
  std::span<double> mutable_data() noexcept { return node_->value; }
  double at(std::size_t r, std::size_t c) const { return node_->value[r * node_->cols + c]; }
  double item() const;

  /// Empty span until a backward pass has reached this tensor.
  std::span<const double> grad() const noexcept { return node_->grad; }
  void zero_grad();

  /// Seeds d(this)/d(this) = 1; the tensor must be 1x1.
  void backward() const;

  DenseMatrix to_matrix() const;

  // For op implementations.
  static Tensor from_op(std::size_t rows, std::size_t cols, std::vector<double> value,
                        std::vector<Tensor> parents, std::function<void(detail::Node&)> backward);
  const std::shared_ptr<detail::Node>& node() const noexcept { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

// ---- Ops. All throw Error(ShapeMismatch) on incompatible shapes. ----

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

/// Elementwise sum. `b` may also be a 1 x cols row, broadcast over the rows of `a`.
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise, same shape
Tensor scale(const Tensor& a, double s);
Tensor relu(const Tensor& a);

/// Row-wise softmax.
Tensor softmax_rows(const Tensor& a);

/// Per-row normalization to zero mean / unit variance, then gamma * x + beta with
/// gamma, beta of shape 1 x cols.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

/// Inverted dropout: zeroes entries with probability `rate` and scales survivors by
/// 1 / (1 - rate). Identity when !training or rate == 0. The mask is drawn from `rng`.
Tensor dropout(const Tensor& x, double rate, Rng& rng, bool training);

/// axis 0: mean over rows -> 1 x cols. axis 1: mean over columns -> rows x 1.
Tensor mean_pool(const Tensor& x, int axis);

/// axis 0 stacks rows; axis 1 joins columns.
Tensor concat(std::span<const Tensor> parts, int axis);

Tensor reshape(const Tensor& x, std::size_t rows, std::size_t cols);

/// tokens + the first tokens.rows() rows of `table`.
Tensor embedding_add(const Tensor& tokens, const Tensor& table);

/// Row v of the result is the mean of the rows of `h` listed in neighbors[v];
/// zero when the list is empty.
Tensor neighbor_mean(const Tensor& h, const std::vector<std::vector<std::uint32_t>>& neighbors);

Tensor sum(const Tensor& x);

/// Mean over rows of -log softmax(logits)[label]. One label per row. Throws
/// NonFiniteValue if the logits are not finite.
Tensor cross_entropy_with_logits(const Tensor& logits, std::span<const int> labels);

}  // namespace t3f::nn
