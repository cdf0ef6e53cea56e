#include "t3f/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "t3f/error.hpp"

namespace t3f::nn {

using detail::Node;

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw Error(ErrorCode::ShapeMismatch, std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                                            std::to_string(a.cols()) + " vs " +
                                            std::to_string(b.rows()) + "x" +
                                            std::to_string(b.cols()));
}

void require_defined(const Tensor& t, const char* op) {
  if (!t.defined()) throw Error(ErrorCode::ShapeMismatch, std::string(op) + ": undefined tensor");
}

// Parent gradient buffer, or nullptr when that parent does not need one.
std::vector<double>* grad_of(Node& self, std::size_t i) {
  Node& p = *self.parents[i];
  return p.requires_grad ? &p.grad_buffer() : nullptr;
}

}  // namespace

Tensor Tensor::constant(std::size_t rows, std::size_t cols, std::vector<double> data) {
  if (data.size() != rows * cols) {
    throw Error(ErrorCode::ShapeMismatch, "constant: data length does not match shape");
  }
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(data);
  return Tensor(std::move(node));
}

Tensor Tensor::constant(const DenseMatrix& m) {
  return constant(m.rows(), m.cols(), std::vector<double>(m.data().begin(), m.data().end()));
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols) {
  return constant(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Tensor Tensor::parameter(std::size_t rows, std::size_t cols, std::vector<double> data) {
  Tensor t = constant(rows, cols, std::move(data));
  t.node_->requires_grad = true;
  return t;
}

double Tensor::item() const {
  if (size() != 1) throw Error(ErrorCode::ShapeMismatch, "item() on a non-scalar tensor");
  return node_->value[0];
}

void Tensor::zero_grad() { std::fill(node_->grad.begin(), node_->grad.end(), 0.0); }

DenseMatrix Tensor::to_matrix() const {
  DenseMatrix m(rows(), cols());
  std::copy(node_->value.begin(), node_->value.end(), m.data().begin());
  return m;
}

Tensor Tensor::from_op(std::size_t rows, std::size_t cols, std::vector<double> value,
                       std::vector<Tensor> parents, std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(value);
  for (const auto& p : parents) node->requires_grad = node->requires_grad || p.requires_grad();
  if (node->requires_grad) {
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(p.node_);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

void Tensor::backward() const {
  if (size() != 1) throw Error(ErrorCode::ShapeMismatch, "backward() needs a scalar output");
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order (parents before children).
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node* p = n->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  node_->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined(a, "matmul");
  require_defined(b, "matmul");
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  const auto A = a.data();
  const auto B = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aip * B[p * n + j];
    }
  }
  return Tensor::from_op(m, n, std::move(out), {a, b}, [m, k, n](Node& self) {
    const auto& G = self.grad;
    const auto& A = self.parents[0]->value;
    const auto& B = self.parents[1]->value;
    if (auto* ga = grad_of(self, 0)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += G[i * n + j] * B[p * n + j];
          (*ga)[i * k + p] += s;
        }
    }
    if (auto* gb = grad_of(self, 1)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = A[i * k + p];
          if (aip == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) (*gb)[p * n + j] += aip * G[i * n + j];
        }
    }
  });
}

Tensor transpose(const Tensor& a) {
  require_defined(a, "transpose");
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = a.data()[i * c + j];
  return Tensor::from_op(c, r, std::move(out), {a}, [r, c](Node& self) {
    if (auto* ga = grad_of(self, 0)) {
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) (*ga)[i * c + j] += self.grad[j * r + i];
    }
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_defined(a, "add");
  require_defined(b, "add");
  const bool same = a.rows() == b.rows() && a.cols() == b.cols();
  const bool row_broadcast = !same && b.rows() == 1 && b.cols() == a.cols();
  if (!same && !row_broadcast) shape_error("add", a, b);
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto B = b.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] += B[row_broadcast ? j : i * c + j];
  return Tensor::from_op(r, c, std::move(out), {a, b}, [r, c, row_broadcast](Node& self) {
    if (auto* ga = grad_of(self, 0)) {
      for (std::size_t i = 0; i < r * c; ++i) (*ga)[i] += self.grad[i];
    }
    if (auto* gb = grad_of(self, 1)) {
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
          (*gb)[row_broadcast ? j : i * c + j] += self.grad[i * c + j];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_defined(a, "mul");
  require_defined(b, "mul");
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("mul", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return Tensor::from_op(a.rows(), a.cols(), std::move(out), {a, b}, [](Node& self) {
    const auto& A = self.parents[0]->value;
    const auto& B = self.parents[1]->value;
    if (auto* ga = grad_of(self, 0)) {
      for (std::size_t i = 0; i < A.size(); ++i) (*ga)[i] += self.grad[i] * B[i];
    }
    if (auto* gb = grad_of(self, 1)) {
      for (std::size_t i = 0; i < A.size(); ++i) (*gb)[i] += self.grad[i] * A[i];
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  require_defined(a, "scale");
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double& x : out) x *= s;
  return Tensor::from_op(a.rows(), a.cols(), std::move(out), {a}, [s](Node& self) {
    if (auto* ga = grad_of(self, 0)) {
      for (std::size_t i = 0; i < ga->size(); ++i) (*ga)[i] += s * self.grad[i];
    }
  });
}

Tensor relu(const Tensor& a) {
  require_defined(a, "relu");
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double& x : out) x = x > 0.0 ? x : 0.0;
  return Tensor::from_op(a.rows(), a.cols(), std::move(out), {a}, [](Node& self) {
    if (auto* ga = grad_of(self, 0)) {
      const auto& X = self.parents[0]->value;
      for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i] > 0.0) (*ga)[i] += self.grad[i];
      }
    }
  });
}

Tensor softmax_rows(const Tensor& a) {
  require_defined(a, "softmax_rows");
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(a.data().begin(), a.data().end());
  for (std::size_t i = 0; i < r; ++i) {
    double* row = out.data() + i * c;
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      row[j] = std::exp(row[j] - mx);
      z += row[j];
    }
    for (std::size_t j = 0; j < c; ++j) row[j] /= z;
  }
  return Tensor::from_op(r, c, std::move(out), {a}, [r, c](Node& self) {
    if (auto* ga = grad_of(self, 0)) {
      const auto& Y = self.value;
      for (std::size_t i = 0; i < r; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += self.grad[i * c + j] * Y[i * c + j];
        for (std::size_t j = 0; j < c; ++j)
          (*ga)[i * c + j] += Y[i * c + j] * (self.grad[i * c + j] - dot);
      }
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  require_defined(x, "layer_norm");
  if (gamma.rows() != 1 || gamma.cols() != x.cols()) shape_error("layer_norm", x, gamma);
  if (beta.rows() != 1 || beta.cols() != x.cols()) shape_error("layer_norm", x, beta);
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<double> xhat(r * c), inv_std(r), out(r * c);
  const auto X = x.data();
  const auto G = gamma.data();
  const auto B = beta.data();
  for (std::size_t i = 0; i < r; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < c; ++j) mean += X[i * c + j];
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (X[i * c + j] - mean) * (X[i * c + j] - mean);
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) {
      xhat[i * c + j] = (X[i * c + j] - mean) * inv_std[i];
      out[i * c + j] = G[j] * xhat[i * c + j] + B[j];
    }
  }
  return Tensor::from_op(
      r, c, std::move(out), {x, gamma, beta},
      [r, c, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
        const auto& G = self.parents[1]->value;
        const auto& dY = self.grad;
        if (auto* gx = grad_of(self, 0)) {
          const double inv_c = 1.0 / static_cast<double>(c);
          for (std::size_t i = 0; i < r; ++i) {
            double sum_g = 0.0, sum_gx = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
              const double g = dY[i * c + j] * G[j];
              sum_g += g;
              sum_gx += g * xhat[i * c + j];
            }
            for (std::size_t j = 0; j < c; ++j) {
              const double g = dY[i * c + j] * G[j];
              (*gx)[i * c + j] +=
                  inv_std[i] * (g - inv_c * sum_g - xhat[i * c + j] * inv_c * sum_gx);
            }
          }
        }
        if (auto* gg = grad_of(self, 1)) {
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) (*gg)[j] += dY[i * c + j] * xhat[i * c + j];
        }
        if (auto* gb = grad_of(self, 2)) {
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) (*gb)[j] += dY[i * c + j];
        }
      });
}

Tensor dropout(const Tensor& x, double rate, Rng& rng, bool training) {
  require_defined(x, "dropout");
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "dropout rate must lie in [0, 1)");
  }
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.size());
  for (double& m : mask) m = rng.uniform() < rate ? 0.0 : keep_scale;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] * mask[i];
  return Tensor::from_op(x.rows(), x.cols(), std::move(out), {x},
                         [mask = std::move(mask)](Node& self) {
                           if (auto* gx = grad_of(self, 0)) {
                             for (std::size_t i = 0; i < mask.size(); ++i)
                               (*gx)[i] += self.grad[i] * mask[i];
                           }
                         });
}

Tensor mean_pool(const Tensor& x, int axis) {
  require_defined(x, "mean_pool");
  const std::size_t r = x.rows(), c = x.cols();
  if (r == 0 || c == 0) throw Error(ErrorCode::ShapeMismatch, "mean_pool of an empty tensor");
  if (axis == 0) {
    std::vector<double> out(c, 0.0);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) out[j] += x.data()[i * c + j];
    for (double& v : out) v /= static_cast<double>(r);
    return Tensor::from_op(1, c, std::move(out), {x}, [r, c](Node& self) {
      if (auto* gx = grad_of(self, 0)) {
        const double inv = 1.0 / static_cast<double>(r);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) (*gx)[i * c + j] += self.grad[j] * inv;
      }
    });
  }
  if (axis == 1) {
    std::vector<double> out(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) out[i] += x.data()[i * c + j];
      out[i] /= static_cast<double>(c);
    }
    return Tensor::from_op(r, 1, std::move(out), {x}, [r, c](Node& self) {
      if (auto* gx = grad_of(self, 0)) {
        const double inv = 1.0 / static_cast<double>(c);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) (*gx)[i * c + j] += self.grad[i] * inv;
      }
    });
  }
  throw Error(ErrorCode::ShapeMismatch, "mean_pool axis must be 0 or 1");
}

Tensor concat(std::span<const Tensor> parts, int axis) {
  if (parts.empty()) throw Error(ErrorCode::ShapeMismatch, "concat of zero tensors");
  for (const auto& p : parts) require_defined(p, "concat");
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  if (axis == 0) {
    const std::size_t c = parts[0].cols();
    std::size_t rows = 0;
    std::vector<double> out;
    for (const auto& p : parts) {
      if (p.cols() != c) shape_error("concat", parts[0], p);
      rows += p.rows();
      out.insert(out.end(), p.data().begin(), p.data().end());
    }
    return Tensor::from_op(rows, c, std::move(out), std::move(inputs), [](Node& self) {
      std::size_t offset = 0;
      for (std::size_t k = 0; k < self.parents.size(); ++k) {
        const std::size_t len = self.parents[k]->value.size();
        if (auto* g = grad_of(self, k)) {
          for (std::size_t i = 0; i < len; ++i) (*g)[i] += self.grad[offset + i];
        }
        offset += len;
      }
    });
  }
  if (axis == 1) {
    const std::size_t r = parts[0].rows();
    std::size_t cols = 0;
    for (const auto& p : parts) {
      if (p.rows() != r) shape_error("concat", parts[0], p);
      cols += p.cols();
    }
    std::vector<double> out(r * cols);
    std::size_t col0 = 0;
    for (const auto& p : parts) {
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < p.cols(); ++j) out[i * cols + col0 + j] = p.at(i, j);
      col0 += p.cols();
    }
    return Tensor::from_op(r, cols, std::move(out), std::move(inputs), [r, cols](Node& self) {
      std::size_t c0 = 0;
      for (std::size_t k = 0; k < self.parents.size(); ++k) {
        const std::size_t pc = self.parents[k]->cols;
        if (auto* g = grad_of(self, k)) {
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < pc; ++j) (*g)[i * pc + j] += self.grad[i * cols + c0 + j];
        }
        c0 += pc;
      }
    });
  }
  throw Error(ErrorCode::ShapeMismatch, "concat axis must be 0 or 1");
}

Tensor reshape(const Tensor& x, std::size_t rows, std::size_t cols) {
  require_defined(x, "reshape");
  if (rows * cols != x.size()) {
    throw Error(ErrorCode::ShapeMismatch, "reshape changes the element count");
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return Tensor::from_op(rows, cols, std::move(out), {x}, [](Node& self) {
    if (auto* gx = grad_of(self, 0)) {
      for (std::size_t i = 0; i < gx->size(); ++i) (*gx)[i] += self.grad[i];
    }
  });
}

Tensor embedding_add(const Tensor& tokens, const Tensor& table) {
  require_defined(tokens, "embedding_add");
  require_defined(table, "embedding_add");
  if (table.cols() != tokens.cols() || table.rows() < tokens.rows()) {
    shape_error("embedding_add", tokens, table);
  }
  const std::size_t n = tokens.size();
  std::vector<double> out(tokens.data().begin(), tokens.data().end());
  for (std::size_t i = 0; i < n; ++i) out[i] += table.data()[i];
  return Tensor::from_op(tokens.rows(), tokens.cols(), std::move(out), {tokens, table},
                         [n](Node& self) {
                           if (auto* g = grad_of(self, 0)) {
                             for (std::size_t i = 0; i < n; ++i) (*g)[i] += self.grad[i];
                           }
                           if (auto* g = grad_of(self, 1)) {
                             for (std::size_t i = 0; i < n; ++i) (*g)[i] += self.grad[i];
                           }
                         });
}

Tensor neighbor_mean(const Tensor& h, const std::vector<std::vector<std::uint32_t>>& neighbors) {
  require_defined(h, "neighbor_mean");
  if (neighbors.size() != h.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "neighbor_mean: one neighbor list per row required");
  }
  const std::size_t r = h.rows(), c = h.cols();
  std::vector<double> out(r * c, 0.0);
  for (std::size_t v = 0; v < r; ++v) {
    const auto& nb = neighbors[v];
    if (nb.empty()) continue;
    const double inv = 1.0 / static_cast<double>(nb.size());
    for (const auto u : nb) {
      if (u >= r) throw Error(ErrorCode::ShapeMismatch, "neighbor_mean: neighbor out of range");
      for (std::size_t j = 0; j < c; ++j) out[v * c + j] += h.data()[u * c + j] * inv;
    }
  }
  return Tensor::from_op(r, c, std::move(out), {h}, [r, c, neighbors](Node& self) {
    if (auto* g = grad_of(self, 0)) {
      for (std::size_t v = 0; v < r; ++v) {
        const auto& nb = neighbors[v];
        if (nb.empty()) continue;
        const double inv = 1.0 / static_cast<double>(nb.size());
        for (const auto u : nb)
          for (std::size_t j = 0; j < c; ++j) (*g)[u * c + j] += self.grad[v * c + j] * inv;
      }
    }
  });
}

Tensor sum(const Tensor& x) {
  require_defined(x, "sum");
  double s = 0.0;
  for (const double v : x.data()) s += v;
  return Tensor::from_op(1, 1, {s}, {x}, [](Node& self) {
    if (auto* g = grad_of(self, 0)) {
      for (double& v : *g) v += self.grad[0];
    }
  });
}

Tensor cross_entropy_with_logits(const Tensor& logits, std::span<const int> labels) {
  require_defined(logits, "cross_entropy_with_logits");
  const std::size_t r = logits.rows(), c = logits.cols();
  if (labels.size() != r || c == 0) {
    throw Error(ErrorCode::ShapeMismatch, "cross_entropy: one label per logit row required");
  }
  std::vector<double> probs(r * c);
  double loss = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw Error(ErrorCode::ShapeMismatch, "cross_entropy: label out of range");
    }
    const double* row = logits.data().data() + i * c;
    for (std::size_t j = 0; j < c; ++j) {
      if (!std::isfinite(row[j])) throw Error(ErrorCode::NonFiniteValue, "non-finite logit");
    }
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    const double log_z = mx + std::log(z);
    for (std::size_t j = 0; j < c; ++j) probs[i * c + j] = std::exp(row[j] - log_z);
    loss += log_z - row[y];
  }
  loss /= static_cast<double>(r);
  std::vector<int> ys(labels.begin(), labels.end());
  return Tensor::from_op(1, 1, {loss}, {logits},
                         [r, c, probs = std::move(probs), ys = std::move(ys)](Node& self) {
                           if (auto* g = grad_of(self, 0)) {
                             const double s = self.grad[0] / static_cast<double>(r);
                             for (std::size_t i = 0; i < r; ++i)
                               for (std::size_t j = 0; j < c; ++j) {
                                 const double onehot =
                                     static_cast<int>(j) == ys[i] ? 1.0 : 0.0;
                                 (*g)[i * c + j] += s * (probs[i * c + j] - onehot);
                               }
                           }
                         });
}

}  // namespace t3f::nn
