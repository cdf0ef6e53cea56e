#include "t3f/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "t3f/error.hpp"

namespace t3f {

double SymMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < order_; ++i) s += (*this)(i, i);
  return s;
}

SymMatrix normalized_laplacian(std::size_t num_nodes, std::span<const Edge> local_edges) {
  if (num_nodes == 0) throw Error(ErrorCode::EmptyWindow, "Laplacian of an empty window");
  std::vector<double> degree(num_nodes, 0.0);
  for (const auto& e : local_edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw Error(ErrorCode::OutOfRangeNode, "edge outside Laplacian order");
    }
    degree[e.u] += 1.0;
    degree[e.v] += 1.0;
  }
  SymMatrix L(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) L.set(i, i, degree[i] > 0.0 ? 1.0 : 0.0);
  for (const auto& e : local_edges) {
    L.set(e.u, e.v, -1.0 / std::sqrt(degree[e.u] * degree[e.v]));
  }
  return L;
}

SymMatrix normalized_laplacian(const WindowGraph& window) {
  const auto local = window.local_edges();
  return normalized_laplacian(window.num_nodes(), local);
}

namespace {

// Reduces the full symmetric matrix `a` (n x n, row-major, overwritten) to
// tridiagonal form; diag receives the diagonal, off[i] couples i and i+1.
void householder_tridiagonalize(std::vector<double>& a, std::size_t n, std::vector<double>& diag,
                                std::vector<double>& off) {
  diag.assign(n, 0.0);
  off.assign(n, 0.0);
  std::vector<double> v(n), p(n);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) norm2 += at(i, k) * at(i, k);
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) continue;
    const double x0 = at(k + 1, k);
    const double alpha = x0 >= 0.0 ? -norm : norm;

    for (std::size_t i = 0; i <= k; ++i) v[i] = 0.0;
    v[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = at(i, k);
    double vtv = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vtv += v[i] * v[i];
    if (vtv == 0.0) continue;
    const double beta = 2.0 / vtv;

    // A <- H A H with H = I - beta v v^T, restricted to the trailing block.
    for (std::size_t i = k + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += at(i, j) * v[j];
      p[i] = beta * s;
    }
    double ptv = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) ptv += p[i] * v[i];
    const double kappa = 0.5 * beta * ptv;
    for (std::size_t i = k + 1; i < n; ++i) p[i] -= kappa * v[i];
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) at(i, j) -= v[i] * p[j] + p[i] * v[j];
    }
    at(k + 1, k) = alpha;
    at(k, k + 1) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) {
      at(i, k) = 0.0;
      at(k, i) = 0.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) diag[i] = at(i, i);
  for (std::size_t i = 0; i + 1 < n; ++i) off[i] = at(i + 1, i);
}

// Implicit-shift QL on a symmetric tridiagonal matrix; eigenvalues left in diag.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, double tol) {
  const std::size_t n = d.size();
  constexpr int kMaxSweeps = 60;
  for (std::size_t l = 0; l < n; ++l) {
    int sweeps = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= tol * dd) break;
      }
      if (m == l) break;
      if (++sweeps > kMaxSweeps) {
        throw Error(ErrorCode::NonConvergence,
                    "tridiagonal QL exceeded " + std::to_string(kMaxSweeps) + " sweeps");
      }
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

}  // namespace

std::vector<double> eigenvalues_sym(const SymMatrix& m, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "eigen tolerance must be positive");
  const std::size_t n = m.order();
  if (n == 0) return {};
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double x = m(i, j);
      if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "matrix entry is not finite");
      a[i * n + j] = x;
    }
  }
  std::vector<double> diag, off;
  householder_tridiagonalize(a, n, diag, off);
  tridiagonal_ql(diag, off, tol);
  std::sort(diag.begin(), diag.end());
  return diag;
}

namespace {

std::vector<double> equal_width_edges(std::size_t bin_count) {
  std::vector<double> edges(bin_count + 1);
  for (std::size_t j = 0; j <= bin_count; ++j) {
    edges[j] = 2.0 * static_cast<double>(j) / static_cast<double>(bin_count);
  }
  return edges;
}

}  // namespace

DosHistogram dos_histogram(std::span<const double> eigenvalues, std::size_t bin_count) {
  if (bin_count == 0) throw Error(ErrorCode::InvalidConfig, "DoS needs at least one bin");
  DosHistogram h;
  h.bin_edges = equal_width_edges(bin_count);
  h.mass.assign(bin_count, 0.0);
  if (eigenvalues.empty()) {
    h.empty = true;
    return h;
  }
  constexpr double kEdgeSnap = 1e-9;
  const double width = 2.0 / static_cast<double>(bin_count);
  for (const double raw : eigenvalues) {
    const double x = std::clamp(raw, 0.0, 2.0);
    auto j = static_cast<std::size_t>(std::floor((x + kEdgeSnap) / width));
    j = std::min(j, bin_count - 1);
    h.mass[j] += 1.0;
  }
  const double total = static_cast<double>(eigenvalues.size());
  for (double& m : h.mass) m /= total;
  return h;
}

double wasserstein1_hist(const DosHistogram& a, const DosHistogram& b) {
  if (a.bin_edges != b.bin_edges || a.mass.size() != b.mass.size()) {
    throw Error(ErrorCode::BinMismatch, "histograms use different bins");
  }
  const double width = a.bin_width();
  double cdf_a = 0.0;
  double cdf_b = 0.0;
  double w1 = 0.0;
  for (std::size_t j = 0; j < a.mass.size(); ++j) {
    cdf_a += a.mass[j];
    cdf_b += b.mass[j];
    w1 += std::fabs(cdf_a - cdf_b) * width;
  }
  return w1;
}

DosHistogram spectral_descriptor(const WindowGraph& window, std::size_t bin_count) {
  if (window.empty()) return dos_histogram({}, bin_count);
  const auto eigs = eigenvalues_sym(normalized_laplacian(window));
  return dos_histogram(eigs, bin_count);
}

}  // namespace t3f
