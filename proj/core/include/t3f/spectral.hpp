#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "t3f/temporal_graph.hpp"

namespace t3f {

/// Dense symmetric matrix, packed upper triangle.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t order) : order_(order), packed_(order * (order + 1) / 2, 0.0) {}

  std::size_t order() const noexcept { return order_; }

  double operator()(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double value) { packed_[index(i, j)] = value; }

  double trace() const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    return j * (j + 1) / 2 + i;
  }

  std::size_t order_ = 0;
  std::vector<double> packed_;
};

/// L = I - D^{-1/2} A D^{-1/2} over the window's distinct edges, in local indices.
SymMatrix normalized_laplacian(const WindowGraph& window);
SymMatrix normalized_laplacian(std::size_t num_nodes, std::span<const Edge> local_edges);

inline constexpr double kDefaultEigenTolerance = 0x1.0p-52;

/// Ascending eigenvalues. Householder reduction to tridiagonal form, then QL
/// iterations with implicit Wilkinson shifts. An off-diagonal entry is treated as
/// zero once |e_i| <= tol * (|d_i| + |d_{i+1}|). Throws NonConvergence after 60
/// sweeps on a single eigenvalue.
std::vector<double> eigenvalues_sym(const SymMatrix& m, double tol = kDefaultEigenTolerance);

struct DosHistogram {
  std::vector<double> bin_edges;  // bin_count + 1 entries, 0 .. 2
  std::vector<double> mass;       // bin_count entries
  bool empty = false;             // all-zero sentinel for an empty window

  std::size_t bin_count() const noexcept { return mass.size(); }
  double bin_width() const noexcept { return bin_count() ? 2.0 / static_cast<double>(bin_count()) : 0.0; }
};

/// Equal-width bins over [0, 2], half-open except the last. Values are clamped to
/// [0, 2] first; a value within 1e-9 below a bin edge is counted in the bin that
/// starts at that edge, so that exact spectral values such as 1.0 land
/// deterministically despite rounding. An empty list gives the flagged sentinel.
DosHistogram dos_histogram(std::span<const double> eigenvalues, std::size_t bin_count = 4);

/// W1 between two histograms on the same bins: sum_j |CDF_a(j) - CDF_b(j)| * width.
double wasserstein1_hist(const DosHistogram& a, const DosHistogram& b);

DosHistogram spectral_descriptor(const WindowGraph& window, std::size_t bin_count = 4);

}  // namespace t3f
