#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "quasivar/grid.hpp"

namespace quasivar {

/// Symmetric positive definite band matrix with in-place Cholesky factor.
/// Only the lower band is stored: row i holds columns [i - b, i].
class BandedCholesky {
 public:
  BandedCholesky() = default;
  BandedCholesky(std::size_t size, std::size_t half_bandwidth);

  std::size_t size() const { return size_; }
  std::size_t half_bandwidth() const { return band_; }
  bool factorized() const { return factorized_; }

  /// Entry (i, j) with j <= i <= j + b.
  double& at(std::size_t i, std::size_t j) { return data_[i * (band_ + 1) + (j + band_ - i)]; }
  double at(std::size_t i, std::size_t j) const {
    return data_[i * (band_ + 1) + (j + band_ - i)];
  }

  /// y = A x (only valid before factorize()).
  void multiply(std::span<const double> x, std::span<double> y) const;

  /// Throws LinearSolveError when a pivot is not positive.
  void factorize();
  void solve_in_place(std::span<double> rhs) const;

 private:
  std::size_t size_ = 0;
  std::size_t band_ = 0;
  std::vector<double> data_;
  bool factorized_ = false;
};

/// Symmetric operator acting on the interior nodes of a grid, assembled from
/// element contributions and stored as a band matrix. Inputs and outputs are
/// nodal vectors with zero boundary entries.
class InteriorOperator {
 public:
  /// K_ij = sum_e w_e |e| grad N_i . grad N_j; weights default to 1.
  static InteriorOperator stiffness(GridPtr grid, std::span<const double> element_weights = {});
  /// M_ij = sum_e |e| / c_e^2 for i, j in e, c_e the element node count.
  /// This is the bilinear form of the centroid rule.
  static InteriorOperator centroid_mass(GridPtr grid);

  const Grid& grid() const { return *grid_; }
  GridFunction apply(const GridFunction& x) const;
  /// Factorizes on first use.
  void factorize();
  GridFunction solve(const GridFunction& rhs) const;

 private:
  InteriorOperator(GridPtr grid, std::size_t band);
  template <class LocalEntry>
  static InteriorOperator assemble(GridPtr grid, LocalEntry&& entry);

  GridPtr grid_;
  std::vector<std::ptrdiff_t> interior_index_;
  BandedCholesky matrix_;
  BandedCholesky factor_;
};

}  // namespace quasivar
