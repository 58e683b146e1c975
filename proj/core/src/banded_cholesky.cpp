#include "quasivar/banded_cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quasivar/error.hpp"

namespace quasivar {

BandedCholesky::BandedCholesky(std::size_t size, std::size_t half_bandwidth)
    : size_(size), band_(half_bandwidth), data_(size * (half_bandwidth + 1), 0.0) {}

void BandedCholesky::multiply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t j0 = i > band_ ? i - band_ : 0;
    for (std::size_t j = j0; j < i; ++j) {
      const double a = at(i, j);
      y[i] += a * x[j];
      y[j] += a * x[i];
    }
    y[i] += at(i, i) * x[i];
  }
}

void BandedCholesky::factorize() {
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t j0 = i > band_ ? i - band_ : 0;
    for (std::size_t j = j0; j <= i; ++j) {
      double sum = at(i, j);
      const std::size_t k0 = std::max(j0, j > band_ ? j - band_ : 0);
      for (std::size_t k = k0; k < j; ++k) sum -= at(i, k) * at(j, k);
      if (i == j) {
        if (!(sum > 0.0)) {
          throw LinearSolveError("matrix is not positive definite at row " + std::to_string(i));
        }
        at(i, i) = std::sqrt(sum);
      } else {
        at(i, j) = sum / at(j, j);
      }
    }
  }
  factorized_ = true;
}

void BandedCholesky::solve_in_place(std::span<double> rhs) const {
  if (!factorized_) throw LinearSolveError("solve called before factorize");
  // L y = b
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t j0 = i > band_ ? i - band_ : 0;
    double sum = rhs[i];
    for (std::size_t j = j0; j < i; ++j) sum -= at(i, j) * rhs[j];
    rhs[i] = sum / at(i, i);
  }
  // L^T x = y
  for (std::size_t ii = size_; ii-- > 0;) {
    rhs[ii] /= at(ii, ii);
    const double xi = rhs[ii];
    const std::size_t j0 = ii > band_ ? ii - band_ : 0;
    for (std::size_t j = j0; j < ii; ++j) rhs[j] -= at(ii, j) * xi;
  }
}

InteriorOperator::InteriorOperator(GridPtr grid, std::size_t band) : grid_(std::move(grid)) {
  interior_index_.assign(grid_->node_count(), -1);
  const auto& interior = grid_->interior_nodes();
  for (std::size_t k = 0; k < interior.size(); ++k) {
    interior_index_[interior[k]] = static_cast<std::ptrdiff_t>(k);
  }
  matrix_ = BandedCholesky(interior.size(), band);
}

template <class LocalEntry>
InteriorOperator InteriorOperator::assemble(GridPtr grid, LocalEntry&& entry) {
  // Interior numbering follows node numbering, so the band is bounded by the
  // largest node-index distance inside one element.
  std::size_t band = 0;
  for (const Element& e : grid->elements()) {
    for (int a = 0; a < e.node_count; ++a) {
      for (int b = 0; b < e.node_count; ++b) {
        if (grid->is_boundary(e.nodes[a]) || grid->is_boundary(e.nodes[b])) continue;
        const std::size_t d = e.nodes[a] > e.nodes[b] ? e.nodes[a] - e.nodes[b] : e.nodes[b] - e.nodes[a];
        band = std::max(band, d);
      }
    }
  }
  InteriorOperator op(grid, band);
  const auto& elems = grid->elements();
  for (std::size_t k = 0; k < elems.size(); ++k) {
    const Element& e = elems[k];
    for (int a = 0; a < e.node_count; ++a) {
      const std::ptrdiff_t I = op.interior_index_[e.nodes[a]];
      if (I < 0) continue;
      for (int b = 0; b < e.node_count; ++b) {
        const std::ptrdiff_t J = op.interior_index_[e.nodes[b]];
        // lower triangle only; each off-diagonal pair is visited once
        if (J < 0 || J > I) continue;
        op.matrix_.at(static_cast<std::size_t>(I), static_cast<std::size_t>(J)) += entry(k, e, a, b);
      }
    }
  }
  return op;
}

InteriorOperator InteriorOperator::stiffness(GridPtr grid, std::span<const double> element_weights) {
  if (!element_weights.empty() && element_weights.size() != grid->elements().size()) {
    throw InvalidArgument("stiffness: one weight per element required");
  }
  return assemble(grid, [&](std::size_t k, const Element& e, int a, int b) {
    const double w = element_weights.empty() ? 1.0 : element_weights[k];
    return w * e.volume * dot(e.shape_gradients[a], e.shape_gradients[b]);
  });
}

InteriorOperator InteriorOperator::centroid_mass(GridPtr grid) {
  return assemble(grid, [](std::size_t, const Element& e, int, int) {
    return e.volume / (static_cast<double>(e.node_count) * e.node_count);
  });
}

GridFunction InteriorOperator::apply(const GridFunction& x) const {
  const auto& interior = grid_->interior_nodes();
  std::vector<double> xi(interior.size());
  std::vector<double> yi(interior.size());
  for (std::size_t k = 0; k < interior.size(); ++k) xi[k] = x[interior[k]];
  matrix_.multiply(xi, yi);
  GridFunction y(grid_);
  auto& out = y.mutable_values();
  for (std::size_t k = 0; k < interior.size(); ++k) out[interior[k]] = yi[k];
  return y;
}

void InteriorOperator::factorize() {
  if (factor_.factorized()) return;
  factor_ = matrix_;
  factor_.factorize();
}

GridFunction InteriorOperator::solve(const GridFunction& rhs) const {
  if (!factor_.factorized()) throw LinearSolveError("operator not factorized");
  const auto& interior = grid_->interior_nodes();
  std::vector<double> b(interior.size());
  for (std::size_t k = 0; k < interior.size(); ++k) b[k] = rhs[interior[k]];
  factor_.solve_in_place(b);
  GridFunction x(grid_);
  auto& out = x.mutable_values();
  for (std::size_t k = 0; k < interior.size(); ++k) out[interior[k]] = b[k];
  return x;
}

}  // namespace quasivar
