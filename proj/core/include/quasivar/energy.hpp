#pragma once

#include <memory>
#include <span>
#include <vector>

#include "quasivar/banded_cholesky.hpp"
#include "quasivar/grid.hpp"
#include "quasivar/model.hpp"

namespace quasivar {

struct EnergyReport {
  double total = 0.0;
  double integral_A = 0.0;
  double integral_B = 0.0;
  double integral_G = 0.0;
  double norm_W_u = 0.0;
  double norm_W_v = 0.0;
  double linf_u = 0.0;
  double linf_v = 0.0;
  double ell = 0.0;
  /// sqrt(dJ[r]) with r the Riesz representative of dJ in the discrete
  /// inner product <w, z> = integral of grad w . grad z. This is a surrogate
  /// for the dual norm in X'.
  double residual = 0.0;
};

struct GradientInfo {
  /// Nodal values dJ(fp)[phi_k] for every interior basis function phi_k.
  FieldPair dual;
  FieldPair representative;
  double residual = 0.0;
};

/// Discrete energy
///   J(u, v) = int A(u, grad u) + int B(v, grad v) - int G(u, v)
/// on linear elements with one-point centroid quadrature.
class EnergyFunctional {
 public:
  EnergyFunctional(std::shared_ptr<const CoefficientModel> model, GridPtr grid);
  /// Shares an already factorized stiffness operator of the same grid.
  EnergyFunctional(std::shared_ptr<const CoefficientModel> model, GridPtr grid,
                   std::shared_ptr<const InteriorOperator> preconditioner);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const CoefficientModel& model() const { return *model_; }
  const std::shared_ptr<const CoefficientModel>& model_ptr() const { return model_; }
  const std::shared_ptr<const InteriorOperator>& preconditioner() const { return stiffness_; }

  /// Total energy only. Throws NonFiniteEnergy on overflow.
  double value(const FieldPair& fp) const;
  EnergyReport report(const FieldPair& fp) const;

  /// dJ(fp)[dir] evaluated directly from the six integrals.
  double apply_differential(const FieldPair& fp, const FieldPair& dir) const;
  /// Assembled dual vector of dJ(fp).
  FieldPair differential(const FieldPair& fp) const;
  GradientInfo gradient(const FieldPair& fp) const;
  FieldPair gradient_representative(const FieldPair& fp) const;
  double residual_norm(const FieldPair& fp) const;

  /// <w, z> = int grad w . grad z summed over both components.
  double sobolev_inner(const FieldPair& a, const FieldPair& b) const;

 private:
  void require_grid(const FieldPair& fp) const;

  std::shared_ptr<const CoefficientModel> model_;
  GridPtr grid_;
  std::shared_ptr<const InteriorOperator> stiffness_;
};

/// Factorized Dirichlet stiffness matrix of the grid.
std::shared_ptr<const InteriorOperator> make_sobolev_preconditioner(GridPtr grid);

struct SlopeTest {
  double derivative = 0.0;  // dJ(x)[d]
  std::vector<double> steps;
  /// |(J(x+hd) - J(x-hd))/(2h) - dJ(x)[d]| per step.
  std::vector<double> errors;
  /// False where the error is at the roundoff floor and excluded from the fit.
  std::vector<bool> used;
  /// Least-squares slope of log(error) against log(h); NaN with fewer than 3 points.
  double slope = 0.0;
};

/// Largest h for which no centroid value and no element gradient of x + t d,
/// |t| <= h, can reach zero. Below it the power-type integrands are smooth
/// along the segment and the central-difference error is O(h^2).
double smooth_step_limit(const FieldPair& x, const FieldPair& d);

/// Central-difference consistency test of dJ against J along direction d.
SlopeTest finite_difference_slope(const EnergyFunctional& J, const FieldPair& x, const FieldPair& d,
                                  std::span<const double> steps);

EnergyReport J_eval(const FieldPair& fp, std::shared_ptr<const CoefficientModel> model);
double dJ_apply(const FieldPair& fp, const FieldPair& direction,
                std::shared_ptr<const CoefficientModel> model);
FieldPair gradient_representative(const FieldPair& fp, std::shared_ptr<const CoefficientModel> model);

}  // namespace quasivar
