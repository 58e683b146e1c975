#pragma once

#include <cstddef>

#include "quasivar/grid.hpp"

namespace quasivar {

/// First Dirichlet eigenpair of -Delta_p on the grid.
struct EigenPair {
  double lambda1 = 0.0;
  GridFunction phi1;  // |phi1|_p = 1, positive in the interior
  double p = 2.0;
  std::size_t iterations = 0;
  /// Sobolev-preconditioned norm of the Rayleigh-quotient differential.
  double residual = 0.0;
  bool converged = false;
};

struct EigenOptions {
  /// Stop when the relative change of the quotient drops below tol.
  double tol = 1e-10;
  std::size_t max_iter = 100000;
  double epsilon_reg = 1e-8;
};

/// int |grad y|^p / int |y|^p. Throws InvalidArgument for the zero field.
double rayleigh_quotient(const GridFunction& y, double p);

/// p = 2: inverse power iteration with the stiffness and centroid-mass
/// matrices. p != 2: Sobolev-gradient descent on the Rayleigh quotient with
/// Armijo backtracking. Both start from the positive product-of-sines bubble.
/// When max_iter is reached the best iterate is returned with converged = false.
EigenPair first_eigenpair(double p, GridPtr grid, const EigenOptions& options = {});

}  // namespace quasivar
