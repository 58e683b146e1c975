#include "quasivar/eigenpair.hpp"

#include <cmath>
#include <numbers>

#include "quasivar/banded_cholesky.hpp"
#include "quasivar/error.hpp"

namespace quasivar {
namespace {

struct QuotientParts {
  double numerator = 0.0;
  double denominator = 0.0;
};

QuotientParts quotient_parts(const GridFunction& y, double p) {
  QuotientParts q;
  for (const Element& e : y.grid().elements()) {
    const Vec2 g = element_gradient(e, y.values());
    q.numerator += e.volume * std::pow(std::sqrt(dot(g, g)), p);
    q.denominator += e.volume * std::pow(std::abs(element_value(e, y.values())), p);
  }
  return q;
}

// Nodal dual vector of dR(y) = p (dN - R dD) / D.
GridFunction quotient_differential(const GridFunction& y, double p, double eps, double R, double D) {
  GridFunction out(y.grid_ptr());
  auto& d = out.mutable_values();
  const Grid& grid = y.grid();
  for (const Element& e : grid.elements()) {
    const Vec2 g = element_gradient(e, y.values());
    const double r2 = dot(g, g);
    double w;
    if (p == 2.0) {
      w = 1.0;
    } else if (p < 2.0 && eps > 0.0) {
      w = std::pow(r2 + eps * eps, 0.5 * (p - 2.0));
    } else {
      w = r2 == 0.0 ? 0.0 : std::pow(r2, 0.5 * (p - 2.0));
    }
    const double ym = element_value(e, y.values());
    const double ay = std::abs(ym);
    const double mass = ay == 0.0 ? 0.0 : std::pow(ay, p - 2.0) * ym / e.node_count;
    for (int k = 0; k < e.node_count; ++k) {
      d[e.nodes[k]] += e.volume * p * (w * dot(g, e.shape_gradients[k]) - R * mass) / D;
    }
  }
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    if (grid.is_boundary(k)) d[k] = 0.0;
  }
  return out;
}

void normalize_positive(GridFunction& y, double p) {
  double sum = 0.0;
  for (double x : y.values()) sum += x;
  const double nrm = norm_Lp(y, p);
  y *= (sum < 0.0 ? -1.0 : 1.0) / nrm;
}

GridFunction bubble(const GridPtr& grid) {
  return GridFunction::interpolate(grid, [&](const Vec2& x) {
    double b = std::sin(std::numbers::pi * x[0]);
    if (grid->dimension() == 2) b *= std::sin(std::numbers::pi * x[1]);
    return b;
  });
}

EigenPair inverse_iteration(GridPtr grid, const EigenOptions& opt) {
  InteriorOperator K = InteriorOperator::stiffness(grid);
  K.factorize();
  const InteriorOperator M = InteriorOperator::centroid_mass(grid);

  EigenPair out{0.0, bubble(grid), 2.0, 0, 0.0, false};
  normalize_positive(out.phi1, 2.0);
  double lambda = rayleigh_quotient(out.phi1, 2.0);
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    GridFunction next = K.solve(M.apply(out.phi1));
    normalize_positive(next, 2.0);
    const double next_lambda = rayleigh_quotient(next, 2.0);
    const double change = std::abs(next_lambda - lambda);
    out.phi1 = std::move(next);
    lambda = next_lambda;
    out.iterations = it;
    if (change < opt.tol * lambda) {
      out.converged = true;
      break;
    }
  }
  GridFunction res = K.apply(out.phi1);
  res.axpy(-lambda, M.apply(out.phi1));
  out.residual = std::sqrt(std::max(0.0, nodal_dot(res, K.solve(res))));
  out.lambda1 = rayleigh_quotient(out.phi1, 2.0);
  return out;
}

EigenPair sobolev_descent(double p, GridPtr grid, const EigenOptions& opt) {
  InteriorOperator K = InteriorOperator::stiffness(grid);
  K.factorize();
  constexpr double kArmijo = 1e-4;

  EigenPair out{0.0, bubble(grid), p, 0, 0.0, false};
  normalize_positive(out.phi1, p);
  double R = rayleigh_quotient(out.phi1, p);
  double step = 1.0;
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    const QuotientParts parts = quotient_parts(out.phi1, p);
    const GridFunction dual = quotient_differential(out.phi1, p, opt.epsilon_reg, R, parts.denominator);
    const GridFunction grad = K.solve(dual);
    const double slope = nodal_dot(dual, grad);
    out.residual = std::sqrt(std::max(0.0, slope));
    out.iterations = it;
    if (slope <= 0.0) {
      out.converged = true;
      break;
    }
    step = std::min(2.0 * step, 1e6);
    GridFunction trial = out.phi1;
    double trial_R = R;
    for (;;) {
      trial = out.phi1;
      trial.axpy(-step, grad);
      trial_R = quotient_parts(trial, p).denominator > 0.0 ? rayleigh_quotient(trial, p) : R + 1.0;
      if (trial_R <= R - kArmijo * step * slope) break;
      step *= 0.5;
      if (step < 1e-300) break;
    }
    if (!(trial_R < R)) {
      // no further decrease representable in floating point
      out.converged = true;
      break;
    }
    normalize_positive(trial, p);
    const double change = R - trial_R;
    out.phi1 = std::move(trial);
    R = trial_R;
    if (change < opt.tol * R) {
      out.converged = true;
      break;
    }
  }
  out.lambda1 = rayleigh_quotient(out.phi1, p);
  return out;
}

}  // namespace

double rayleigh_quotient(const GridFunction& y, double p) {
  if (!(p > 1.0)) throw InvalidArgument("rayleigh_quotient: p must be > 1");
  const QuotientParts q = quotient_parts(y, p);
  if (!(q.denominator > 0.0)) throw InvalidArgument("rayleigh_quotient: zero field");
  return q.numerator / q.denominator;
}

EigenPair first_eigenpair(double p, GridPtr grid, const EigenOptions& options) {
  if (!(p > 1.0)) throw InvalidArgument("first_eigenpair: p must be > 1");
  if (!grid) throw InvalidArgument("first_eigenpair: null grid");
  return p == 2.0 ? inverse_iteration(std::move(grid), options)
                  : sobolev_descent(p, std::move(grid), options);
}

}  // namespace quasivar
