#include "quasivar/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quasivar/error.hpp"

namespace quasivar {
namespace {

// Neumaier compensated sum; keeps the rounding noise of J near one ulp so that
// finite-difference checks can use small steps.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Terms {
  double A = 0.0;
  double B = 0.0;
  double G = 0.0;
};

double differential_along(const CoefficientModel& model, const FieldPair& fp, const FieldPair& dir) {
  if (!(fp.grid() == dir.grid())) throw InvalidArgument("direction lives on a different grid");
  const auto u = fp.u.values();
  const auto v = fp.v.values();
  const auto w = dir.u.values();
  const auto z = dir.v.values();
  CompensatedSum sum;
  for (const Element& e : fp.grid().elements()) {
    const double um = element_value(e, u);
    const double vm = element_value(e, v);
    const Vec2 gu = element_gradient(e, u);
    const Vec2 gv = element_gradient(e, v);
    const double wm = element_value(e, w);
    const double zm = element_value(e, z);
    const double local = dot(model.flux(1, um, gu), element_gradient(e, w)) +
                         model.energy_dt(1, um, gu) * wm +
                         dot(model.flux(2, vm, gv), element_gradient(e, z)) +
                         model.energy_dt(2, vm, gv) * zm - model.Gu(um, vm) * wm -
                         model.Gv(um, vm) * zm;
    sum.add(e.volume * local);
  }
  return sum.value();
}

}  // namespace

std::shared_ptr<const InteriorOperator> make_sobolev_preconditioner(GridPtr grid) {
  auto op = std::make_shared<InteriorOperator>(InteriorOperator::stiffness(std::move(grid)));
  op->factorize();
  return op;
}

EnergyFunctional::EnergyFunctional(std::shared_ptr<const CoefficientModel> model, GridPtr grid)
    : EnergyFunctional(std::move(model), grid, make_sobolev_preconditioner(grid)) {}

EnergyFunctional::EnergyFunctional(std::shared_ptr<const CoefficientModel> model, GridPtr grid,
                                   std::shared_ptr<const InteriorOperator> preconditioner)
    : model_(std::move(model)), grid_(std::move(grid)), stiffness_(std::move(preconditioner)) {
  if (!model_) throw InvalidArgument("EnergyFunctional: null model");
  if (!grid_) throw InvalidArgument("EnergyFunctional: null grid");
  if (!stiffness_ || !(stiffness_->grid() == *grid_)) {
    throw InvalidArgument("EnergyFunctional: preconditioner built for a different grid");
  }
}

void EnergyFunctional::require_grid(const FieldPair& fp) const {
  if (!(fp.grid() == *grid_)) throw InvalidArgument("field pair lives on a different grid");
}

double EnergyFunctional::value(const FieldPair& fp) const {
  require_grid(fp);
  const auto u = fp.u.values();
  const auto v = fp.v.values();
  CompensatedSum sum;
  for (const Element& e : grid_->elements()) {
    const double um = element_value(e, u);
    const double vm = element_value(e, v);
    sum.add(e.volume * model_->energy_density(1, um, element_gradient(e, u)));
    sum.add(e.volume * model_->energy_density(2, vm, element_gradient(e, v)));
    sum.add(-e.volume * model_->G(um, vm));
  }
  const double total = sum.value();
  if (!std::isfinite(total)) throw NonFiniteEnergy("energy evaluation overflowed");
  return total;
}

EnergyReport EnergyFunctional::report(const FieldPair& fp) const {
  require_grid(fp);
  const auto u = fp.u.values();
  const auto v = fp.v.values();
  Terms t;
  for (const Element& e : grid_->elements()) {
    const double um = element_value(e, u);
    const double vm = element_value(e, v);
    t.A += e.volume * model_->energy_density(1, um, element_gradient(e, u));
    t.B += e.volume * model_->energy_density(2, vm, element_gradient(e, v));
    t.G += e.volume * model_->G(um, vm);
  }
  EnergyReport r;
  r.integral_A = t.A;
  r.integral_B = t.B;
  r.integral_G = t.G;
  r.total = t.A + t.B - t.G;
  if (!std::isfinite(r.total)) throw NonFiniteEnergy("energy evaluation overflowed");
  const ComponentExponents ex = model_->exponents();
  r.norm_W_u = norm_W(fp.u, ex.p1);
  r.norm_W_v = norm_W(fp.v, ex.p2);
  r.linf_u = norm_Linf(fp.u);
  r.linf_v = norm_Linf(fp.v);
  r.ell = ell_norm(fp, ex.p1, ex.p2, ex.s1, ex.s2);
  r.residual = residual_norm(fp);
  return r;
}

double EnergyFunctional::apply_differential(const FieldPair& fp, const FieldPair& dir) const {
  require_grid(fp);
  require_grid(dir);
  return differential_along(*model_, fp, dir);
}

FieldPair EnergyFunctional::differential(const FieldPair& fp) const {
  require_grid(fp);
  const auto u = fp.u.values();
  const auto v = fp.v.values();
  FieldPair out(grid_);
  auto& du = out.u.mutable_values();
  auto& dv = out.v.mutable_values();
  for (const Element& e : grid_->elements()) {
    const double um = element_value(e, u);
    const double vm = element_value(e, v);
    const Vec2 gu = element_gradient(e, u);
    const Vec2 gv = element_gradient(e, v);
    const Vec2 fu = model_->flux(1, um, gu);
    const Vec2 fv = model_->flux(2, vm, gv);
    const double share = 1.0 / e.node_count;
    const double su = (model_->energy_dt(1, um, gu) - model_->Gu(um, vm)) * share;
    const double sv = (model_->energy_dt(2, vm, gv) - model_->Gv(um, vm)) * share;
    for (int k = 0; k < e.node_count; ++k) {
      const std::size_t node = e.nodes[k];
      du[node] += e.volume * (dot(fu, e.shape_gradients[k]) + su);
      dv[node] += e.volume * (dot(fv, e.shape_gradients[k]) + sv);
    }
  }
  for (std::size_t k = 0; k < grid_->node_count(); ++k) {
    if (grid_->is_boundary(k)) du[k] = dv[k] = 0.0;
  }
  return out;
}

GradientInfo EnergyFunctional::gradient(const FieldPair& fp) const {
  GradientInfo g{differential(fp), FieldPair(grid_), 0.0};
  g.representative = FieldPair(stiffness_->solve(g.dual.u), stiffness_->solve(g.dual.v));
  g.residual = std::sqrt(std::max(0.0, nodal_dot(g.dual, g.representative)));
  return g;
}

FieldPair EnergyFunctional::gradient_representative(const FieldPair& fp) const {
  return gradient(fp).representative;
}

double EnergyFunctional::residual_norm(const FieldPair& fp) const { return gradient(fp).residual; }

double EnergyFunctional::sobolev_inner(const FieldPair& a, const FieldPair& b) const {
  return nodal_dot(stiffness_->apply(a.u), b.u) + nodal_dot(stiffness_->apply(a.v), b.v);
}

double smooth_step_limit(const FieldPair& x, const FieldPair& d) {
  double limit = std::numeric_limits<double>::infinity();
  auto scan = [&](const GridFunction& a, const GridFunction& b) {
    const auto av = a.values();
    const auto bv = b.values();
    for (const Element& e : a.grid().elements()) {
      const double t = std::abs(element_value(e, av));
      const double dt = std::abs(element_value(e, bv));
      if (dt > 0.0) limit = std::min(limit, t / dt);
      const Vec2 g = element_gradient(e, av);
      const Vec2 dg = element_gradient(e, bv);
      const double ndg = std::sqrt(dot(dg, dg));
      if (ndg > 0.0) limit = std::min(limit, std::sqrt(dot(g, g)) / ndg);
    }
  };
  scan(x.u, d.u);
  scan(x.v, d.v);
  return limit;
}

SlopeTest finite_difference_slope(const EnergyFunctional& J, const FieldPair& x, const FieldPair& d,
                                  std::span<const double> steps) {
  SlopeTest out;
  out.derivative = J.apply_differential(x, d);
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> lx, ly;
  for (const double h : steps) {
    FieldPair plus = x;
    plus.axpy(h, d);
    FieldPair minus = x;
    minus.axpy(-h, d);
    const double jp = J.value(plus);
    const double jm = J.value(minus);
    const double err = std::abs((jp - jm) / (2.0 * h) - out.derivative);
    // Cancellation in jp - jm leaves about eps * |J| / h of noise.
    const double floor = 4.0 * eps * std::max({std::abs(jp), std::abs(jm), 1.0}) / h;
    const bool use = err > floor;
    out.steps.push_back(h);
    out.errors.push_back(err);
    out.used.push_back(use);
    if (use) {
      lx.push_back(std::log(h));
      ly.push_back(std::log(err));
    }
  }
  if (lx.size() < 3) {
    out.slope = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

EnergyReport J_eval(const FieldPair& fp, std::shared_ptr<const CoefficientModel> model) {
  return EnergyFunctional(std::move(model), fp.grid_ptr()).report(fp);
}

double dJ_apply(const FieldPair& fp, const FieldPair& direction,
                std::shared_ptr<const CoefficientModel> model) {
  if (!model) throw InvalidArgument("dJ_apply: null model");
  return differential_along(*model, fp, direction);
}

FieldPair gradient_representative(const FieldPair& fp, std::shared_ptr<const CoefficientModel> model) {
  return EnergyFunctional(std::move(model), fp.grid_ptr()).gradient_representative(fp);
}

}  // namespace quasivar
