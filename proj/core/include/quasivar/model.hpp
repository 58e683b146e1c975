#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quasivar/exponents.hpp"
#include "quasivar/grid.hpp"

namespace quasivar {

struct ComponentExponents {
  double p1 = 2.0;
  double p2 = 2.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Pointwise coefficient functions of the system. Component 1 is the
/// (A, a, A_t) family acting on u, component 2 is (B, b, B_t) acting on v.
///
/// This is the extension point for user-supplied models: implementations
/// must be deterministic and return finite values on finite inputs.
class CoefficientModel {
 public:
  virtual ~CoefficientModel() = default;

  virtual double energy_density(int component, double t, const Vec2& xi) const = 0;
  /// Gradient of energy_density with respect to xi.
  virtual Vec2 flux(int component, double t, const Vec2& xi) const = 0;
  /// Derivative of energy_density with respect to t.
  virtual double energy_dt(int component, double t, const Vec2& xi) const = 0;

  virtual double G(double u, double v) const = 0;
  virtual double Gu(double u, double v) const = 0;
  virtual double Gv(double u, double v) const = 0;

  /// Exponents that define the W- and ell-norms.
  virtual ComponentExponents exponents() const = 0;

  double A_eval(double t, const Vec2& xi) const { return energy_density(1, t, xi); }
  Vec2 a_eval(double t, const Vec2& xi) const { return flux(1, t, xi); }
  double At_eval(double t, const Vec2& xi) const { return energy_dt(1, t, xi); }
  double B_eval(double t, const Vec2& xi) const { return energy_density(2, t, xi); }
  Vec2 b_eval(double t, const Vec2& xi) const { return flux(2, t, xi); }
  double Bt_eval(double t, const Vec2& xi) const { return energy_dt(2, t, xi); }
  double G_eval(double u, double v) const { return G(u, v); }
  double Gu_eval(double u, double v) const { return Gu(u, v); }
  double Gv_eval(double u, double v) const { return Gv(u, v); }
};

/// Closed-form model
///   A = (1/p1)(1+|t|^{s1 p1})|xi|^{p1},  B likewise with index 2,
///   G = |u|^{q1}/q1 + |v|^{q2}/q2 + c*|u|^{gamma1}|v|^{gamma2}.
///
/// For p < 2 and epsilon_reg > 0 the flux uses (|xi|^2+eps^2)^{(p-2)/2} in
/// place of |xi|^{p-2}. Energies are never regularized.
class ModelFunctions final : public CoefficientModel {
 public:
  explicit ModelFunctions(ExponentConfig cfg, double epsilon_reg = 1e-8);

  const ExponentConfig& config() const { return cfg_; }
  double epsilon_reg() const { return epsilon_; }

  double energy_density(int component, double t, const Vec2& xi) const override;
  Vec2 flux(int component, double t, const Vec2& xi) const override;
  double energy_dt(int component, double t, const Vec2& xi) const override;
  double G(double u, double v) const override;
  double Gu(double u, double v) const override;
  double Gv(double u, double v) const override;
  ComponentExponents exponents() const override;

 private:
  ExponentConfig cfg_;
  double epsilon_;
};

/// User-supplied evaluators behind the CoefficientModel contract.
struct PluginFunctions final : CoefficientModel {
  std::function<double(double, const Vec2&)> A, B, At, Bt;
  std::function<Vec2(double, const Vec2&)> a, b;
  std::function<double(double, double)> g, gu, gv;
  ComponentExponents exps;

  double energy_density(int c, double t, const Vec2& xi) const override {
    return c == 1 ? A(t, xi) : B(t, xi);
  }
  Vec2 flux(int c, double t, const Vec2& xi) const override { return c == 1 ? a(t, xi) : b(t, xi); }
  double energy_dt(int c, double t, const Vec2& xi) const override {
    return c == 1 ? At(t, xi) : Bt(t, xi);
  }
  double G(double u, double v) const override { return g(u, v); }
  double Gu(double u, double v) const override { return gu(u, v); }
  double Gv(double u, double v) const override { return gv(u, v); }
  ComponentExponents exponents() const override { return exps; }
};

struct SamplerParams {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double t_max = 8.0;
  double xi_max = 8.0;
  /// Annulus |(u,v)| in [uv_min_radius, uv_max_radius] for the AR check.
  double uv_min_radius = 1.0;
  double uv_max_radius = 8.0;
  /// Geometric radii 2^{-k} (small-state trend) and 2^{k} (large-state trend).
  int trend_levels = 12;
  int angles_per_level = 720;
  /// Relative slack granted to inequalities that hold with equality in exact
  /// arithmetic.
  double relative_tolerance = 1e-12;
  /// First eigenvalues of -Delta_{p1}, -Delta_{p2}; enables the small-state
  /// threshold alpha2 * min(lambda).
  std::optional<std::array<double, 2>> first_eigenvalues;
};

struct SampledMargin {
  std::string id;
  double min_margin = 0.0;
  /// Largest |margin| / scale over the samples; scale is the magnitude of the
  /// terms entering the inequality.
  double max_abs_relative = 0.0;
  double min_relative = 0.0;
  /// (t, xi_x, xi_y) or (u, v, 0) of the sample attaining min_relative.
  std::array<double, 3> argmin{};
  std::size_t samples = 0;
  bool satisfied = false;
};

struct RatioTrend {
  std::string id;
  std::vector<double> radii;
  std::vector<double> ratios;
  bool monotone = false;
  /// Limit bound the ratios are compared against (NaN when unavailable).
  double bound = 0.0;
  bool satisfied = false;
};

struct StructuralSampleReport {
  std::vector<SampledMargin> margins;
  RatioTrend small_state;  // G/(|u|^{p1}+|v|^{p2}) as |(u,v)| -> 0
  RatioTrend large_state;  // G/(|u|^{1/theta1}+|v|^{1/theta2}) as |(u,v)| -> inf
  double alpha2 = 0.0;
  ModelConstants constants;

  const SampledMargin* find(const std::string& id) const;
  bool all_satisfied() const;
};

StructuralSampleReport sample_structural_hypotheses(const CoefficientModel& model,
                                                    const ExponentConfig& cfg,
                                                    const SamplerParams& params);
StructuralSampleReport sample_structural_hypotheses(const ModelFunctions& mf,
                                                    const SamplerParams& params);

/// True when every power |x|^a entering A, B and G has a continuous third
/// derivative (a = 0, a an even integer, or a > 3). Finite-difference checks
/// need this to see a clean second-order error without step restrictions.
bool integrands_c3(const ExponentConfig& cfg);

}  // namespace quasivar
