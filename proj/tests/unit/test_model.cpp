#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "quasivar/model.hpp"

using namespace quasivar;

namespace {

ExponentConfig cfg_a() {
  ExponentConfig c;
  c.N = 2;
  c.p1 = c.p2 = 1.5;
  c.s1 = c.s2 = 1.0;
  c.q1 = c.q2 = 8.0;
  c.gamma1 = c.gamma2 = 4.0;
  c.theta1 = c.theta2 = 0.125;
  c.c_star = 1.0;
  return c;
}

ExponentConfig cfg_b() {
  ExponentConfig c;
  c.N = 2;
  c.p1 = c.p2 = 2.0;
  c.s1 = c.s2 = 0.0;
  c.q1 = c.q2 = 4.0;
  c.theta1 = c.theta2 = 0.25;
  return c;
}

// Central-difference slope of f'(x) error against a reference derivative.
template <class F>
double fd_error(F&& f, double x, double h, double df) {
  return std::abs((f(x + h) - f(x - h)) / (2 * h) - df);
}

}  // namespace

TEST(ModelFunctions, VanishesAtOrigin) {
  const ModelFunctions m(cfg_a());
  EXPECT_EQ(m.A_eval(0.0, {0.0, 0.0}), 0.0);
  EXPECT_EQ(m.a_eval(0.0, {0.0, 0.0})[0], 0.0);
  EXPECT_EQ(m.At_eval(0.0, {0.0, 0.0}), 0.0);
  EXPECT_EQ(m.G_eval(0.0, 0.0), 0.0);
  EXPECT_EQ(m.Gu_eval(0.0, 0.0), 0.0);
  EXPECT_EQ(m.Gv_eval(0.0, 0.0), 0.0);
}

TEST(ModelFunctions, ClosedFormValues) {
  ExponentConfig c = cfg_b();
  c.s1 = 1.0;
  const ModelFunctions m(c);
  EXPECT_DOUBLE_EQ(m.A_eval(2.0, {3.0, 4.0}), 62.5);
  ExponentConfig g = cfg_b();
  g.gamma1 = g.gamma2 = 2.0;
  g.c_star = 1.0;
  EXPECT_DOUBLE_EQ(ModelFunctions(g).G_eval(1.0, 2.0), 8.25);
  // With s = 0 the weight 1 + |t|^0 is 2.
  EXPECT_DOUBLE_EQ(ModelFunctions(cfg_b()).A_eval(5.0, {1.0, 0.0}), 1.0);
}

TEST(ModelFunctions, FluxIsHomogeneousWithoutRegularization) {
  const ModelFunctions m(cfg_a(), 0.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const double t = u(rng);
    const Vec2 xi{u(rng), u(rng)};
    EXPECT_NEAR(dot(m.a_eval(t, xi), xi), 1.5 * m.A_eval(t, xi), 1e-12 * (1 + m.A_eval(t, xi)));
  }
}

TEST(ModelFunctions, DerivativesMatchFiniteDifferences) {
  for (const ExponentConfig& cfg : {cfg_a(), cfg_b()}) {
    const ModelFunctions m(cfg, 0.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.3, 2.0);
    for (int k = 0; k < 50; ++k) {
      const double t = u(rng), x = u(rng), y = -u(rng);
      const double gv = u(rng);
      const double h1 = 1e-3, h2 = 5e-4;
      // Second-order decay of the central-difference error.
      auto check = [&](auto&& f, double at, double df) {
        const double e1 = fd_error(f, at, h1, df);
        const double e2 = fd_error(f, at, h2, df);
        if (e1 > 1e-11) EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
      };
      check([&](double s) { return m.A_eval(s, {x, y}); }, t, m.At_eval(t, {x, y}));
      check([&](double s) { return m.A_eval(t, {s, y}); }, x, m.a_eval(t, {x, y})[0]);
      check([&](double s) { return m.B_eval(t, {x, s}); }, y, m.b_eval(t, {x, y})[1]);
      check([&](double s) { return m.G_eval(s, gv); }, t, m.Gu_eval(t, gv));
      check([&](double s) { return m.G_eval(t, s); }, gv, m.Gv_eval(t, gv));
    }
  }
}

TEST(ModelFunctions, RegularizedFluxStaysFiniteAtZeroGradient) {
  const ModelFunctions m(cfg_a(), 1e-8);
  const Vec2 a = m.a_eval(0.5, {0.0, 0.0});
  EXPECT_EQ(a[0], 0.0);
  EXPECT_EQ(a[1], 0.0);
  const Vec2 tiny = m.a_eval(0.5, {1e-12, 0.0});
  EXPECT_TRUE(std::isfinite(tiny[0]));
}

TEST(StructuralSampling, CfgAHypothesesHold) {
  SamplerParams params;
  params.samples = 20000;
  const StructuralSampleReport rep = sample_structural_hypotheses(ModelFunctions(cfg_a(), 0.0), params);
  for (const auto& m : rep.margins) EXPECT_TRUE(m.satisfied) << m.id << " min " << m.min_relative;
  EXPECT_LE(rep.find("h3[1]")->max_abs_relative, 1e-12);
  EXPECT_EQ(rep.find("h8[1]")->max_abs_relative, 0.0);
  EXPECT_EQ(rep.find("g6")->max_abs_relative, 0.0);
  EXPECT_GE(rep.find("g3")->min_margin, -1e-9);
  EXPECT_TRUE(rep.small_state.monotone);
  EXPECT_TRUE(rep.large_state.satisfied);
  EXPECT_NEAR(rep.constants.mu2_1, 5.0 / 12.0, 1e-15);
}

TEST(StructuralSampling, SmallStateBoundWithEigenvalues) {
  SamplerParams params;
  params.samples = 1000;
  params.first_eigenvalues = std::array<double, 2>{19.7, 19.7};
  const StructuralSampleReport rep = sample_structural_hypotheses(ModelFunctions(cfg_b(), 0.0), params);
  EXPECT_TRUE(rep.small_state.satisfied);
  EXPECT_LT(rep.small_state.ratios.back(), rep.small_state.bound);
}

TEST(StructuralSampling, DetectsBrokenAmbrosettiRabinowitzCondition) {
  // theta below 1/q: theta (G_u u) - G < 0 for the pure power.
  ExponentConfig c = cfg_b();
  c.theta1 = c.theta2 = 0.2;
  SamplerParams params;
  params.samples = 2000;
  const StructuralSampleReport rep = sample_structural_hypotheses(ModelFunctions(c, 0.0), params);
  EXPECT_FALSE(rep.find("g3")->satisfied);
}

TEST(IntegrandSmoothness, Classification) {
  EXPECT_TRUE(integrands_c3(cfg_b()));
  EXPECT_FALSE(integrands_c3(cfg_a()));
}
