#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "quasivar/energy.hpp"
#include "quasivar/error.hpp"

using namespace quasivar;

namespace {

constexpr double kPi = std::numbers::pi;

ExponentConfig cfg_a() {
  ExponentConfig c;
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
  c.p1 = c.p2 = 2.0;
  c.q1 = c.q2 = 4.0;
  return c;
}

EnergyFunctional make_J(const ExponentConfig& cfg, int dim, int n) {
  return EnergyFunctional(std::make_shared<ModelFunctions>(cfg, 0.0), Grid::make(dim, n));
}

FieldPair random_pair(const GridPtr& g, std::uint64_t seed, double amp = 2.0) {
  return FieldPair(random_sine_field(g, seed, 4, amp), random_sine_field(g, seed + 1000, 4, amp));
}

std::vector<double> halving_steps(double h0, int count) {
  std::vector<double> s;
  for (int i = 0; i < count; ++i) s.push_back(std::ldexp(h0, -i));
  return s;
}

}  // namespace

TEST(Energy, ZeroFieldHasZeroEnergyAndDifferential) {
  const EnergyFunctional J = make_J(cfg_a(), 2, 17);
  const FieldPair zero(J.grid_ptr());
  EXPECT_EQ(J.value(zero), 0.0);
  const FieldPair d = random_pair(J.grid_ptr(), 3);
  EXPECT_LE(std::abs(J.apply_differential(zero, d)), 1e-14);
  EXPECT_EQ(J.residual_norm(zero), 0.0);
}

TEST(Energy, ProductOfSinesIntegrals) {
  const EnergyFunctional J = make_J(cfg_b(), 2, 129);
  FieldPair fp(J.grid_ptr());
  fp.u = GridFunction::interpolate(J.grid_ptr(),
                                   [](const Vec2& x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]); });
  const EnergyReport r = J.report(fp);
  EXPECT_NEAR(r.integral_A, kPi * kPi / 2.0, 0.01 * kPi * kPi / 2.0);
  EXPECT_NEAR(r.integral_G, 9.0 / 256.0, 0.01 * 9.0 / 256.0);
  EXPECT_EQ(r.integral_B, 0.0);
  EXPECT_NEAR(r.total, r.integral_A + r.integral_B - r.integral_G, 1e-14);
  EXPECT_NEAR(r.linf_u, 1.0, 1e-12);
}

TEST(Energy, QuadraticPartScalesHomogeneously) {
  const EnergyFunctional J = make_J(cfg_b(), 2, 33);
  const FieldPair fp = random_pair(J.grid_ptr(), 5);
  const EnergyReport r1 = J.report(fp);
  for (double tau : {0.5, 2.0, 3.0}) {
    const EnergyReport rt = J.report(tau * fp);
    EXPECT_NEAR(rt.integral_A, tau * tau * r1.integral_A, 1e-12 * rt.integral_A);
    EXPECT_NEAR(rt.integral_G, std::pow(tau, 4) * r1.integral_G, 1e-12 * rt.integral_G);
  }
}

TEST(Energy, DifferentialIsLinearInDirection) {
  for (const auto& cfg : {cfg_a(), cfg_b()}) {
    const EnergyFunctional J = make_J(cfg, 2, 33);
    const FieldPair x = random_pair(J.grid_ptr(), 11);
    const FieldPair d1 = random_pair(J.grid_ptr(), 12);
    const FieldPair d2 = random_pair(J.grid_ptr(), 13);
    const double lhs = J.apply_differential(x, 2.0 * d1 + d2);
    const double rhs = 2.0 * J.apply_differential(x, d1) + J.apply_differential(x, d2);
    EXPECT_NEAR(lhs, rhs, 1e-12 * (std::abs(lhs) + 1.0));
  }
}

TEST(Energy, AssembledDifferentialMatchesDirectEvaluation) {
  const EnergyFunctional J = make_J(cfg_a(), 2, 33);
  const FieldPair x = random_pair(J.grid_ptr(), 21);
  const FieldPair d = random_pair(J.grid_ptr(), 22);
  const double direct = J.apply_differential(x, d);
  const double assembled = nodal_dot(J.differential(x), d);
  EXPECT_NEAR(assembled, direct, 1e-11 * (std::abs(direct) + 1.0));
}

TEST(Energy, RieszRepresentativeReproducesDifferential) {
  const EnergyFunctional J = make_J(cfg_a(), 2, 33);
  const FieldPair x = random_pair(J.grid_ptr(), 31);
  const GradientInfo g = J.gradient(x);
  for (std::uint64_t s = 0; s < 4; ++s) {
    const FieldPair d = random_pair(J.grid_ptr(), 40 + s);
    const double dj = J.apply_differential(x, d);
    EXPECT_NEAR(J.sobolev_inner(g.representative, d), dj, 1e-8 * (std::abs(dj) + 1.0));
  }
  EXPECT_NEAR(g.residual, std::sqrt(J.sobolev_inner(g.representative, g.representative)), 1e-10);
}

TEST(Energy, NegativeRepresentativeIsADescentDirection) {
  const EnergyFunctional J = make_J(cfg_b(), 1, 65);
  const FieldPair x = random_pair(J.grid_ptr(), 51, 5.0);
  const FieldPair r = J.gradient_representative(x);
  EXPECT_LT(J.value(x - 1e-4 * r), J.value(x));
}

TEST(Energy, CentralDifferencesConvergeAtSecondOrder) {
  for (int dim : {1, 2}) {
    for (const auto& cfg : {cfg_a(), cfg_b()}) {
      const EnergyFunctional J = make_J(cfg, dim, dim == 1 ? 129 : 33);
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const FieldPair x = integrands_c3(cfg)
                                ? random_pair(J.grid_ptr(), seed)
                                : FieldPair(random_positive_field(J.grid_ptr(), seed, 4, 2.0),
                                            random_positive_field(J.grid_ptr(), seed + 1000, 4, 2.0));
        const FieldPair d = random_pair(J.grid_ptr(), seed + 100);
        double h0 = 1e-2;
        if (!integrands_c3(cfg)) h0 = std::min(h0, 0.5 * smooth_step_limit(x, d));
        const auto steps = halving_steps(h0, 12);
        const SlopeTest st = finite_difference_slope(J, x, d, steps);
        ASSERT_TRUE(std::isfinite(st.slope)) << "dim " << dim << " seed " << seed;
        EXPECT_NEAR(st.slope, 2.0, 0.1) << "dim " << dim << " seed " << seed;
      }
    }
  }
}

TEST(Energy, OverflowRaisesNonFiniteEnergy) {
  const EnergyFunctional J = make_J(cfg_a(), 1, 17);
  const FieldPair x = random_pair(J.grid_ptr(), 7, 1e300);
  EXPECT_THROW(J.value(x), NonFiniteEnergy);
}

TEST(Energy, RejectsFieldsOnAnotherGrid) {
  const EnergyFunctional J = make_J(cfg_b(), 1, 17);
  const FieldPair other(Grid::make(1, 33));
  EXPECT_THROW(J.value(other), InvalidArgument);
}

TEST(Energy, FreeFunctionsAgreeWithClass) {
  auto model = std::make_shared<ModelFunctions>(cfg_b(), 0.0);
  const EnergyFunctional J(model, Grid::make(2, 17));
  const FieldPair x = random_pair(J.grid_ptr(), 61);
  const FieldPair d = random_pair(J.grid_ptr(), 62);
  EXPECT_DOUBLE_EQ(J_eval(x, model).total, J.value(x));
  EXPECT_DOUBLE_EQ(dJ_apply(x, d, model), J.apply_differential(x, d));
}
