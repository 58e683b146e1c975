#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "quasivar/error.hpp"
#include "quasivar/mpsolver.hpp"
#include "shooting.hpp"

using namespace quasivar;

namespace {

ExponentConfig cfg_b() {
  ExponentConfig c;
  c.p1 = c.p2 = 2.0;
  c.q1 = c.q2 = 4.0;
  return c;
}

EnergyFunctional make_J(int dim, int n) {
  return EnergyFunctional(std::make_shared<ModelFunctions>(cfg_b()), Grid::make(dim, n));
}

struct OneDimensionalGroundState : ::testing::Test {
  static void SetUpTestSuite() {
    J = new EnergyFunctional(make_J(1, 257));
    const EigenPair e = first_eigenpair(2.0, J->grid_ptr());
    const Endpoint ep = find_endpoint(*J, e);
    candidate = new CriticalPointCandidate(mountain_pass_search(*J, ep.field, MountainPassParams{}));
  }
  static void TearDownTestSuite() {
    delete candidate;
    delete J;
  }
  static EnergyFunctional* J;
  static CriticalPointCandidate* candidate;
};

EnergyFunctional* OneDimensionalGroundState::J = nullptr;
CriticalPointCandidate* OneDimensionalGroundState::candidate = nullptr;

}  // namespace

TEST(Endpoint, ReachesNegativeEnergyWithMonotoneTail) {
  const EnergyFunctional J = make_J(2, 33);
  const EigenPair e = first_eigenpair(2.0, J.grid_ptr());
  const Endpoint ep = find_endpoint(J, e);
  EXPECT_LT(ep.energy, -1.0);
  EXPECT_NEAR(J.value(ep.field), ep.energy, 1e-12 * std::abs(ep.energy));
  EXPECT_EQ(norm_Linf(ep.field.v), 0.0);
  FieldPair twice = ep.field;
  twice *= 2.0;
  EXPECT_LT(J.value(twice), ep.energy);
  // The previous doubling was still above the threshold.
  if (ep.doublings > 0) EXPECT_GE(J.value(0.5 * ep.field), -1.0);
}

TEST(Endpoint, MissingNonlinearityThrows) {
  auto plugin = std::make_shared<PluginFunctions>();
  plugin->A = plugin->B = [](double, const Vec2& xi) { return 0.5 * dot(xi, xi); };
  plugin->At = plugin->Bt = [](double, const Vec2&) { return 0.0; };
  plugin->a = plugin->b = [](double, const Vec2& xi) { return xi; };
  plugin->g = plugin->gu = plugin->gv = [](double, double) { return 0.0; };
  plugin->exps = ComponentExponents{};
  const EnergyFunctional J(plugin, Grid::make(1, 17));
  const EigenPair e = first_eigenpair(2.0, J.grid_ptr());
  EXPECT_THROW(find_endpoint(J, e), NoNegativeEnergy);
}

TEST(Geometry, CertificateOnSmallSphere) {
  const EnergyFunctional J = make_J(2, 33);
  const EigenPair e = first_eigenpair(2.0, J.grid_ptr());
  CertifyOptions opt;
  opt.n_samples = 64;
  const GeometryCertificate cert = certify_geometry(J, e, opt);
  EXPECT_TRUE(cert.validated);
  EXPECT_GT(cert.rho0, 0.0);
  EXPECT_EQ(cert.samples, 64u);
  EXPECT_NEAR(ell_norm(cert.min_sample, cfg_b()), opt.r0, 1e-8 * opt.r0);
  EXPECT_LT(cert.endpoint_energy, 0.0);
  EXPECT_GT(cert.endpoint_ell, opt.r0);
}

TEST(Geometry, LargeSphereIsNotValidated) {
  const EnergyFunctional J = make_J(2, 33);
  const EigenPair e = first_eigenpair(2.0, J.grid_ptr());
  CertifyOptions opt;
  opt.r0 = 1e3;
  opt.n_samples = 16;
  const GeometryCertificate cert = certify_geometry(J, e, opt);
  EXPECT_FALSE(cert.validated);
  EXPECT_LE(cert.rho0, 0.0);
  MountainPassParams mp;
  EXPECT_THROW(mountain_pass_search(J, cert, mp), InvalidArgument);
}

TEST(Geometry, ScaleToSphere) {
  const GridPtr g = Grid::make(2, 17);
  const FieldPair fp(random_sine_field(g, 1), random_sine_field(g, 2));
  ComponentExponents ex{1.5, 1.5, 1.0, 1.0};
  for (double radius : {1e-3, 0.1, 10.0}) {
    const double tau = scale_to_ell_sphere(fp, ex, radius);
    EXPECT_NEAR(ell_norm(tau * fp, 1.5, 1.5, 1.0, 1.0), radius, 1e-9 * radius);
  }
}

TEST_F(OneDimensionalGroundState, MatchesShootingSolution) {
  const CriticalPointCandidate& c = *candidate;
  ASSERT_TRUE(c.converged);
  EXPECT_LE(c.residual, 1e-6);
  const int n = J->grid().n();
  const std::vector<double> ref = oracle::sample_k_bump(2.0, 1, n);
  const double sign = c.fields.u[static_cast<std::size_t>(n / 2)] > 0 ? 1.0 : -1.0;
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::abs(sign * c.fields.u[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)]));
  EXPECT_LT(err, 1e-3);
  EXPECT_EQ(c.linf_v, 0.0);
  EXPECT_NEAR(c.level, oracle::k_bump_level(2.0, 1), 1e-3 * c.level);
}

TEST_F(OneDimensionalGroundState, NegationIsAlsoCritical) {
  const FieldPair neg = -candidate->fields;
  EXPECT_NEAR(J->value(neg), candidate->level, 1e-12 * candidate->level);
  EXPECT_NEAR(J->residual_norm(neg), candidate->residual, 1e-12);
}

TEST_F(OneDimensionalGroundState, VerificationPasses) {
  const VerificationRecord r = verify_candidate(*candidate, *J);
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(r.trivial);
  EXPECT_TRUE(r.level_positive);
  EXPECT_NEAR(r.x_norm, r.nontriviality + r.linf_u + r.linf_v, 1e-12 * r.x_norm);
  EXPECT_LE(r.cerami_weighted, (1.0 + r.x_norm) * 1e-6);
}

TEST(Verification, ZeroFieldIsTrivial) {
  const EnergyFunctional J = make_J(1, 33);
  const CriticalPointCandidate zero{FieldPair(J.grid_ptr())};
  const VerificationRecord r = verify_candidate(zero, J);
  EXPECT_TRUE(r.trivial);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(Symmetry, ProjectionIsIdempotentAndPreservesParity) {
  const GridPtr g = Grid::make(2, 17);
  const FieldPair fp(random_sine_field(g, 3), random_sine_field(g, 4));
  const Symmetry sym{Parity::Even, Parity::Odd};
  const FieldPair once = project_symmetry(fp, sym);
  const FieldPair twice = project_symmetry(once, sym);
  for (std::size_t k = 0; k < g->node_count(); ++k) {
    EXPECT_DOUBLE_EQ(once.u[k], twice.u[k]);
    EXPECT_DOUBLE_EQ(once.u[k], once.u[g->mirror(k, 0)]);
    EXPECT_DOUBLE_EQ(once.u[k], -once.u[g->mirror(k, 1)]);
  }
  EXPECT_THROW(project_symmetry(FieldPair(Grid::make(2, 16)), sym), InvalidArgument);
}

TEST(Multiplicity, FindsDistinctIncreasingLevels) {
  const EnergyFunctional J = make_J(1, 257);
  MultiplicityParams mp;
  mp.count = 4;
  const auto cs = multiplicity_search(J, mp);
  ASSERT_GE(cs.size(), 2u);
  const ComponentExponents ex = J.model().exponents();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    EXPECT_TRUE(verify_candidate(cs[i], J).passed) << i;
    if (i > 0) EXPECT_GT(cs[i].level, cs[i - 1].level);
    for (std::size_t j = 0; j < i; ++j) EXPECT_FALSE(duplicate_candidates(cs[i].fields, cs[j].fields, ex, mp.dedup_tol));
  }
  // Ground state and the two-bump solution of the scalar equation.
  EXPECT_NEAR(cs[0].level, oracle::k_bump_level(2.0, 1), 1e-3 * cs[0].level);
  EXPECT_NEAR(cs[1].level, oracle::k_bump_level(2.0, 2), 1e-3 * cs[1].level);
}

TEST(Multiplicity, StartFieldsCarryTheirParity) {
  const GridPtr g = Grid::make(2, 17);
  for (std::size_t idx = 0; idx < 4; ++idx) {
    Symmetry sym;
    const FieldPair fp = multiplicity_start_field(g, idx, 7, 0.1, &sym);
    const FieldPair proj = project_symmetry(fp, sym);
    for (std::size_t k = 0; k < g->node_count(); ++k) EXPECT_NEAR(fp.u[k], proj.u[k], 1e-15);
  }
}

TEST(Multiplicity, DuplicateDetectionIgnoresSign) {
  const GridPtr g = Grid::make(1, 33);
  const FieldPair fp(random_sine_field(g, 1), random_sine_field(g, 2));
  const ComponentExponents ex{};
  EXPECT_TRUE(duplicate_candidates(fp, -fp, ex, 1e-12));
  EXPECT_FALSE(duplicate_candidates(fp, 2.0 * fp, ex, 1e-2));
}
