#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "quasivar/eigenpair.hpp"
#include "quasivar/energy.hpp"
#include "quasivar/grid.hpp"

namespace quasivar {

struct Endpoint {
  FieldPair field;
  double tau = 0.0;
  double energy = 0.0;
  std::size_t doublings = 0;
};

/// Scales (tau * direction) with tau = 1, 2, 4, ... until J < -1. Throws
/// NoNegativeEnergy after max_doublings.
Endpoint find_endpoint_along(const EnergyFunctional& J, const FieldPair& direction,
                             std::size_t max_doublings = 60);
/// Endpoint (tau * phi1, 0) along the first eigenfunction of -Delta_{p1}.
Endpoint find_endpoint(const EnergyFunctional& J, const EigenPair& first_eigenpair);

struct GeometryCertificate {
  double r0 = 0.0;
  /// Smallest sampled J on the sphere ell(u, v) = r0.
  double rho0 = 0.0;
  std::size_t samples = 0;
  FieldPair min_sample;
  FieldPair endpoint;
  double endpoint_energy = 0.0;
  double endpoint_ell = 0.0;
  double endpoint_tau = 0.0;
  bool validated = false;
};

struct CertifyOptions {
  double r0 = 0.1;
  std::size_t n_samples = 256;
  std::uint64_t seed = 1;
  /// Random combinations of sin(k pi x) (times sin(l pi y)) for k, l <= max_mode.
  int max_mode = 4;
};

/// Scale factor tau > 0 with ell(tau * fp) = radius (bisection on log tau).
double scale_to_ell_sphere(const FieldPair& fp, const ComponentExponents& ex, double radius);

/// Samples J on the ell-sphere of radius r0 and attaches an endpoint with
/// J < 0. Returns a non-validated certificate (no exception) when the sampled
/// minimum is not positive.
GeometryCertificate certify_geometry(const EnergyFunctional& J, const EigenPair& first_eigenpair,
                                     const CertifyOptions& options);

enum class Parity { None, Even, Odd };

/// Reflection parities about x = 1/2 and y = 1/2 imposed on the search.
/// Invariant subspaces of the (even, autonomous) functional: critical points
/// of the restriction are critical points of J.
struct Symmetry {
  Parity x = Parity::None;
  Parity y = Parity::None;
  bool active() const { return x != Parity::None || y != Parity::None; }
};

/// Projects both components onto the parity subspace. Requires a
/// reflection-symmetric grid when the symmetry is active.
FieldPair project_symmetry(const FieldPair& fp, const Symmetry& sym);

struct MountainPassParams {
  std::size_t path_points = 33;
  double tol = 1e-6;
  std::size_t max_iters = 10000;
  double armijo_c = 1e-4;
  double nontrivial_floor = 1e-3;
  std::size_t reparam_every = 50;
  /// Path neighbours on each side of the maximum that also take a descent step.
  int stencil = 0;
  Symmetry symmetry;
  std::uint64_t seed = 0;
};

struct CriticalPointCandidate {
  explicit CriticalPointCandidate(FieldPair f) : fields(std::move(f)) {}

  FieldPair fields;
  double level = 0.0;
  double residual = 0.0;
  /// ||(u, v)||_W
  double nontriviality = 0.0;
  double linf_u = 0.0;
  double linf_v = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool collapsed = false;
  std::uint64_t seed = 0;
  std::string provenance;
};

/// Path-deformation mountain-pass search. The path starts as the segment from
/// (0, 0) to the endpoint. Each iteration locates the path maximum (lowest
/// index on ties), refines it to the maximum along the adjacent path segments,
/// and moves it (and its stencil neighbours) along the negative Sobolev
/// gradient with Armijo backtracking. Stops once the residual at the path
/// maximum is <= tol.
CriticalPointCandidate mountain_pass_search(const EnergyFunctional& J, const FieldPair& endpoint,
                                            const MountainPassParams& params);
/// Throws InvalidArgument unless the certificate validated.
CriticalPointCandidate mountain_pass_search(const EnergyFunctional& J,
                                            const GeometryCertificate& certificate,
                                            const MountainPassParams& params);

struct MultiplicityParams {
  MountainPassParams search;
  std::size_t count = 4;
  /// One search per seed; when empty, seeds search.seed + 1 .. + count are used.
  std::vector<std::uint64_t> seeds;
  double dedup_tol = 1e-2;
  /// Impose the reflection parity of each starting mode.
  bool use_symmetry = true;
  /// Relative amplitude of the seeded perturbation added to each starting mode.
  double perturbation = 0.1;
  /// 0 selects QUASIVAR_THREADS or the hardware concurrency.
  unsigned threads = 0;
};

/// Sign-structured start field of search j: mode (k, l) plus a seeded
/// perturbation with the same parities.
FieldPair multiplicity_start_field(const GridPtr& grid, std::size_t index, std::uint64_t seed,
                                   double perturbation, Symmetry* symmetry_out = nullptr);

/// Two candidates coincide when ||a - b||_W < tol or ||a + b||_W < tol.
bool duplicate_candidates(const FieldPair& a, const FieldPair& b, const ComponentExponents& ex,
                          double tol);

/// Runs one mountain-pass search per seed, keeps converged non-trivial
/// results, removes duplicates and returns them sorted by level. This is a
/// heuristic: it does not certify distinct min-max levels.
std::vector<CriticalPointCandidate> multiplicity_search(const EnergyFunctional& J,
                                                        const MultiplicityParams& params);

struct VerificationRecord {
  double residual = 0.0;
  double level = 0.0;
  double nontriviality = 0.0;
  double linf_u = 0.0;
  double linf_v = 0.0;
  /// ||(u,v)||_W + |u|_inf + |v|_inf
  double x_norm = 0.0;
  /// residual * (1 + x_norm)
  double cerami_weighted = 0.0;
  bool trivial = true;
  bool level_positive = false;
  bool passed = false;
};

struct VerifyOptions {
  double tol = 1e-6;
  double nontrivial_floor = 1e-3;
};

VerificationRecord verify_candidate(const CriticalPointCandidate& candidate, const EnergyFunctional& J,
                                    const VerifyOptions& options = {});

/// Worker count from QUASIVAR_THREADS, else hardware concurrency (>= 1).
unsigned default_thread_count();

}  // namespace quasivar
