#include "quasivar/mpsolver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <thread>
#include <utility>

#include "quasivar/error.hpp"

namespace quasivar {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Platform-independent uniform draw in [-1, 1).
double symmetric_uniform(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

GridFunction sine_mode(const GridPtr& grid, int k, int l) {
  const bool two_d = grid->dimension() == 2;
  return GridFunction::interpolate(grid, [k, l, two_d](const Vec2& x) {
    const double sx = std::sin(k * kPi * x[0]);
    return two_d ? sx * std::sin(l * kPi * x[1]) : sx;
  });
}

// Reflection through x_axis = 1/2 of sin(k pi x): even for odd k, odd for even k.
Parity mode_parity(int k) { return k % 2 == 1 ? Parity::Even : Parity::Odd; }

bool parity_allows(Parity parity, int k) { return parity == Parity::None || mode_parity(k) == parity; }

std::vector<std::pair<int, int>> ordered_modes(int dimension, std::size_t count) {
  std::vector<std::pair<int, int>> modes;
  if (dimension == 1) {
    for (std::size_t k = 1; k <= count; ++k) modes.emplace_back(static_cast<int>(k), 0);
    return modes;
  }
  int extent = 1;
  while (static_cast<std::size_t>(extent * extent) < 2 * count + 4) ++extent;
  for (int k = 1; k <= extent; ++k)
    for (int l = 1; l <= extent; ++l) modes.emplace_back(k, l);
  std::stable_sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
    const int ea = a.first * a.first + a.second * a.second;
    const int eb = b.first * b.first + b.second * b.second;
    if (ea != eb) return ea < eb;
    return a.first > b.first;
  });
  modes.resize(count);
  return modes;
}

GridFunction project_parity(const GridFunction& gf, const Symmetry& sym) {
  const Grid& grid = gf.grid();
  GridFunction out = gf;
  const Parity parities[2] = {sym.x, sym.y};
  for (int axis = 0; axis < grid.dimension(); ++axis) {
    if (parities[axis] == Parity::None) continue;
    const double sign = parities[axis] == Parity::Even ? 1.0 : -1.0;
    const auto src = out.values();
    std::vector<double> next(src.size());
    for (std::size_t i = 0; i < src.size(); ++i)
      next[i] = 0.5 * (src[i] + sign * src[grid.mirror(i, axis)]);
    out = GridFunction(gf.grid_ptr(), std::move(next));
  }
  return out;
}

struct Path {
  std::vector<FieldPair> points;
  std::vector<double> energy;
};

std::size_t path_max_index(const Path& path) {
  std::size_t best = 1;
  for (std::size_t i = 2; i + 1 < path.points.size(); ++i)
    if (path.energy[i] > path.energy[best]) best = i;
  return best;
}

// Maximizes J along from + s * (to - from), s in [0, 1], by a safeguarded
// regula falsi (Illinois) on the directional derivative. Returns false when
// the derivative does not change sign on the segment.
bool segment_maximum(const EnergyFunctional& J, const FieldPair& from, const FieldPair& to,
                     FieldPair& best, double& best_energy) {
  const FieldPair dir = to - from;
  auto slope = [&](double s) {
    FieldPair x = from;
    x.axpy(s, dir);
    return J.apply_differential(x, dir);
  };
  double lo = 0.0, hi = 1.0;
  double flo = slope(lo);
  double fhi = slope(hi);
  if (!(flo > 0.0) || !(fhi < 0.0)) return false;
  int side = 0;
  for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
    double s = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
    const double fs = slope(s);
    if (fs == 0.0) {
      lo = hi = s;
      break;
    }
    if (fs > 0.0) {
      lo = s;
      flo = fs;
      if (side == 1) fhi *= 0.5;
      side = 1;
    } else {
      hi = s;
      fhi = fs;
      if (side == -1) flo *= 0.5;
      side = -1;
    }
  }
  FieldPair x = from;
  x.axpy(0.5 * (lo + hi), dir);
  const double e = J.value(x);
  if (!(e >= best_energy)) return false;
  best = std::move(x);
  best_energy = e;
  return true;
}

// Equal W-arc-length spacing on each side of the path maximum, which stays a
// vertex. Returns the new index of the maximum.
std::size_t reparameterize(Path& path, std::size_t top, const EnergyFunctional& J,
                           const ComponentExponents& ex) {
  const std::size_t m = path.points.size();
  std::vector<double> arc(m, 0.0);
  for (std::size_t i = 1; i < m; ++i)
    arc[i] = arc[i - 1] + pair_norm_W(path.points[i] - path.points[i - 1], ex.p1, ex.p2);
  const double total = arc.back();
  if (!(total > 0.0) || !std::isfinite(total)) return top;
  const double share = arc[top] / total;
  const auto new_top = static_cast<std::size_t>(std::clamp<long>(
      std::lround(share * static_cast<double>(m - 1)), 1, static_cast<long>(m) - 2));

  auto point_at = [&](double target) {
    std::size_t seg = 1;
    while (seg + 1 < m && arc[seg] < target) ++seg;
    const double len = arc[seg] - arc[seg - 1];
    const double w = len > 0.0 ? std::clamp((target - arc[seg - 1]) / len, 0.0, 1.0) : 0.0;
    FieldPair x = path.points[seg - 1];
    x.axpy(w, path.points[seg] - path.points[seg - 1]);
    return x;
  };
  std::vector<FieldPair> next;
  std::vector<double> energy;
  next.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      next.push_back(path.points.front());
      energy.push_back(path.energy.front());
    } else if (i == new_top) {
      next.push_back(path.points[top]);
      energy.push_back(path.energy[top]);
    } else if (i + 1 == m) {
      next.push_back(path.points.back());
      energy.push_back(path.energy.back());
    } else {
      const double target =
          i < new_top ? arc[top] * static_cast<double>(i) / static_cast<double>(new_top)
                      : arc[top] + (total - arc[top]) * static_cast<double>(i - new_top) /
                                       static_cast<double>(m - 1 - new_top);
      next.push_back(point_at(target));
      energy.push_back(J.value(next.back()));
    }
  }
  path.points = std::move(next);
  path.energy = std::move(energy);
  return new_top;
}

// One Armijo step along the negative Sobolev gradient. Returns false when
// backtracking cannot produce sufficient decrease.
bool descent_step(const EnergyFunctional& J, FieldPair& x, double& energy, const FieldPair& direction,
                  double slope, double max_alpha, double& step, const MountainPassParams& params) {
  double alpha = std::min(2.0 * step, max_alpha);
  for (int k = 0; k < 80; ++k, alpha *= 0.5) {
    FieldPair trial = x;
    trial.axpy(-alpha, direction);
    if (params.symmetry.active()) trial = project_symmetry(trial, params.symmetry);
    double e;
    try {
      e = J.value(trial);
    } catch (const NonFiniteEnergy&) {
      continue;
    }
    if (e <= energy - params.armijo_c * alpha * slope) {
      x = std::move(trial);
      energy = e;
      step = alpha;
      return true;
    }
  }
  return false;
}

}  // namespace

unsigned default_thread_count() {
  if (const char* env = std::getenv("QUASIVAR_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

Endpoint find_endpoint_along(const EnergyFunctional& J, const FieldPair& direction,
                             std::size_t max_doublings) {
  double tau = 1.0;
  for (std::size_t d = 0; d <= max_doublings; ++d, tau *= 2.0) {
    FieldPair e = tau * direction;
    double energy;
    try {
      energy = J.value(e);
    } catch (const NonFiniteEnergy&) {
      break;
    }
    if (energy < -1.0) return Endpoint{std::move(e), tau, energy, d};
  }
  throw NoNegativeEnergy("no point with J < -1 found along the search direction");
}

Endpoint find_endpoint(const EnergyFunctional& J, const EigenPair& first_eigenpair) {
  if (!first_eigenpair.phi1.same_grid(FieldPair(J.grid_ptr()).u))
    throw InvalidArgument("eigenfunction grid does not match the energy grid");
  FieldPair dir(first_eigenpair.phi1, GridFunction(J.grid_ptr()));
  return find_endpoint_along(J, dir);
}

double scale_to_ell_sphere(const FieldPair& fp, const ComponentExponents& ex, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("sphere radius must be positive");
  const double w = pair_norm_W(fp, ex.p1, ex.p2);
  const double pu = norm_W(power_map(fp.u, ex.s1), ex.p1);
  const double pv = norm_W(power_map(fp.v, ex.s2), ex.p2);
  if (!(w > 0.0)) throw InvalidArgument("cannot scale the zero field to a sphere");
  // ell(tau fp) = max(tau w, tau^{s1+1} pu + tau^{s2+1} pv), increasing in tau.
  auto ell = [&](double tau) {
    return std::max(tau * w, std::pow(tau, ex.s1 + 1.0) * pu + std::pow(tau, ex.s2 + 1.0) * pv);
  };
  double lo = radius / w;
  while (ell(lo) > radius) lo *= 0.5;
  double hi = lo;
  while (ell(hi) < radius) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double mid2 = (mid > lo && mid < hi) ? mid : 0.5 * (lo + hi);
    if (ell(mid2) < radius) lo = mid2;
    else hi = mid2;
  }
  return 0.5 * (lo + hi);
}

GeometryCertificate certify_geometry(const EnergyFunctional& J, const EigenPair& first_eigenpair,
                                     const CertifyOptions& options) {
  if (options.n_samples == 0) throw InvalidArgument("n_samples must be positive");
  if (options.max_mode < 1) throw InvalidArgument("max_mode must be at least 1");
  const GridPtr& grid = J.grid_ptr();
  const ComponentExponents ex = J.model().exponents();

  std::vector<GridFunction> modes;
  std::vector<double> decay;
  const int lmax = grid->dimension() == 2 ? options.max_mode : 1;
  for (int k = 1; k <= options.max_mode; ++k)
    for (int l = 1; l <= lmax; ++l) {
      modes.push_back(sine_mode(grid, k, l));
      decay.push_back(1.0 / static_cast<double>(k * k + (grid->dimension() == 2 ? l * l : 0)));
    }

  std::mt19937_64 rng(options.seed);
  GeometryCertificate cert{options.r0, std::numeric_limits<double>::infinity(), 0, FieldPair(grid),
                           FieldPair(grid), 0.0, 0.0, 0.0, false};
  for (std::size_t s = 0; s < options.n_samples; ++s) {
    FieldPair x(grid);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      x.u.axpy(symmetric_uniform(rng) * decay[m], modes[m]);
      x.v.axpy(symmetric_uniform(rng) * decay[m], modes[m]);
    }
    if (!(pair_norm_W(x, ex.p1, ex.p2) > 0.0)) continue;
    x *= scale_to_ell_sphere(x, ex, options.r0);
    const double ell = ell_norm(x, ex.p1, ex.p2, ex.s1, ex.s2);
    if (std::abs(ell - options.r0) > 1e-8 * options.r0)
      throw Error("sphere scaling failed to reach the requested radius");
    const double e = J.value(x);
    ++cert.samples;
    if (e < cert.rho0) {
      cert.rho0 = e;
      cert.min_sample = std::move(x);
    }
  }

  Endpoint end = find_endpoint(J, first_eigenpair);
  cert.endpoint_ell = ell_norm(end.field, ex.p1, ex.p2, ex.s1, ex.s2);
  cert.endpoint = std::move(end.field);
  cert.endpoint_energy = end.energy;
  cert.endpoint_tau = end.tau;
  cert.validated = cert.samples > 0 && cert.rho0 > 0.0 && cert.endpoint_energy < 0.0 &&
                   cert.endpoint_ell > options.r0;
  return cert;
}

FieldPair project_symmetry(const FieldPair& fp, const Symmetry& sym) {
  if (!sym.active()) return fp;
  if (!fp.grid().reflection_symmetric())
    throw InvalidArgument("parity projection needs a reflection-symmetric grid (odd n)");
  return FieldPair(project_parity(fp.u, sym), project_parity(fp.v, sym));
}

CriticalPointCandidate mountain_pass_search(const EnergyFunctional& J, const FieldPair& endpoint,
                                            const MountainPassParams& params) {
  if (params.path_points < 3) throw InvalidArgument("path_points must be at least 3");
  if (!(params.tol > 0.0)) throw InvalidArgument("tol must be positive");
  const ComponentExponents ex = J.model().exponents();
  const FieldPair end = project_symmetry(endpoint, params.symmetry);

  Path path;
  const std::size_t m = params.path_points;
  for (std::size_t i = 0; i < m; ++i) {
    path.points.push_back((static_cast<double>(i) / static_cast<double>(m - 1)) * end);
    path.energy.push_back(J.value(path.points.back()));
  }

  std::vector<double> steps(m, 1.0);
  CriticalPointCandidate out(FieldPair(J.grid_ptr()));
  out.seed = params.seed;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t top = 1;
  std::size_t it = 0;
  for (; it < params.max_iters; ++it) {
    top = path_max_index(path);
    if (params.reparam_every > 0 && it > 0 && it % params.reparam_every == 0)
      top = reparameterize(path, top, J, ex);
    if (!segment_maximum(J, path.points[top], path.points[top + 1], path.points[top], path.energy[top]))
      segment_maximum(J, path.points[top], path.points[top - 1], path.points[top], path.energy[top]);
    if (params.symmetry.active()) {
      path.points[top] = project_symmetry(path.points[top], params.symmetry);
      path.energy[top] = J.value(path.points[top]);
    }

    const GradientInfo g = J.gradient(path.points[top]);
    residual = g.residual;
    if (residual <= params.tol) {
      out.converged = true;
      break;
    }
    // Cap the move at the local path spacing so the maximum cannot jump across the ridge.
    const double spacing =
        0.5 * (pair_norm_W(path.points[top] - path.points[top - 1], ex.p1, ex.p2) +
               pair_norm_W(path.points[top + 1] - path.points[top], ex.p1, ex.p2));
    const double dir_norm = pair_norm_W(g.representative, ex.p1, ex.p2);
    const double max_alpha = dir_norm > 0.0 ? spacing / dir_norm : 1e6;
    if (!descent_step(J, path.points[top], path.energy[top], g.representative, residual * residual,
                      max_alpha, steps[top], params))
      break;

    // Neighbours relax towards the valley: gradient with the path tangent removed.
    for (int d = 1; d <= params.stencil; ++d) {
      for (const long j : {static_cast<long>(top) - d, static_cast<long>(top) + d}) {
        if (j < 1 || j + 1 >= static_cast<long>(m)) continue;
        const auto idx = static_cast<std::size_t>(j);
        const FieldPair tangent = path.points[idx + 1] - path.points[idx - 1];
        const double tt = J.sobolev_inner(tangent, tangent);
        FieldPair dir = J.gradient_representative(path.points[idx]);
        if (tt > 0.0) dir.axpy(-J.sobolev_inner(dir, tangent) / tt, tangent);
        const double slope = J.sobolev_inner(dir, dir);
        if (slope > 0.0) descent_step(J, path.points[idx], path.energy[idx], dir, slope, max_alpha, steps[idx], params);
      }
    }
  }

  out.fields = path.points[top];
  out.level = path.energy[top];
  out.residual = out.converged ? residual : J.residual_norm(out.fields);
  out.iterations = it;
  out.nontriviality = pair_norm_W(out.fields, ex.p1, ex.p2);
  out.linf_u = norm_Linf(out.fields.u);
  out.linf_v = norm_Linf(out.fields.v);
  out.collapsed = out.nontriviality <= params.nontrivial_floor;
  std::ostringstream prov;
  prov << "mountain_pass(path_points=" << params.path_points << ", stencil=" << params.stencil
       << ", seed=" << params.seed << ")";
  out.provenance = prov.str();
  return out;
}

CriticalPointCandidate mountain_pass_search(const EnergyFunctional& J,
                                            const GeometryCertificate& certificate,
                                            const MountainPassParams& params) {
  if (!certificate.validated)
    throw InvalidArgument("mountain-pass search requires a validated geometry certificate");
  return mountain_pass_search(J, certificate.endpoint, params);
}

FieldPair multiplicity_start_field(const GridPtr& grid, std::size_t index, std::uint64_t seed,
                                   double perturbation, Symmetry* symmetry_out) {
  const auto modes = ordered_modes(grid->dimension(), index + 1);
  const auto [k, l] = modes[index];
  const bool two_d = grid->dimension() == 2;
  Symmetry sym;
  sym.x = mode_parity(k);
  if (two_d) sym.y = mode_parity(l);
  if (symmetry_out) *symmetry_out = sym;

  const GridFunction base = sine_mode(grid, k, l);
  FieldPair start(base, base);
  std::mt19937_64 rng(seed);
  const int extent = 6;
  for (int kk = 1; kk <= extent; ++kk) {
    for (int ll = 1; ll <= (two_d ? extent : 1); ++ll) {
      if (kk == k && (!two_d || ll == l)) continue;
      if (!parity_allows(sym.x, kk) || (two_d && !parity_allows(sym.y, ll))) continue;
      const GridFunction mode = sine_mode(grid, kk, ll);
      const double weight = perturbation / static_cast<double>(kk * kk + (two_d ? ll * ll : 0));
      start.u.axpy(weight * symmetric_uniform(rng), mode);
      start.v.axpy(weight * symmetric_uniform(rng), mode);
    }
  }
  return start;
}

bool duplicate_candidates(const FieldPair& a, const FieldPair& b, const ComponentExponents& ex,
                          double tol) {
  return pair_norm_W(a - b, ex.p1, ex.p2) < tol || pair_norm_W(a + b, ex.p1, ex.p2) < tol;
}

std::vector<CriticalPointCandidate> multiplicity_search(const EnergyFunctional& J,
                                                        const MultiplicityParams& params) {
  std::vector<std::uint64_t> seeds = params.seeds;
  if (seeds.empty())
    for (std::size_t j = 1; j <= params.count; ++j) seeds.push_back(params.search.seed + j);
  const GridPtr& grid = J.grid_ptr();
  const bool symmetric = params.use_symmetry && grid->reflection_symmetric();

  std::vector<std::optional<CriticalPointCandidate>> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < seeds.size(); j = next++) {
      try {
        Symmetry sym;
        const FieldPair start = multiplicity_start_field(grid, j, seeds[j], params.perturbation, &sym);
        MountainPassParams mp = params.search;
        mp.seed = seeds[j];
        mp.symmetry = symmetric ? sym : Symmetry{};
        const Endpoint end = find_endpoint_along(J, project_symmetry(start, mp.symmetry));
        results[j] = mountain_pass_search(J, end.field, mp);
      } catch (const NoNegativeEnergy&) {
        // No mountain-pass geometry along this start; skip it.
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(params.threads ? params.threads : default_thread_count(),
                                       static_cast<unsigned>(seeds.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const ComponentExponents ex = J.model().exponents();
  std::vector<CriticalPointCandidate> kept;
  for (auto& r : results) {
    if (!r || !r->converged || r->collapsed) continue;
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const CriticalPointCandidate& c) {
      return duplicate_candidates(c.fields, r->fields, ex, params.dedup_tol);
    });
    if (!dup) kept.push_back(std::move(*r));
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.level < b.level; });
  return kept;
}

VerificationRecord verify_candidate(const CriticalPointCandidate& candidate, const EnergyFunctional& J,
                                    const VerifyOptions& options) {
  const ComponentExponents ex = J.model().exponents();
  VerificationRecord rec;
  rec.residual = J.residual_norm(candidate.fields);
  rec.level = J.value(candidate.fields);
  rec.nontriviality = pair_norm_W(candidate.fields, ex.p1, ex.p2);
  rec.linf_u = norm_Linf(candidate.fields.u);
  rec.linf_v = norm_Linf(candidate.fields.v);
  rec.x_norm = rec.nontriviality + rec.linf_u + rec.linf_v;
  rec.cerami_weighted = rec.residual * (1.0 + rec.x_norm);
  rec.trivial = rec.nontriviality <= options.nontrivial_floor;
  rec.level_positive = rec.level > 0.0;
  rec.passed = !rec.trivial && rec.level_positive && rec.residual <= options.tol &&
               std::isfinite(rec.linf_u) && std::isfinite(rec.linf_v);
  return rec;
}

}  // namespace quasivar
