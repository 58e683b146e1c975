#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "json_lines.hpp"
#include "quasivar/eigenpair.hpp"
#include "quasivar/energy.hpp"
#include "quasivar/error.hpp"
#include "quasivar/exponents.hpp"
#include "quasivar/model.hpp"
#include "quasivar/mpsolver.hpp"
#include "quasivar/version.hpp"

namespace quasivar::cli {
namespace {

struct Context {
  const Invocation& inv;
  JsonLinesWriter& out;
  std::ostream& err;

  const RunConfig& cfg() const { return inv.config; }
  void note(const std::string& msg) const {
    if (!inv.quiet) err << msg << '\n';
  }
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const char* tier_name(HypothesisTier t) { return t == HypothesisTier::Theorem ? "theorem" : "structural"; }

GridPtr make_grid(const RunConfig& cfg) { return Grid::make(cfg.dimension, cfg.n); }

std::shared_ptr<const ModelFunctions> make_model(const RunConfig& cfg) {
  return std::make_shared<const ModelFunctions>(cfg.exponents, cfg.epsilon_reg);
}

EigenOptions eigen_options(const RunConfig& cfg) {
  EigenOptions o;
  o.tol = cfg.eigen_tol;
  o.max_iter = cfg.eigen_max_iter;
  o.epsilon_reg = cfg.epsilon_reg;
  return o;
}

MountainPassParams search_params(const RunConfig& cfg) {
  MountainPassParams mp;
  mp.path_points = cfg.path_points;
  mp.tol = cfg.tol;
  mp.max_iters = cfg.max_iters;
  mp.armijo_c = cfg.armijo_c;
  mp.nontrivial_floor = cfg.nontrivial_floor;
  mp.reparam_every = cfg.reparam_every;
  mp.stencil = cfg.stencil;
  mp.seed = cfg.seed;
  return mp;
}

void write_fields(const Context& ctx, const std::string& stem, const FieldPair& fp) {
  if (ctx.cfg().out.empty()) return;
  const std::filesystem::path dir(ctx.cfg().out);
  std::filesystem::create_directories(dir);
  write_field((dir / (stem + "_u.txt")).string(), fp.u);
  write_field((dir / (stem + "_v.txt")).string(), fp.v);
}

/// Solver commands refuse configurations outside the structural hypotheses.
bool require_structural(const Context& ctx) {
  const HypothesisReport rep = check_model_hypotheses(ctx.cfg().exponents);
  if (rep.structurally_admissible()) return true;
  std::vector<std::string> ids;
  for (const auto* r : rep.failures())
    if (r->tier == HypothesisTier::Structural) ids.push_back(r->id);
  ctx.out.write(JsonRecord("error")
                    .add("kind", "NonAdmissibleConfig")
                    .add("message", "configuration violates structural hypotheses")
                    .add("failing", ids));
  return false;
}

JsonRecord candidate_record(const CriticalPointCandidate& c) {
  JsonRecord r("candidate");
  r.add("seed", c.seed)
      .add("level", c.level)
      .add("residual", c.residual)
      .add("nontriviality", c.nontriviality)
      .add("linf_u", c.linf_u)
      .add("linf_v", c.linf_v)
      .add_count("iterations", c.iterations)
      .add("converged", c.converged)
      .add("collapsed", c.collapsed)
      .add("provenance", c.provenance);
  return r;
}

JsonRecord verification_record(const VerificationRecord& v) {
  JsonRecord r("verification");
  r.add("residual", v.residual)
      .add("level", v.level)
      .add("nontriviality", v.nontriviality)
      .add("linf_u", v.linf_u)
      .add("linf_v", v.linf_v)
      .add("x_norm_surrogate", v.x_norm)
      .add("cerami_weighted_residual", v.cerami_weighted)
      .add("trivial", v.trivial)
      .add("level_positive", v.level_positive)
      .add("passed", v.passed);
  return r;
}

JsonRecord certificate_record(const GeometryCertificate& c) {
  JsonRecord r("certificate");
  r.add("r0", c.r0)
      .add("rho0", c.rho0)
      .add_count("samples", c.samples)
      .add("endpoint_energy", c.endpoint_energy)
      .add("endpoint_ell", c.endpoint_ell)
      .add("endpoint_tau", c.endpoint_tau)
      .add("validated", c.validated);
  return r;
}

int cmd_check(const Context& ctx) {
  const HypothesisReport rep = check_model_hypotheses(ctx.cfg().exponents);
  for (const auto& h : rep.records) {
    ctx.out.write(JsonRecord("hypothesis")
                      .add("id", h.id)
                      .add("statement", h.statement)
                      .add("satisfied", h.satisfied)
                      .add("margin", h.margin)
                      .add("strict", h.strictness == Strictness::Strict)
                      .add("tier", tier_name(h.tier))
                      .add("vacuous", h.vacuous));
  }
  std::vector<std::string> failing;
  for (const auto* r : rep.failures()) failing.push_back(r->id);
  ctx.out.write(JsonRecord("summary")
                    .add("admissible", rep.admissible())
                    .add("structurally_admissible", rep.structurally_admissible())
                    .add("failing", failing));
  ctx.note(rep.admissible() ? "admissible" : "not admissible: " + std::to_string(failing.size()) + " failing");
  return rep.admissible() ? kExitOk : kExitFailure;
}

int cmd_derive(const Context& ctx) {
  const DerivedExponents d = derive_auxiliary_exponents(ctx.cfg().exponents);
  ctx.out.write(JsonRecord("derived")
                    .add("pstar1", d.pstar1)
                    .add("pstar2", d.pstar2)
                    .add("t1", d.t1)
                    .add("t2", d.t2)
                    .add("t3", d.t3)
                    .add("t4", d.t4)
                    .add("t5", d.t5)
                    .add("t6", d.t6)
                    .add("qbar1", d.qbar1)
                    .add("qbar2", d.qbar2)
                    .add("t3_lower", d.t3_lower)
                    .add("t3_upper", d.t3_upper)
                    .add("t5_lower", d.t5_lower)
                    .add("t5_upper", d.t5_upper));
  return kExitOk;
}

int cmd_constants(const Context& ctx) {
  const ModelConstants c = compute_model_constants(ctx.cfg().exponents);
  ctx.out.write(JsonRecord("constants")
                    .add("eta1", c.eta1)
                    .add("mu0", c.mu0)
                    .add("mu1", c.mu1)
                    .add("mu2_1", c.mu2_1)
                    .add("mu2_2", c.mu2_2)
                    .add("R", c.R));
  return kExitOk;
}

int cmd_gradcheck(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg();
  const GridPtr grid = make_grid(cfg);
  const EnergyFunctional J(make_model(cfg), grid);
  const bool smooth = integrands_c3(cfg.exponents);
  bool ok = true;

  // Zero field: dJ(0) vanishes in every direction.
  {
    const FieldPair d(random_sine_field(grid, cfg.seed ^ 0x5eedULL), random_sine_field(grid, cfg.seed ^ 0xd1ceULL));
    const double dj = J.apply_differential(FieldPair(grid), d);
    const bool pass = std::abs(dj) <= 1e-14;
    ok = ok && pass;
    ctx.out.write(JsonRecord("gradcheck_zero").add("derivative", dj).add("passed", pass));
  }

  for (std::size_t k = 0; k < cfg.gradcheck_samples; ++k) {
    const std::uint64_t s = cfg.seed * 1000 + 4 * k;
    // Non-smooth integrands are sampled at interior-positive base points.
    const auto base = smooth ? random_sine_field : random_positive_field;
    const FieldPair x(base(grid, s, 4, 2.0), base(grid, s + 1, 4, 2.0));
    const FieldPair d(random_sine_field(grid, s + 2, 4, 2.0), random_sine_field(grid, s + 3, 4, 2.0));
    // Steps stay below the distance to the kinks of non-smooth integrands.
    const double h0 = smooth ? 1e-2 : std::min(1e-2, 0.5 * smooth_step_limit(x, d));
    std::vector<double> steps;
    for (int i = 0; i < 12; ++i) steps.push_back(std::ldexp(h0, -i));
    const SlopeTest t = finite_difference_slope(J, x, d, steps);
    const bool pass = std::isfinite(t.slope) && t.slope >= 1.8 && t.slope <= 2.2;

    // Additivity in the direction.
    const FieldPair d2(random_sine_field(grid, s + 5, 4, 1.0), random_sine_field(grid, s + 6, 4, 1.0));
    const double lhs = J.apply_differential(x, d + d2);
    const double rhs = t.derivative + J.apply_differential(x, d2);
    const bool additive = std::abs(lhs - rhs) <= 1e-10 * std::max({std::abs(lhs), std::abs(rhs), 1.0});

    ok = ok && pass && additive;
    std::vector<double> used_steps, used_errors;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      if (!t.used[i]) continue;
      used_steps.push_back(t.steps[i]);
      used_errors.push_back(t.errors[i]);
    }
    ctx.out.write(JsonRecord("gradcheck")
                      .add_count("sample", k)
                      .add("derivative", t.derivative)
                      .add("slope", t.slope)
                      .add("steps", std::span<const double>(used_steps))
                      .add("errors", std::span<const double>(used_errors))
                      .add("additive", additive)
                      .add("passed", pass && additive));
  }
  ctx.note(ok ? "gradcheck passed" : "gradcheck failed");
  return ok ? kExitOk : kExitFailure;
}

int cmd_eigen(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg();
  const GridPtr grid = make_grid(cfg);
  bool ok = true;
  for (int i = 1; i <= 2; ++i) {
    const double p = cfg.exponents.p(i);
    if (i == 2 && p == cfg.exponents.p1) break;
    const EigenPair e = first_eigenpair(p, grid, eigen_options(cfg));
    ok = ok && e.converged;
    ctx.out.write(JsonRecord("eigen")
                      .add("component", i)
                      .add("p", p)
                      .add("lambda1", e.lambda1)
                      .add("rayleigh_quotient", rayleigh_quotient(e.phi1, p))
                      .add_count("iterations", e.iterations)
                      .add("residual", e.residual)
                      .add("converged", e.converged));
    if (!cfg.out.empty()) {
      std::filesystem::create_directories(cfg.out);
      write_field((std::filesystem::path(cfg.out) / ("phi1_p" + std::to_string(i) + ".txt")).string(), e.phi1);
    }
  }
  return ok ? kExitOk : kExitFailure;
}

GeometryCertificate run_certificate(const Context& ctx, const EnergyFunctional& J) {
  const RunConfig& cfg = ctx.cfg();
  const EigenPair e = first_eigenpair(cfg.exponents.p1, J.grid_ptr(), eigen_options(cfg));
  CertifyOptions co;
  co.r0 = cfg.r0;
  co.n_samples = cfg.n_samples;
  co.seed = cfg.seed;
  GeometryCertificate cert = certify_geometry(J, e, co);
  ctx.out.write(certificate_record(cert));
  return cert;
}

int cmd_certify(const Context& ctx) {
  if (!require_structural(ctx)) return kExitFailure;
  const EnergyFunctional J(make_model(ctx.cfg()), make_grid(ctx.cfg()));
  return run_certificate(ctx, J).validated ? kExitOk : kExitFailure;
}

int cmd_solve(const Context& ctx) {
  if (!require_structural(ctx)) return kExitFailure;
  const RunConfig& cfg = ctx.cfg();
  const EnergyFunctional J(make_model(cfg), make_grid(cfg));
  const GeometryCertificate cert = run_certificate(ctx, J);
  if (!cert.validated) {
    ctx.out.write(JsonRecord("error").add("kind", "GeometryNotValidated").add("message", "rho0 is not positive"));
    return kExitFailure;
  }
  const CriticalPointCandidate c = mountain_pass_search(J, cert, search_params(cfg));
  ctx.out.write(candidate_record(c));
  const VerificationRecord v = verify_candidate(c, J, {cfg.tol, cfg.nontrivial_floor});
  ctx.out.write(verification_record(v));
  write_fields(ctx, "candidate", c.fields);
  ctx.note("level " + std::to_string(c.level) + (v.passed ? " (verified)" : " (not verified)"));
  return c.converged && v.passed ? kExitOk : kExitFailure;
}

int cmd_multi(const Context& ctx) {
  if (!require_structural(ctx)) return kExitFailure;
  const RunConfig& cfg = ctx.cfg();
  const EnergyFunctional J(make_model(cfg), make_grid(cfg));
  MultiplicityParams mp;
  mp.search = search_params(cfg);
  mp.count = cfg.count;
  mp.seeds = cfg.seeds;
  mp.dedup_tol = cfg.dedup_tol;
  const auto found = multiplicity_search(J, mp);
  std::size_t index = 0;
  for (const auto& c : found) {
    ctx.out.write(candidate_record(c).add_count("index", index));
    ctx.out.write(verification_record(verify_candidate(c, J, {cfg.tol, cfg.nontrivial_floor})));
    write_fields(ctx, "candidate" + std::to_string(index), c.fields);
    ++index;
  }
  std::vector<double> levels;
  for (const auto& c : found) levels.push_back(c.level);
  ctx.out.write(JsonRecord("multiplicity").add_count("distinct", found.size()).add("levels", std::span<const double>(levels)));
  return found.empty() ? kExitFailure : kExitOk;
}

int cmd_dump(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg();
  if (cfg.out.empty()) {
    ctx.out.write(JsonRecord("error").add("kind", "Usage").add("message", "dump needs an output directory (--out)"));
    return kExitUsage;
  }
  const GridPtr grid = make_grid(cfg);
  const EnergyFunctional J(make_model(cfg), grid);
  const EigenPair e = first_eigenpair(cfg.exponents.p1, grid, eigen_options(cfg));
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  write_field((dir / "phi1.txt").string(), e.phi1);
  const Endpoint end = find_endpoint(J, e);
  write_field((dir / "endpoint_u.txt").string(), end.field.u);
  write_field((dir / "endpoint_v.txt").string(), end.field.v);
  ctx.out.write(JsonRecord("dump")
                    .add("directory", cfg.out)
                    .add("lambda1", e.lambda1)
                    .add("endpoint_tau", end.tau)
                    .add("endpoint_energy", end.energy));
  return kExitOk;
}

using Handler = std::function<int(const Context&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"check", cmd_check},       {"derive", cmd_derive}, {"constants", cmd_constants},
      {"gradcheck", cmd_gradcheck}, {"eigen", cmd_eigen},   {"certify", cmd_certify},
      {"solve", cmd_solve},       {"multi", cmd_multi},   {"dump", cmd_dump}};
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"check", "derive", "constants", "gradcheck", "eigen",
                                                 "certify", "solve", "multi", "dump"};
  return names;
}

int run_command(const Invocation& inv, std::ostream& out, std::ostream& err) {
  JsonLinesWriter writer(out);
  const Context ctx{inv, writer, err};
  const auto it = handlers().find(inv.command);
  if (it == handlers().end()) {
    writer.write(JsonRecord("error").add("kind", "Usage").add("message", "unknown command " + inv.command));
    return kExitUsage;
  }
  writer.write(JsonRecord("header")
                   .add("tool", "quasivar")
                   .add("version", kVersion)
                   .add("command", inv.command)
                   .add("config_hash", config_hash(inv.config))
                   .add("seed", inv.config.seed)
                   .add("timestamp", inv.timestamp.empty() ? utc_timestamp() : inv.timestamp));
  try {
    return it->second(ctx);
  } catch (const InfeasibleInterval& e) {
    writer.write(JsonRecord("error").add("kind", "InfeasibleInterval").add("message", e.what()));
  } catch (const NonAdmissibleConfig& e) {
    writer.write(JsonRecord("error").add("kind", "NonAdmissibleConfig").add("message", e.what()));
  } catch (const NoNegativeEnergy& e) {
    writer.write(JsonRecord("error").add("kind", "NoNegativeEnergy").add("message", e.what()));
  } catch (const NonFiniteEnergy& e) {
    writer.write(JsonRecord("error").add("kind", "NonFiniteEnergy").add("message", e.what()));
  } catch (const Error& e) {
    writer.write(JsonRecord("error").add("kind", "Error").add("message", e.what()));
  } catch (const std::filesystem::filesystem_error& e) {
    writer.write(JsonRecord("error").add("kind", "Filesystem").add("message", e.what()));
  }
  err << "error: see the final error record\n";
  return kExitFailure;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mountain-pass solver for coupled quasilinear elliptic systems", "quasivar"};
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_n;
  std::optional<double> tol;
  std::optional<std::string> out_dir;
  bool quiet = false;
  app.add_option("command", command, "Subcommand")->required()->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_path, "Run configuration file")->required();
  app.add_option("--seed", seed, "Override the configured seed");
  app.add_option("--out", out_dir, "Output directory for field dumps");
  app.add_option("--grid-n", grid_n, "Override nodes per axis");
  app.add_option("--tol", tol, "Override the residual tolerance");
  app.add_flag("--quiet", quiet, "Suppress notes on stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  Invocation inv;
  inv.command = command;
  inv.quiet = quiet;
  try {
    inv.config = load_run_config(config_path);
    if (seed) inv.config.seed = *seed;
    if (grid_n) inv.config.n = *grid_n;
    if (tol) inv.config.tol = *tol;
    if (out_dir) inv.config.out = *out_dir;
    inv.config.validate();
  } catch (const ConfigError& e) {
    JsonLinesWriter(out).write(JsonRecord("error").add("kind", "ConfigError").add("message", e.what()));
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }
  return run_command(inv, out, err);
}

}  // namespace quasivar::cli
