#include "quasivar/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "quasivar/error.hpp"

namespace quasivar {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// |t|^e t without the sign branch.
double signed_pow(double t, double e) { return t == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(t), e), t); }

enum class Check { AtLeastZero, Positive, Equal, ExactlyEqual };

class MarginTracker {
 public:
  MarginTracker(std::string id, Check check, double tol) : check_(check), tol_(tol) {
    out_.id = std::move(id);
    out_.min_margin = std::numeric_limits<double>::infinity();
    out_.min_relative = std::numeric_limits<double>::infinity();
  }

  void add(double margin, double scale, std::array<double, 3> at) {
    const double rel = scale > 0.0 ? margin / scale : margin;
    if (std::isnan(margin)) bad_ = true;
    out_.min_margin = std::min(out_.min_margin, margin);
    out_.max_abs_relative = std::max(out_.max_abs_relative, std::abs(rel));
    if (rel < out_.min_relative) {
      out_.min_relative = rel;
      out_.argmin = at;
    }
    ++out_.samples;
  }

  SampledMargin finish() {
    switch (check_) {
      case Check::AtLeastZero: out_.satisfied = out_.min_relative >= -tol_; break;
      case Check::Positive: out_.satisfied = out_.min_margin > 0.0; break;
      case Check::Equal: out_.satisfied = out_.max_abs_relative <= tol_; break;
      case Check::ExactlyEqual: out_.satisfied = out_.max_abs_relative == 0.0; break;
    }
    if (bad_ || out_.samples == 0) out_.satisfied = false;
    return out_;
  }

 private:
  SampledMargin out_;
  Check check_;
  double tol_;
  bool bad_ = false;
};

std::string tag(const char* base, int c) { return std::string(base) + "[" + std::to_string(c) + "]"; }

}  // namespace

ModelFunctions::ModelFunctions(ExponentConfig cfg, double epsilon_reg)
    : cfg_(cfg), epsilon_(epsilon_reg) {
  cfg_.validate();
  if (!(epsilon_reg >= 0.0) || !std::isfinite(epsilon_reg)) {
    throw InvalidArgument("epsilon_reg must be finite and >= 0");
  }
}

double ModelFunctions::energy_density(int c, double t, const Vec2& xi) const {
  const double p = cfg_.p(c);
  const double sp = cfg_.s(c) * p;
  const double weight = 1.0 + (sp == 0.0 ? 1.0 : std::pow(std::abs(t), sp));
  return weight * std::pow(std::sqrt(dot(xi, xi)), p) / p;
}

Vec2 ModelFunctions::flux(int c, double t, const Vec2& xi) const {
  const double p = cfg_.p(c);
  const double sp = cfg_.s(c) * p;
  const double weight = 1.0 + (sp == 0.0 ? 1.0 : std::pow(std::abs(t), sp));
  const double r2 = dot(xi, xi);
  double factor;
  if (p == 2.0) {
    factor = 1.0;
  } else if (p < 2.0 && epsilon_ > 0.0) {
    factor = std::pow(r2 + epsilon_ * epsilon_, 0.5 * (p - 2.0));
  } else if (r2 == 0.0) {
    // |xi|^{p-2} xi -> 0 for every p > 1
    return {0.0, 0.0};
  } else {
    factor = std::pow(r2, 0.5 * (p - 2.0));
  }
  return {weight * factor * xi[0], weight * factor * xi[1]};
}

double ModelFunctions::energy_dt(int c, double t, const Vec2& xi) const {
  // d/dt (1/p)(1+|t|^{sp})|xi|^p = s |t|^{sp-2} t |xi|^p
  const double s = cfg_.s(c);
  if (s == 0.0 || t == 0.0) return 0.0;
  const double p = cfg_.p(c);
  return s * signed_pow(t, s * p - 1.0) * std::pow(std::sqrt(dot(xi, xi)), p);
}

double ModelFunctions::G(double u, double v) const {
  const double au = std::abs(u);
  const double av = std::abs(v);
  double g = std::pow(au, cfg_.q1) / cfg_.q1 + std::pow(av, cfg_.q2) / cfg_.q2;
  if (cfg_.c_star > 0.0) g += cfg_.c_star * std::pow(au, cfg_.gamma1) * std::pow(av, cfg_.gamma2);
  return g;
}

double ModelFunctions::Gu(double u, double v) const {
  double g = signed_pow(u, cfg_.q1 - 1.0);
  if (cfg_.c_star > 0.0) {
    g += cfg_.gamma1 * cfg_.c_star * signed_pow(u, cfg_.gamma1 - 1.0) *
         std::pow(std::abs(v), cfg_.gamma2);
  }
  return g;
}

double ModelFunctions::Gv(double u, double v) const {
  double g = signed_pow(v, cfg_.q2 - 1.0);
  if (cfg_.c_star > 0.0) {
    g += cfg_.gamma2 * cfg_.c_star * std::pow(std::abs(u), cfg_.gamma1) *
         signed_pow(v, cfg_.gamma2 - 1.0);
  }
  return g;
}

ComponentExponents ModelFunctions::exponents() const {
  return {cfg_.p1, cfg_.p2, cfg_.s1, cfg_.s2};
}

const SampledMargin* StructuralSampleReport::find(const std::string& id) const {
  for (const auto& m : margins) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

bool StructuralSampleReport::all_satisfied() const {
  return std::all_of(margins.begin(), margins.end(), [](const SampledMargin& m) { return m.satisfied; }) &&
         small_state.satisfied && large_state.satisfied;
}

StructuralSampleReport sample_structural_hypotheses(const ModelFunctions& mf,
                                                    const SamplerParams& params) {
  return sample_structural_hypotheses(mf, mf.config(), params);
}

StructuralSampleReport sample_structural_hypotheses(const CoefficientModel& model,
                                                    const ExponentConfig& cfg,
                                                    const SamplerParams& params) {
  StructuralSampleReport rep;
  rep.constants = model_constants_unchecked(cfg);
  rep.alpha2 = std::min(1.0 / cfg.p1, 1.0 / cfg.p2);
  const ModelConstants& k = rep.constants;
  const double tol = params.relative_tolerance;

  std::vector<MarginTracker> trackers;
  enum Slot { H2, H3, H4, H5, H6, H7, H8, kSlots };
  for (int c = 1; c <= 2; ++c) {
    trackers.emplace_back(tag("h2", c), Check::AtLeastZero, tol);
    trackers.emplace_back(tag("h3", c), Check::Equal, tol);
    trackers.emplace_back(tag("h4", c), Check::AtLeastZero, tol);
    trackers.emplace_back(tag("h5", c), Check::AtLeastZero, tol);
    trackers.emplace_back(tag("h6", c), Check::Positive, tol);
    trackers.emplace_back(tag("h7", c), Check::AtLeastZero, tol);
    trackers.emplace_back(tag("h8", c), Check::ExactlyEqual, tol);
  }
  MarginTracker g3("g3", Check::AtLeastZero, tol);
  MarginTracker g3_pos("g3.positive", Check::Positive, tol);
  MarginTracker g6("g6", Check::ExactlyEqual, tol);

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> t_dist(-params.t_max, params.t_max);
  std::uniform_real_distribution<double> xi_dist(-params.xi_max, params.xi_max);
  std::uniform_real_distribution<double> r_dist(params.uv_min_radius, params.uv_max_radius);
  std::uniform_real_distribution<double> angle_dist(0.0, 2.0 * std::numbers::pi);

  for (std::size_t n = 0; n < params.samples; ++n) {
    const double t = t_dist(rng);
    const Vec2 xi{xi_dist(rng), xi_dist(rng)};
    const Vec2 xi2{xi_dist(rng), xi_dist(rng)};
    const std::array<double, 3> at{t, xi[0], xi[1]};
    const bool outside_R = std::sqrt(t * t + dot(xi, xi)) >= k.R;

    for (int c = 1; c <= 2; ++c) {
      MarginTracker* tr = &trackers[static_cast<std::size_t>((c - 1) * kSlots)];
      const double p = cfg.p(c);
      const double theta = cfg.theta(c);
      const double mu2 = c == 1 ? k.mu2_1 : k.mu2_2;
      const double A = model.energy_density(c, t, xi);
      const Vec2 a = model.flux(c, t, xi);
      const double At = model.energy_dt(c, t, xi);
      const double axi = dot(a, xi);
      const double Att = At * t;
      const double envelope = (1.0 + std::pow(std::abs(t), cfg.s(c) * p)) * std::pow(std::sqrt(dot(xi, xi)), p);

      if (outside_R) {
        tr[H2].add(k.eta1 * axi - A, std::abs(A) + k.eta1 * std::abs(axi), at);
        tr[H4].add(axi + Att - k.mu1 * axi, std::abs(axi) + std::abs(Att), at);
        tr[H5].add(A - theta * axi - theta * Att - mu2 * axi,
                   std::abs(A) + theta * (std::abs(axi) + std::abs(Att)) + std::abs(mu2 * axi), at);
      }
      tr[H3].add(axi - k.mu0 * envelope, std::abs(axi) + k.mu0 * envelope, at);
      const Vec2 a2 = model.flux(c, t, xi2);
      const Vec2 dxi{xi[0] - xi2[0], xi[1] - xi2[1]};
      if (dot(dxi, dxi) > 0.0) {
        const Vec2 da{a[0] - a2[0], a[1] - a2[1]};
        tr[H6].add(dot(da, dxi), std::sqrt(dot(da, da) * dot(dxi, dxi)), at);
      }
      tr[H7].add(A - rep.alpha2 * envelope, std::abs(A) + rep.alpha2 * envelope, at);
      const double A_neg = model.energy_density(c, -t, Vec2{-xi[0], -xi[1]});
      tr[H8].add(A_neg - A, std::abs(A), at);
    }

    const double r = r_dist(rng);
    const double phi = angle_dist(rng);
    const double u = r * std::cos(phi);
    const double v = r * std::sin(phi);
    const std::array<double, 3> at_uv{u, v, 0.0};
    const double G = model.G(u, v);
    if (std::sqrt(u * u + v * v) >= k.R) {
      const double lhs_u = cfg.theta1 * model.Gu(u, v) * u;
      const double lhs_v = cfg.theta2 * model.Gv(u, v) * v;
      g3.add(lhs_u + lhs_v - G, std::abs(lhs_u) + std::abs(lhs_v) + std::abs(G), at_uv);
      g3_pos.add(G, std::abs(G), at_uv);
    }
    g6.add(model.G(-u, -v) - G, std::abs(G), at_uv);
  }

  for (auto& tr : trackers) rep.margins.push_back(tr.finish());
  rep.margins.push_back(g3.finish());
  rep.margins.push_back(g3_pos.finish());
  rep.margins.push_back(g6.finish());

  // Ratio trends over circles |(u,v)| = r on a fixed angular grid.
  const int M = std::max(8, params.angles_per_level);
  auto circle = [&](double r, auto&& ratio, bool take_max) {
    double best = take_max ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    for (int m = 0; m < M; ++m) {
      const double phi = 2.0 * std::numbers::pi * (m + 0.5) / M;
      const double val = ratio(r * std::cos(phi), r * std::sin(phi));
      best = take_max ? std::max(best, val) : std::min(best, val);
    }
    return best;
  };

  rep.small_state.id = "g4";
  rep.small_state.monotone = true;
  for (int lvl = 1; lvl <= params.trend_levels; ++lvl) {
    const double r = std::ldexp(1.0, -lvl);
    const double val = circle(
        r,
        [&](double u, double v) {
          return model.G(u, v) / (std::pow(std::abs(u), cfg.p1) + std::pow(std::abs(v), cfg.p2));
        },
        true);
    if (!rep.small_state.ratios.empty() && val > rep.small_state.ratios.back()) {
      rep.small_state.monotone = false;
    }
    rep.small_state.radii.push_back(r);
    rep.small_state.ratios.push_back(val);
  }
  rep.small_state.bound = kNaN;
  rep.small_state.satisfied = rep.small_state.monotone;
  if (params.first_eigenvalues) {
    const auto& lam = *params.first_eigenvalues;
    rep.small_state.bound = rep.alpha2 * std::min(lam[0], lam[1]);
    rep.small_state.satisfied =
        rep.small_state.satisfied && rep.small_state.ratios.back() < rep.small_state.bound;
  }

  rep.large_state.id = "g5";
  rep.large_state.monotone = true;
  // For the closed-form G the ratio is at least min{1/q1, 1/q2}/2 once |(u,v)| >= 2.
  rep.large_state.bound = 0.5 * std::min(1.0 / cfg.q1, 1.0 / cfg.q2);
  rep.large_state.satisfied = true;
  for (int lvl = 1; lvl <= params.trend_levels; ++lvl) {
    const double r = std::ldexp(1.0, lvl);
    const double val = circle(
        r,
        [&](double u, double v) {
          return model.G(u, v) /
                 (std::pow(std::abs(u), 1.0 / cfg.theta1) + std::pow(std::abs(v), 1.0 / cfg.theta2));
        },
        false);
    if (!rep.large_state.ratios.empty() && val < rep.large_state.ratios.back()) {
      rep.large_state.monotone = false;
    }
    if (!(val >= rep.large_state.bound)) rep.large_state.satisfied = false;
    rep.large_state.radii.push_back(r);
    rep.large_state.ratios.push_back(val);
  }
  return rep;
}

bool integrands_c3(const ExponentConfig& cfg) {
  auto c3 = [](double a) { return a == 0.0 || a > 3.0 || (a == std::floor(a) && std::fmod(a, 2.0) == 0.0); };
  for (int i = 1; i <= 2; ++i) {
    if (!c3(cfg.p(i)) || !c3(cfg.s(i) * cfg.p(i)) || !c3(cfg.q(i))) return false;
    if (cfg.c_star != 0.0 && !c3(cfg.gamma(i))) return false;
  }
  return true;
}

}  // namespace quasivar
