#include "quasivar/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "quasivar/error.hpp"

namespace quasivar {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string indexed(const std::string& base, int i) {
  return base + "[" + std::to_string(i) + "]";
}

HypothesisRecord make_record(std::string id, std::string statement, double margin,
                             Strictness strictness,
                             HypothesisTier tier = HypothesisTier::Structural) {
  HypothesisRecord r;
  r.id = std::move(id);
  r.statement = std::move(statement);
  r.margin = margin;
  r.strictness = strictness;
  r.tier = tier;
  // NaN margins compare false either way and therefore fail.
  r.satisfied = strictness == Strictness::Strict ? margin > 0.0 : margin >= 0.0;
  return r;
}

HypothesisRecord vacuous_record(std::string id, std::string statement) {
  HypothesisRecord r = make_record(std::move(id), std::move(statement), kInf,
                                   Strictness::Strict);
  r.vacuous = true;
  return r;
}

// Upper minus lower, with +inf upper bounds giving +inf slack.
double slack(double lower, double upper) {
  if (std::isinf(upper) && upper > 0.0) return std::isinf(lower) ? 0.0 : kInf;
  return upper - lower;
}

struct YoungInterval {
  double lower;
  double upper;
};

// Admissible window for t3 (i = 1) or t5 (i = 2). Lower endpoint
// p_i p_j^*(s_j+1) / (p_i p_j^*(s_j+1) - N t_i), tending to 1 as p_j^* -> inf.
YoungInterval young_interval(const ExponentConfig& cfg, int i, double t_i) {
  const int j = 3 - i;
  const double pstar_i = critical_exponent(cfg.p(i), cfg.N);
  const double pstar_j = critical_exponent(cfg.p(j), cfg.N);
  YoungInterval iv{1.0, pstar_i * (cfg.s(i) + 1.0)};
  if (!std::isinf(pstar_j)) {
    const double scale = cfg.p(i) * pstar_j * (cfg.s(j) + 1.0);
    const double denom = scale - cfg.N * t_i;
    iv.lower = denom > 0.0 ? scale / denom : kInf;
  }
  return iv;
}

double cross_exponent(const ExponentConfig& cfg, int i) {
  // t_1 = gamma_2 (q_1 - 1)/(q_1 - gamma_1), t_2 symmetric.
  const int j = 3 - i;
  return cfg.gamma(j) * (cfg.q(i) - 1.0) / (cfg.q(i) - cfg.gamma(i));
}

}  // namespace

void ExponentConfig::validate() const {
  const double fields[] = {p1, p2, s1, s2, q1, q2, gamma1, gamma2, theta1, theta2, c_star};
  for (double f : fields) {
    if (!std::isfinite(f)) throw InvalidArgument("exponent configuration has a non-finite field");
  }
  if (N < 1) throw InvalidArgument("N must be >= 1");
  if (p1 <= 1.0 || p2 <= 1.0) throw InvalidArgument("p1, p2 must be > 1");
  if (s1 < 0.0 || s2 < 0.0) throw InvalidArgument("s1, s2 must be >= 0");
  if (theta1 <= 0.0 || theta2 <= 0.0) throw InvalidArgument("theta1, theta2 must be > 0");
  if (c_star < 0.0) throw InvalidArgument("c_star must be >= 0");
  if (q1 < 1.0 || q2 < 1.0) throw InvalidArgument("q1, q2 must be >= 1");
  if (c_star > 0.0 && (gamma1 <= 1.0 || gamma2 <= 1.0)) {
    throw InvalidArgument("gamma1, gamma2 must be > 1 when c_star > 0");
  }
}

ExponentConfig ExponentConfig::swapped() const {
  ExponentConfig c = *this;
  std::swap(c.p1, c.p2);
  std::swap(c.s1, c.s2);
  std::swap(c.q1, c.q2);
  std::swap(c.gamma1, c.gamma2);
  std::swap(c.theta1, c.theta2);
  return c;
}

bool HypothesisReport::admissible() const {
  return std::all_of(records.begin(), records.end(),
                     [](const HypothesisRecord& r) { return r.satisfied; });
}

bool HypothesisReport::structurally_admissible() const {
  return std::all_of(records.begin(), records.end(), [](const HypothesisRecord& r) {
    return r.satisfied || r.tier == HypothesisTier::Theorem;
  });
}

const HypothesisRecord* HypothesisReport::find(const std::string& id) const {
  auto it = std::find_if(records.begin(), records.end(),
                         [&](const HypothesisRecord& r) { return r.id == id; });
  return it == records.end() ? nullptr : &*it;
}

std::vector<const HypothesisRecord*> HypothesisReport::failures() const {
  std::vector<const HypothesisRecord*> out;
  for (const auto& r : records) {
    if (!r.satisfied) out.push_back(&r);
  }
  return out;
}

double critical_exponent(double p, int N) {
  if (!(p > 1.0)) throw InvalidArgument("critical_exponent: p must be > 1");
  if (N < 1) throw InvalidArgument("critical_exponent: N must be >= 1");
  if (p >= N) return kInf;
  return N * p / (N - p);
}

double cross_growth_bound(const ExponentConfig& cfg, int i) {
  const int j = 3 - i;
  const double pstar_i = critical_exponent(cfg.p(i), cfg.N);
  const double pstar_j = critical_exponent(cfg.p(j), cfg.N);
  if (std::isinf(pstar_j)) return kInf;
  const double inv = std::isinf(pstar_i) ? 0.0 : 1.0 / (pstar_i * (cfg.s(i) + 1.0));
  return cfg.p(i) / cfg.N * (1.0 - inv) * pstar_j * (cfg.s(j) + 1.0);
}

DerivedExponents derive_auxiliary_exponents(const ExponentConfig& cfg) {
  cfg.validate();
  DerivedExponents d;
  d.pstar1 = critical_exponent(cfg.p1, cfg.N);
  d.pstar2 = critical_exponent(cfg.p2, cfg.N);

  if (cfg.c_star > 0.0) {
    if (!(cfg.q1 > cfg.gamma1) || !(cfg.q2 > cfg.gamma2)) {
      throw InvalidArgument("derive_auxiliary_exponents: q_i > gamma_i required when c_star > 0");
    }
    d.t1 = cross_exponent(cfg, 1);
    d.t2 = cross_exponent(cfg, 2);
  }

  auto pick = [&](int i, double t_i, double& lower, double& upper) {
    const YoungInterval iv = young_interval(cfg, i, t_i);
    lower = iv.lower;
    upper = iv.upper;
    if (!(iv.lower < iv.upper)) {
      std::ostringstream msg;
      msg << "Young-split interval for t" << (i == 1 ? 3 : 5) << " is empty: (" << iv.lower
          << ", " << iv.upper << ")";
      throw InfeasibleInterval(msg.str());
    }
    return std::isinf(iv.upper) ? iv.lower + 1.0 : 0.5 * (iv.lower + iv.upper);
  };
  d.t3 = pick(1, d.t1, d.t3_lower, d.t3_upper);
  d.t5 = pick(2, d.t2, d.t5_lower, d.t5_upper);

  d.t4 = d.t1 * d.t3 / (d.t3 - 1.0);
  d.t6 = d.t2 * d.t5 / (d.t5 - 1.0);
  d.qbar1 = std::max({cfg.q1, d.t3, d.t6});
  d.qbar2 = std::max({cfg.q2, d.t4, d.t5});
  return d;
}

HypothesisReport check_model_hypotheses(const ExponentConfig& cfg) {
  cfg.validate();
  HypothesisReport rep;
  auto& recs = rep.records;
  const double N = cfg.N;
  const bool coupled = cfg.c_star > 0.0;

  recs.push_back(make_record("p_lt_N", "p1 < N or p2 < N", std::max(N - cfg.p1, N - cfg.p2),
                             Strictness::Strict, HypothesisTier::Theorem));

  for (int i = 1; i <= 2; ++i) {
    const double p = cfg.p(i);
    const double s = cfg.s(i);
    const double q = cfg.q(i);
    const double inv_theta = 1.0 / cfg.theta(i);
    const double pstar = critical_exponent(p, cfg.N);
    const double top = std::isinf(pstar) ? kInf : pstar * (s + 1.0);
    const std::string sfx = std::to_string(i);

    recs.push_back(make_record(indexed("exj0.a", i), "2 < 1 + p" + sfx, (1.0 + p) - 2.0,
                               Strictness::Strict, HypothesisTier::Theorem));
    recs.push_back(make_record(indexed("exj0.b", i), "1 + p" + sfx + " < p" + sfx + "(s" + sfx + "+1)",
                               p * (s + 1.0) - (1.0 + p), Strictness::Strict,
                               HypothesisTier::Theorem));
    recs.push_back(make_record(indexed("exj0.c", i), "p" + sfx + "(s" + sfx + "+1) < 1/theta" + sfx,
                               inv_theta - p * (s + 1.0), Strictness::Strict));
    recs.push_back(make_record(indexed("exj0.d", i), "1/theta" + sfx + " <= q" + sfx, q - inv_theta,
                               Strictness::NonStrict));
    recs.push_back(make_record(indexed("exj0.e", i), "q" + sfx + " < p" + sfx + "*(s" + sfx + "+1)",
                               slack(q, top), Strictness::Strict));
    recs.push_back(make_record(indexed("theta_p", i), "theta" + sfx + " < 1/p" + sfx,
                               1.0 / p - cfg.theta(i), Strictness::Strict));
    recs.push_back(make_record(indexed("s_theta_p", i), "s" + sfx + " < 1/(theta" + sfx + " p" + sfx + ")",
                               1.0 / (cfg.theta(i) * p) - s, Strictness::Strict));
  }

  if (coupled) {
    for (int i = 1; i <= 2; ++i) {
      const std::string sfx = std::to_string(i);
      recs.push_back(make_record(indexed("exj01.gamma_gt_1", i), "1 < gamma" + sfx,
                                 cfg.gamma(i) - 1.0, Strictness::Strict));
      recs.push_back(make_record(indexed("exj01.gamma_lt_q", i), "gamma" + sfx + " < q" + sfx,
                                 cfg.q(i) - cfg.gamma(i), Strictness::Strict));
    }
    const double closure = cfg.exj01_literal
                               ? cfg.gamma1 * cfg.theta1 + cfg.gamma1 * cfg.theta2
                               : cfg.gamma1 * cfg.theta1 + cfg.gamma2 * cfg.theta2;
    recs.push_back(make_record("exj01.closure",
                               cfg.exj01_literal ? "gamma1 theta1 + gamma1 theta2 >= 1"
                                                 : "gamma1 theta1 + gamma2 theta2 >= 1",
                               closure - 1.0, Strictness::NonStrict));
  } else {
    for (int i = 1; i <= 2; ++i) {
      const std::string sfx = std::to_string(i);
      recs.push_back(vacuous_record(indexed("exj01.gamma_gt_1", i), "1 < gamma" + sfx));
      recs.push_back(vacuous_record(indexed("exj01.gamma_lt_q", i), "gamma" + sfx + " < q" + sfx));
    }
    recs.push_back(vacuous_record("exj01.closure", "gamma1 theta1 + gamma2 theta2 >= 1"));
  }

  // gamma_j (q_i - 1)/(q_i - gamma_i) < (p_i/N)(1 - 1/(p_i^*(s_i+1))) p_j^*(s_j+1)
  for (int i = 1; i <= 2; ++i) {
    const int j = 3 - i;
    const std::string id =
        "exj02[i=" + std::to_string(i) + ",j=" + std::to_string(j) + "]";
    const std::string st = "gamma" + std::to_string(j) + "(q" + std::to_string(i) + "-1)/(q" +
                           std::to_string(i) + "-gamma" + std::to_string(i) +
                           ") < cross-growth bound";
    if (!coupled) {
      recs.push_back(vacuous_record(id, st));
      continue;
    }
    const double lhs = cfg.q(i) > cfg.gamma(i) ? cross_exponent(cfg, i) : kInf;
    recs.push_back(make_record(id, st, slack(lhs, cross_growth_bound(cfg, i)),
                               Strictness::Strict));
  }

  try {
    const DerivedExponents d = derive_auxiliary_exponents(cfg);
    rep.derived = d;
    const double t[] = {d.t1, d.t2};
    const double tpair[] = {d.t4, d.t6};
    const double qbar[] = {d.qbar1, d.qbar2};
    for (int i = 1; i <= 2; ++i) {
      const int j = 3 - i;
      const std::string sfx = std::to_string(i);
      const double p = cfg.p(i);
      const double pstar_i = critical_exponent(p, cfg.N);
      const double pstar_j = critical_exponent(cfg.p(j), cfg.N);
      recs.push_back(make_record(indexed("cross_growth", i), "0 <= t" + sfx + " < cross-growth bound",
                                 slack(t[i - 1], cross_growth_bound(cfg, i)), Strictness::Strict));
      const double lo = i == 1 ? d.t3_lower : d.t5_lower;
      const double hi = i == 1 ? d.t3_upper : d.t5_upper;
      recs.push_back(make_record(indexed("young_interval", i), "Young-split interval non-empty",
                                 slack(lo, hi), Strictness::Strict));
      const double pair_cap = std::isinf(pstar_j) ? kInf : p / cfg.N * pstar_j * (cfg.s(j) + 1.0);
      recs.push_back(make_record(indexed("pair_exponent", i),
                                 std::string(i == 1 ? "t4" : "t6") + " < (p" + sfx + "/N) p" +
                                     std::to_string(j) + "*(s" + std::to_string(j) + "+1)",
                                 slack(tpair[i - 1], pair_cap), Strictness::Strict));
      const double ratio = qbar[i - 1] / (cfg.s(i) + 1.0);
      recs.push_back(make_record(indexed("qbar_window.lower", i),
                                 "p" + sfx + " < qbar" + sfx + "/(s" + sfx + "+1)", ratio - p,
                                 Strictness::Strict));
      recs.push_back(make_record(indexed("qbar_window.upper", i),
                                 "qbar" + sfx + "/(s" + sfx + "+1) < p" + sfx + "*",
                                 slack(ratio, pstar_i), Strictness::Strict));
    }
  } catch (const Error& e) {
    rep.derive_error = e.what();
    recs.push_back(make_record("derive", std::string("auxiliary exponents: ") + e.what(), -kInf,
                               Strictness::Strict));
  }

  if (rep.structurally_admissible()) rep.constants = model_constants_unchecked(cfg);
  return rep;
}

ModelConstants model_constants_unchecked(const ExponentConfig& cfg) {
  // For A = (1/p)(1+|t|^{sp})|xi|^p one has a.xi = (1+|t|^{sp})|xi|^p = p A and
  // A_t t = s|t|^{sp}|xi|^p >= 0. Hence:
  //   (h2) A <= eta1 a.xi holds with eta1 = 1/p (max over both components);
  //   (h3) a.xi >= mu0 (1+|t|^{sp})|xi|^p is an identity with mu0 = 1;
  //   (h4) a.xi + A_t t >= mu1 a.xi holds with mu1 = 1 since A_t t >= 0;
  //   (h5) A - theta a.xi - theta A_t t - mu2 a.xi
  //          = (1/p - theta - mu2)(1+|t|^{sp})|xi|^p - theta s|t|^{sp}|xi|^p,
  //        which equals theta s |xi|^p >= 0 for mu2 = 1/p - theta(s+1).
  // Every inequality holds for all (t, xi), so R = 1 is the smallest admissible radius.
  ModelConstants c;
  c.mu0 = 1.0;
  c.mu1 = 1.0;
  c.eta1 = std::max(1.0 / cfg.p1, 1.0 / cfg.p2);
  c.mu2_1 = 1.0 / cfg.p1 - cfg.theta1 * (cfg.s1 + 1.0);
  c.mu2_2 = 1.0 / cfg.p2 - cfg.theta2 * (cfg.s2 + 1.0);
  c.R = 1.0;
  return c;
}

ModelConstants compute_model_constants(const ExponentConfig& cfg) {
  const HypothesisReport rep = check_model_hypotheses(cfg);
  if (!rep.structurally_admissible()) {
    std::string ids;
    for (const auto* r : rep.failures()) {
      if (r->tier == HypothesisTier::Structural) ids += (ids.empty() ? "" : ", ") + r->id;
    }
    throw NonAdmissibleConfig("configuration violates " + ids);
  }
  return model_constants_unchecked(cfg);
}

}  // namespace quasivar
