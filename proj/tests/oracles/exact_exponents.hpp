#pragma once

#include <boost/multiprecision/cpp_int.hpp>

// Exact rational evaluation of the exponent formulas, used as the oracle for
// the floating-point implementation.
namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

struct ExactConfig {
  Rational N, p1, p2, s1, s2, q1, q2, gamma1, gamma2, theta1, theta2;
};

struct ExactDerived {
  Rational pstar1, pstar2;  // finite in the configurations used here (p < N)
  Rational t1, t2, t3, t4, t5, t6, qbar1, qbar2;
  Rational t3_lower, t3_upper, t5_lower, t5_upper;
};

inline Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

inline ExactDerived exact_derive(const ExactConfig& c) {
  ExactDerived d;
  d.pstar1 = c.N * c.p1 / (c.N - c.p1);
  d.pstar2 = c.N * c.p2 / (c.N - c.p2);
  d.t1 = c.gamma2 * (c.q1 - 1) / (c.q1 - c.gamma1);
  d.t2 = c.gamma1 * (c.q2 - 1) / (c.q2 - c.gamma2);
  const Rational a1 = c.p1 * d.pstar2 * (c.s2 + 1);
  d.t3_lower = a1 / (a1 - c.N * d.t1);
  d.t3_upper = d.pstar1 * (c.s1 + 1);
  const Rational a2 = c.p2 * d.pstar1 * (c.s1 + 1);
  d.t5_lower = a2 / (a2 - c.N * d.t2);
  d.t5_upper = d.pstar2 * (c.s2 + 1);
  d.t3 = (d.t3_lower + d.t3_upper) / 2;
  d.t5 = (d.t5_lower + d.t5_upper) / 2;
  d.t4 = d.t1 * d.t3 / (d.t3 - 1);
  d.t6 = d.t2 * d.t5 / (d.t5 - 1);
  d.qbar1 = rmax(rmax(c.q1, d.t3), d.t6);
  d.qbar2 = rmax(rmax(c.q2, d.t4), d.t5);
  return d;
}

// Right-hand side of the cross-growth condition for index i.
inline Rational exact_cross_bound(const ExactConfig& c, const ExactDerived& d, int i) {
  const Rational& p = i == 1 ? c.p1 : c.p2;
  const Rational& pstar_i = i == 1 ? d.pstar1 : d.pstar2;
  const Rational& pstar_j = i == 1 ? d.pstar2 : d.pstar1;
  const Rational& s_i = i == 1 ? c.s1 : c.s2;
  const Rational& s_j = i == 1 ? c.s2 : c.s1;
  return p / c.N * (1 - 1 / (pstar_i * (s_i + 1))) * pstar_j * (s_j + 1);
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }

}  // namespace oracle
