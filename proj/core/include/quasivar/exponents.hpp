#pragma once

#include <optional>
#include <string>
#include <vector>

namespace quasivar {

/// Exponents and parameters of one instance of the coupled model system
///
///   -div((1+|u|^{s1 p1})|grad u|^{p1-2} grad u) + s1|u|^{s1 p1-2}u|grad u|^{p1}
///       = |u|^{q1-2}u + gamma1 c*|u|^{gamma1-2}u|v|^{gamma2}
///
/// and its mirror for v, with homogeneous Dirichlet data.
struct ExponentConfig {
  int N = 2;
  double p1 = 2.0;
  double p2 = 2.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double q1 = 4.0;
  double q2 = 4.0;
  double gamma1 = 2.0;
  double gamma2 = 2.0;
  double theta1 = 0.25;
  double theta2 = 0.25;
  double c_star = 0.0;
  /// Evaluate the coupling closure as gamma1*theta1 + gamma1*theta2 >= 1
  /// (as printed) instead of gamma1*theta1 + gamma2*theta2 >= 1.
  bool exj01_literal = false;

  double p(int i) const { return i == 1 ? p1 : p2; }
  double s(int i) const { return i == 1 ? s1 : s2; }
  double q(int i) const { return i == 1 ? q1 : q2; }
  double gamma(int i) const { return i == 1 ? gamma1 : gamma2; }
  double theta(int i) const { return i == 1 ? theta1 : theta2; }

  /// Throws InvalidArgument when a field violates the type invariants.
  void validate() const;

  /// Returns the configuration with the indices 1 and 2 exchanged.
  ExponentConfig swapped() const;
};

struct DerivedExponents {
  double pstar1 = 0.0;
  double pstar2 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  double t5 = 0.0;
  double t6 = 0.0;
  double qbar1 = 0.0;
  double qbar2 = 0.0;
  // Open intervals t3 and t5 were chosen from.
  double t3_lower = 0.0;
  double t3_upper = 0.0;
  double t5_lower = 0.0;
  double t5_upper = 0.0;
};

struct ModelConstants {
  double eta1 = 0.0;
  double mu0 = 0.0;
  double mu1 = 0.0;
  double mu2_1 = 0.0;
  double mu2_2 = 0.0;
  double R = 1.0;
};

enum class Strictness { Strict, NonStrict };

/// Hypotheses are grouped by what they gate. Theorem-tier records are the
/// extra conditions of the model multiplicity theorem (s_i p_i > 1 and one
/// p_i < N). Structural-tier records are the ones the variational machinery
/// needs (growth window, coupling, Young exponents).
enum class HypothesisTier { Theorem, Structural };

struct HypothesisRecord {
  std::string id;
  std::string statement;
  bool satisfied = false;
  /// Signed slack, positive when the inequality holds strictly.
  double margin = 0.0;
  Strictness strictness = Strictness::Strict;
  HypothesisTier tier = HypothesisTier::Structural;
  bool vacuous = false;
};

struct HypothesisReport {
  std::vector<HypothesisRecord> records;
  std::optional<DerivedExponents> derived;
  std::optional<ModelConstants> constants;
  std::string derive_error;

  bool admissible() const;
  /// All structural-tier records hold; theorem-tier records may fail.
  bool structurally_admissible() const;
  const HypothesisRecord* find(const std::string& id) const;
  std::vector<const HypothesisRecord*> failures() const;
};

/// Critical Sobolev exponent N p / (N - p), or +inf when p >= N.
double critical_exponent(double p, int N);

DerivedExponents derive_auxiliary_exponents(const ExponentConfig& cfg);

HypothesisReport check_model_hypotheses(const ExponentConfig& cfg);

/// Throws NonAdmissibleConfig unless the structural hypotheses hold.
ModelConstants compute_model_constants(const ExponentConfig& cfg);

/// Closed-form constants without the admissibility gate.
ModelConstants model_constants_unchecked(const ExponentConfig& cfg);

/// The upper limit (p_i/N)(1 - 1/(p_i^*(s_i+1))) p_j^*(s_j+1) of the
/// cross-growth exponents; +inf when p_j >= N.
double cross_growth_bound(const ExponentConfig& cfg, int i);

}  // namespace quasivar
