#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "quasivar/exponents.hpp"

namespace quasivar::cli {

/// Raised for malformed config files and unknown keys (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contents of a `key = value` run configuration. Keys match the field names.
struct RunConfig {
  ExponentConfig exponents;
  int dimension = 2;
  int n = 65;
  double tol = 1e-6;
  std::size_t max_iters = 10000;
  std::size_t path_points = 33;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;
  std::size_t count = 4;
  double epsilon_reg = 1e-8;
  double r0 = 0.1;
  std::size_t n_samples = 256;
  double nontrivial_floor = 1e-3;
  double dedup_tol = 1e-2;
  double armijo_c = 1e-4;
  int stencil = 0;
  std::size_t reparam_every = 50;
  double eigen_tol = 1e-10;
  std::size_t eigen_max_iter = 100000;
  std::size_t gradcheck_samples = 5;
  std::string out;

  /// Throws ConfigError on values outside their domain.
  void validate() const;
};

/// Parses the text format: one `key = value` per line, `#` starts a comment,
/// blank lines are ignored. Unknown or repeated keys are errors.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

/// Every field as `key=value`, sorted by key, numbers with 17 significant digits.
std::string canonical_form(const RunConfig& cfg);
/// FNV-1a 64-bit hash of canonical_form, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace quasivar::cli
