#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace quasivar::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(value))
    throw ConfigError("invalid number for '" + key + "': " + text);
  return value;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError("invalid unsigned integer for '" + key + "': " + text);
  return value;
}

int to_int(const std::string& key, const std::string& text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("invalid integer for '" + key + "': " + text);
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean for '" + key + "': " + text);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

template <class T>
Field real(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = to_double(k, v); },
          [member](const RunConfig& c) { return fmt(c.*member); }};
}

Field real_exp(double ExponentConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            c.exponents.*member = to_double(k, v);
          },
          [member](const RunConfig& c) { return fmt(c.exponents.*member); }};
}

Field count_field(std::size_t RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            c.*member = static_cast<std::size_t>(to_u64(k, v));
          },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field int_field(int RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = to_int(k, v); },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["N"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.exponents.N = to_int(k, v); },
              [](const RunConfig& c) { return std::to_string(c.exponents.N); }};
    t["p1"] = real_exp(&ExponentConfig::p1);
    t["p2"] = real_exp(&ExponentConfig::p2);
    t["s1"] = real_exp(&ExponentConfig::s1);
    t["s2"] = real_exp(&ExponentConfig::s2);
    t["q1"] = real_exp(&ExponentConfig::q1);
    t["q2"] = real_exp(&ExponentConfig::q2);
    t["gamma1"] = real_exp(&ExponentConfig::gamma1);
    t["gamma2"] = real_exp(&ExponentConfig::gamma2);
    t["theta1"] = real_exp(&ExponentConfig::theta1);
    t["theta2"] = real_exp(&ExponentConfig::theta2);
    t["c_star"] = real_exp(&ExponentConfig::c_star);
    t["exj01_literal"] = {
        [](RunConfig& c, const std::string& k, const std::string& v) { c.exponents.exj01_literal = to_bool(k, v); },
        [](const RunConfig& c) { return std::string(c.exponents.exj01_literal ? "true" : "false"); }};
    t["dimension"] = int_field(&RunConfig::dimension);
    t["n"] = int_field(&RunConfig::n);
    t["tol"] = real(&RunConfig::tol);
    t["max_iters"] = count_field(&RunConfig::max_iters);
    t["path_points"] = count_field(&RunConfig::path_points);
    t["seed"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    t["seeds"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                    c.seeds.clear();
                    std::stringstream ss(v);
                    std::string item;
                    while (std::getline(ss, item, ',')) c.seeds.push_back(to_u64(k, trim(item)));
                  },
                  [](const RunConfig& c) {
                    std::string s;
                    for (std::size_t i = 0; i < c.seeds.size(); ++i)
                      s += (i ? "," : "") + std::to_string(c.seeds[i]);
                    return s;
                  }};
    t["count"] = count_field(&RunConfig::count);
    t["epsilon_reg"] = real(&RunConfig::epsilon_reg);
    t["r0"] = real(&RunConfig::r0);
    t["n_samples"] = count_field(&RunConfig::n_samples);
    t["nontrivial_floor"] = real(&RunConfig::nontrivial_floor);
    t["dedup_tol"] = real(&RunConfig::dedup_tol);
    t["armijo_c"] = real(&RunConfig::armijo_c);
    t["stencil"] = int_field(&RunConfig::stencil);
    t["reparam_every"] = count_field(&RunConfig::reparam_every);
    t["eigen_tol"] = real(&RunConfig::eigen_tol);
    t["eigen_max_iter"] = count_field(&RunConfig::eigen_max_iter);
    t["gradcheck_samples"] = count_field(&RunConfig::gradcheck_samples);
    t["out"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.out = v; },
                [](const RunConfig& c) { return c.out; }};
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::validate() const {
  try {
    exponents.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (dimension != 1 && dimension != 2) throw ConfigError("dimension must be 1 or 2");
  if (n < 3) throw ConfigError("n must be at least 3");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (path_points < 3) throw ConfigError("path_points must be at least 3");
  if (!(r0 > 0.0)) throw ConfigError("r0 must be positive");
  if (n_samples == 0) throw ConfigError("n_samples must be positive");
  if (!(epsilon_reg >= 0.0)) throw ConfigError("epsilon_reg must be non-negative");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must lie in (0, 1)");
  if (stencil < 0) throw ConfigError("stencil must be non-negative");
  if (!(eigen_tol > 0.0)) throw ConfigError("eigen_tol must be positive");
  if (!(dedup_tol > 0.0)) throw ConfigError("dedup_tol must be positive");
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = fields().find(key);
    if (it == fields().end())
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    if (value.empty() && key != "out")
      throw ConfigError("line " + std::to_string(lineno) + ": missing value for '" + key + "'");
    it->second.set(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_run_config(in);
}

std::string canonical_form(const RunConfig& cfg) {
  std::string s;
  for (const auto& [key, field] : fields()) s += key + "=" + field.get(cfg) + "\n";
  return s;
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : canonical_form(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace quasivar::cli
