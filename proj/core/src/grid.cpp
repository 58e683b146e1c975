#include "quasivar/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

#include "quasivar/error.hpp"
#include "quasivar/exponents.hpp"

namespace quasivar {
namespace {

Element make_triangle(const Grid& g, std::size_t a, std::size_t b, std::size_t c) {
  Element e;
  e.nodes = {a, b, c};
  e.node_count = 3;
  const Vec2 P[3] = {g.node_position(a), g.node_position(b), g.node_position(c)};
  const double det = (P[1][0] - P[0][0]) * (P[2][1] - P[0][1]) -
                     (P[2][0] - P[0][0]) * (P[1][1] - P[0][1]);
  e.volume = 0.5 * std::abs(det);
  for (int k = 0; k < 3; ++k) {
    const Vec2& q1 = P[(k + 1) % 3];
    const Vec2& q2 = P[(k + 2) % 3];
    e.shape_gradients[k] = {(q1[1] - q2[1]) / det, (q2[0] - q1[0]) / det};
  }
  e.centroid = {(P[0][0] + P[1][0] + P[2][0]) / 3.0, (P[0][1] + P[1][1] + P[2][1]) / 3.0};
  return e;
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!a.same_grid(b)) throw InvalidArgument("grid functions live on different grids");
}

}  // namespace

Grid::Grid(int dimension, int n) : dimension_(dimension), n_(n) {
  if (dimension != 1 && dimension != 2) throw InvalidArgument("grid dimension must be 1 or 2");
  if (n < 3) throw InvalidArgument("grid needs at least 3 nodes per axis");
  h_ = 1.0 / (n - 1);
  node_count_ = dimension == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  boundary_.assign(node_count_, 0);

  if (dimension == 1) {
    boundary_[0] = boundary_[n - 1] = 1;
    elements_.reserve(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
      Element e;
      e.nodes = {node_index(i), node_index(i + 1), 0};
      e.node_count = 2;
      e.volume = h_;
      e.centroid = {(i + 0.5) * h_, 0.0};
      e.shape_gradients[0] = {-1.0 / h_, 0.0};
      e.shape_gradients[1] = {1.0 / h_, 0.0};
      elements_.push_back(e);
    }
  } else {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (i == 0 || j == 0 || i == n - 1 || j == n - 1) boundary_[node_index(i, j)] = 1;
      }
    }
    elements_.reserve(2 * static_cast<std::size_t>(n - 1) * (n - 1));
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i + 1 < n; ++i) {
        const std::size_t a = node_index(i, j);
        const std::size_t b = node_index(i + 1, j);
        const std::size_t c = node_index(i + 1, j + 1);
        const std::size_t d = node_index(i, j + 1);
        if ((i + j) % 2 == 0) {
          elements_.push_back(make_triangle(*this, a, b, c));
          elements_.push_back(make_triangle(*this, a, c, d));
        } else {
          elements_.push_back(make_triangle(*this, a, b, d));
          elements_.push_back(make_triangle(*this, b, c, d));
        }
      }
    }
  }
  for (std::size_t k = 0; k < node_count_; ++k) {
    if (!boundary_[k]) interior_.push_back(k);
  }
}

Vec2 Grid::node_position(std::size_t node) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  if (dimension_ == 1) return {static_cast<double>(node) * h_, 0.0};
  return {static_cast<double>(node % n) * h_, static_cast<double>(node / n) * h_};
}

std::size_t Grid::mirror(std::size_t node, int axis) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  if (dimension_ == 1) return axis == 0 ? n - 1 - node : node;
  const std::size_t i = node % n;
  const std::size_t j = node / n;
  return axis == 0 ? j * n + (n - 1 - i) : (n - 1 - j) * n + i;
}

GridFunction::GridFunction(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw InvalidArgument("null grid");
  values_.assign(grid_->node_count(), 0.0);
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("null grid");
  if (values_.size() != grid_->node_count()) throw InvalidArgument("value count does not match grid");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (grid_->is_boundary(k) && values_[k] != 0.0) {
      throw InvalidArgument("grid function must vanish on the boundary");
    }
  }
}

GridFunction GridFunction::interpolate(GridPtr grid, const std::function<double(const Vec2&)>& f) {
  GridFunction gf(grid);
  for (std::size_t k : grid->interior_nodes()) gf.values_[k] = f(grid->node_position(k));
  return gf;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& x : values_) x *= c;
  return *this;
}

GridFunction& GridFunction::axpy(double c, const GridFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += c * o.values_[k];
  return *this;
}

GridFunction GridFunction::operator-() const {
  GridFunction r = *this;
  for (double& x : r.values_) x = -x;
  return r;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

double nodal_dot(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

FieldPair::FieldPair(GridFunction u_, GridFunction v_) : u(std::move(u_)), v(std::move(v_)) {
  require_same_grid(u, v);
}

FieldPair& FieldPair::operator+=(const FieldPair& o) {
  u += o.u;
  v += o.v;
  return *this;
}

FieldPair& FieldPair::operator-=(const FieldPair& o) {
  u -= o.u;
  v -= o.v;
  return *this;
}

FieldPair& FieldPair::operator*=(double c) {
  u *= c;
  v *= c;
  return *this;
}

FieldPair& FieldPair::axpy(double c, const FieldPair& o) {
  u.axpy(c, o.u);
  v.axpy(c, o.v);
  return *this;
}

FieldPair FieldPair::operator-() const { return FieldPair(-u, -v); }

FieldPair operator+(FieldPair a, const FieldPair& b) { return a += b; }
FieldPair operator-(FieldPair a, const FieldPair& b) { return a -= b; }
FieldPair operator*(double c, FieldPair a) { return a *= c; }

double nodal_dot(const FieldPair& a, const FieldPair& b) {
  return nodal_dot(a.u, b.u) + nodal_dot(a.v, b.v);
}

double integrate(const Grid& grid, const std::function<double(const Vec2&)>& f) {
  double sum = 0.0;
  for (const Element& e : grid.elements()) sum += e.volume * f(e.centroid);
  return sum;
}

std::vector<double> element_values(const GridFunction& gf) {
  const auto& elems = gf.grid().elements();
  std::vector<double> out(elems.size());
  for (std::size_t k = 0; k < elems.size(); ++k) out[k] = element_value(elems[k], gf.values());
  return out;
}

std::vector<Vec2> gradient_at_quadrature(const GridFunction& gf) {
  const auto& elems = gf.grid().elements();
  std::vector<Vec2> out(elems.size());
  for (std::size_t k = 0; k < elems.size(); ++k) out[k] = element_gradient(elems[k], gf.values());
  return out;
}

double norm_W(const GridFunction& gf, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("norm_W: p must be >= 1");
  double sum = 0.0;
  for (const Element& e : gf.grid().elements()) {
    const Vec2 g = element_gradient(e, gf.values());
    sum += e.volume * std::pow(std::sqrt(dot(g, g)), p);
  }
  return std::pow(sum, 1.0 / p);
}

double norm_Lp(const GridFunction& gf, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("norm_Lp: p must be >= 1");
  double sum = 0.0;
  for (const Element& e : gf.grid().elements()) {
    sum += e.volume * std::pow(std::abs(element_value(e, gf.values())), p);
  }
  return std::pow(sum, 1.0 / p);
}

double norm_Linf(const GridFunction& gf) {
  double m = 0.0;
  for (double x : gf.values()) m = std::max(m, std::abs(x));
  return m;
}

GridFunction power_map(const GridFunction& gf, double s) {
  if (!(s >= 0.0)) throw InvalidArgument("power_map: s must be >= 0");
  GridFunction out = gf;
  if (s == 0.0) return out;
  for (double& t : out.mutable_values()) t = std::pow(std::abs(t), s) * t;
  return out;
}

GridFunction truncate(const GridFunction& gf, double k) {
  if (!(k > 0.0)) throw InvalidArgument("truncate: k must be > 0");
  GridFunction out = gf;
  for (double& t : out.mutable_values()) {
    if (std::abs(t) > k) t = t > 0.0 ? k : -k;
  }
  return out;
}

FieldPair truncate_pair(const FieldPair& fp, double k) {
  return FieldPair(truncate(fp.u, k), truncate(fp.v, k));
}

double pair_norm_W(const FieldPair& fp, double p1, double p2) {
  return norm_W(fp.u, p1) + norm_W(fp.v, p2);
}

double ell_component(const GridFunction& gf, double p, double s) {
  return std::max(norm_W(gf, p), norm_W(power_map(gf, s), p));
}

double ell_norm(const FieldPair& fp, double p1, double p2, double s1, double s2) {
  const double plain = pair_norm_W(fp, p1, p2);
  const double mapped = norm_W(power_map(fp.u, s1), p1) + norm_W(power_map(fp.v, s2), p2);
  return std::max(plain, mapped);
}

double ell_norm(const FieldPair& fp, const ExponentConfig& cfg) {
  return ell_norm(fp, cfg.p1, cfg.p2, cfg.s1, cfg.s2);
}

void write_field(std::ostream& os, const GridFunction& gf) {
  const Grid& g = gf.grid();
  char buf[128];
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const Vec2 x = g.node_position(k);
    if (g.dimension() == 1) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", x[0], gf[k]);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", x[0], x[1], gf[k]);
    }
    os << buf;
  }
}

void write_field(const std::string& path, const GridFunction& gf) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_field(os, gf);
}

GridFunction random_sine_field(const GridPtr& grid, std::uint64_t seed, int max_mode, double amplitude) {
  if (max_mode < 1) throw InvalidArgument("max_mode must be at least 1");
  std::mt19937_64 rng(seed);
  const bool two_d = grid->dimension() == 2;
  std::vector<double> coeff;
  for (int k = 1; k <= max_mode; ++k)
    for (int l = 1; l <= (two_d ? max_mode : 1); ++l) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      coeff.push_back(amplitude * (2.0 * u - 1.0) / (k * k + (two_d ? l * l : 0)));
    }
  constexpr double pi = 3.14159265358979323846;
  return GridFunction::interpolate(grid, [&](const Vec2& x) {
    double s = 0.0;
    std::size_t m = 0;
    for (int k = 1; k <= max_mode; ++k)
      for (int l = 1; l <= (two_d ? max_mode : 1); ++l, ++m) {
        const double sx = std::sin(k * pi * x[0]);
        s += coeff[m] * (two_d ? sx * std::sin(l * pi * x[1]) : sx);
      }
    return s;
  });
}

GridFunction random_positive_field(const GridPtr& grid, std::uint64_t seed, int max_mode, double amplitude) {
  const GridFunction rho = random_sine_field(grid, seed, max_mode, 1.0);
  const double scale = norm_Linf(rho);
  constexpr double pi = 3.14159265358979323846;
  const bool two_d = grid->dimension() == 2;
  GridFunction out = GridFunction::interpolate(grid, [&](const Vec2& x) {
    return std::sin(pi * x[0]) * (two_d ? std::sin(pi * x[1]) : 1.0);
  });
  auto& v = out.mutable_values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= amplitude * (1.0 + 0.5 * (scale > 0.0 ? rho[k] / scale : 0.0));
  return out;
}

}  // namespace quasivar
