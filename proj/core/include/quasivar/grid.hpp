#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace quasivar {

struct ExponentConfig;

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

/// Linear element: an interval in 1D or a right triangle in 2D.
struct Element {
  std::array<std::size_t, 3> nodes{};
  int node_count = 0;
  double volume = 0.0;
  Vec2 centroid{};
  /// Gradient of each local shape function (constant on the element).
  std::array<Vec2, 3> shape_gradients{};
};

/// Uniform mesh of (0,1)^d, d in {1, 2}, with n nodes per axis.
///
/// In 2D every square cell is split into two right triangles. The diagonal
/// alternates with the parity of i + j, so for odd n the triangulation is
/// invariant under x -> 1-x and y -> 1-y. For p = 2 the stiffness matrix of
/// this mesh is the 5-point Laplacian.
class Grid {
 public:
  Grid(int dimension, int n);

  static std::shared_ptr<const Grid> make(int dimension, int n) {
    return std::make_shared<const Grid>(dimension, n);
  }

  int dimension() const { return dimension_; }
  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t node_count() const { return node_count_; }
  std::size_t node_index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
  }
  Vec2 node_position(std::size_t node) const;
  bool is_boundary(std::size_t node) const { return boundary_[node] != 0; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<std::size_t>& interior_nodes() const { return interior_; }

  /// Node reflected through the plane x_axis = 1/2.
  std::size_t mirror(std::size_t node, int axis) const;
  /// True when the element set is invariant under both reflections.
  bool reflection_symmetric() const { return dimension_ == 1 || n_ % 2 == 1; }

 private:
  int dimension_;
  int n_;
  double h_;
  std::size_t node_count_;
  std::vector<char> boundary_;
  std::vector<std::size_t> interior_;
  std::vector<Element> elements_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline bool operator==(const Grid& a, const Grid& b) {
  return a.dimension() == b.dimension() && a.n() == b.n();
}

/// Nodal field with homogeneous Dirichlet trace.
class GridFunction {
 public:
  explicit GridFunction(GridPtr grid);
  /// Throws InvalidArgument if a boundary value is non-zero or sizes mismatch.
  GridFunction(GridPtr grid, std::vector<double> values);

  /// Nodal interpolant of f; boundary nodes are set to zero.
  static GridFunction interpolate(GridPtr grid, const std::function<double(const Vec2&)>& f);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  /// Callers must leave boundary entries at zero.
  std::vector<double>& mutable_values() { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  std::size_t size() const { return values_.size(); }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double c);
  /// this += c * o
  GridFunction& axpy(double c, const GridFunction& o);
  GridFunction operator-() const;

  bool same_grid(const GridFunction& o) const { return grid_ == o.grid_ || *grid_ == *o.grid_; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

/// Nodal inner product (plain sum over nodes).
double nodal_dot(const GridFunction& a, const GridFunction& b);

struct FieldPair {
  GridFunction u;
  GridFunction v;

  explicit FieldPair(GridPtr grid) : u(grid), v(std::move(grid)) {}
  FieldPair(GridFunction u_, GridFunction v_);

  const Grid& grid() const { return u.grid(); }
  const GridPtr& grid_ptr() const { return u.grid_ptr(); }

  FieldPair& operator+=(const FieldPair& o);
  FieldPair& operator-=(const FieldPair& o);
  FieldPair& operator*=(double c);
  FieldPair& axpy(double c, const FieldPair& o);
  FieldPair operator-() const;
};

FieldPair operator+(FieldPair a, const FieldPair& b);
FieldPair operator-(FieldPair a, const FieldPair& b);
FieldPair operator*(double c, FieldPair a);

double nodal_dot(const FieldPair& a, const FieldPair& b);

/// Composite midpoint rule: sum over elements of volume * f(centroid).
double integrate(const Grid& grid, const std::function<double(const Vec2&)>& f);

/// Values at element centroids (nodal average of the element's vertices).
std::vector<double> element_values(const GridFunction& gf);
/// Element-constant gradient of the piecewise-linear interpolant.
std::vector<Vec2> gradient_at_quadrature(const GridFunction& gf);

inline Vec2 element_gradient(const Element& e, std::span<const double> values) {
  Vec2 g{0.0, 0.0};
  for (int k = 0; k < e.node_count; ++k) {
    const double y = values[e.nodes[k]];
    g[0] += y * e.shape_gradients[k][0];
    g[1] += y * e.shape_gradients[k][1];
  }
  return g;
}

inline double element_value(const Element& e, std::span<const double> values) {
  double s = 0.0;
  for (int k = 0; k < e.node_count; ++k) s += values[e.nodes[k]];
  return s / e.node_count;
}

/// Seeded random combination of sin(k pi x) (times sin(l pi y)), k, l <= max_mode,
/// with coefficients uniform in [-amplitude, amplitude] damped by 1/(k^2 + l^2).
/// Bit-reproducible across platforms for a fixed seed.
GridFunction random_sine_field(const GridPtr& grid, std::uint64_t seed, int max_mode = 4,
                               double amplitude = 1.0);

/// Seeded field that is positive in the interior: the first sine mode times
/// 1 + rho/2 with rho a random_sine_field scaled to max |rho| = 1, then scaled
/// by amplitude. Away from the peak and the boundary neither the value nor
/// the gradient of such a field comes close to zero on any element.
GridFunction random_positive_field(const GridPtr& grid, std::uint64_t seed, int max_mode = 4,
                                   double amplitude = 1.0);

/// (integral of |grad gf|^p)^(1/p)
double norm_W(const GridFunction& gf, double p);
/// (integral of |gf|^p)^(1/p), centroid quadrature
double norm_Lp(const GridFunction& gf, double p);
/// max nodal |gf|
double norm_Linf(const GridFunction& gf);

/// Nodal map t -> |t|^s t.
GridFunction power_map(const GridFunction& gf, double s);

/// Nodal map t -> t if |t| <= k, else k t/|t|.
GridFunction truncate(const GridFunction& gf, double k);
FieldPair truncate_pair(const FieldPair& fp, double k);

/// ||u||_{W_1} + ||v||_{W_2}
double pair_norm_W(const FieldPair& fp, double p1, double p2);

/// max{ ||y||_W, || |y|^s y ||_W } for one component.
double ell_component(const GridFunction& gf, double p, double s);

/// max{ ||(u,v)||_W, ||(|u|^{s1}u, |v|^{s2}v)||_W }
double ell_norm(const FieldPair& fp, double p1, double p2, double s1, double s2);
double ell_norm(const FieldPair& fp, const ExponentConfig& cfg);

/// One line per node, "x value" (1D) or "x y value" (2D), 17 significant
/// digits, LF newlines, nodes in row-major order (x fastest).
void write_field(std::ostream& os, const GridFunction& gf);
void write_field(const std::string& path, const GridFunction& gf);

}  // namespace quasivar
