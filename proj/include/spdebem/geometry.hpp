#ifndef SPDEBEM_GEOMETRY_HPP
#define SPDEBEM_GEOMETRY_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "spdebem/types.hpp"

namespace spdebem {

/// Closed, counterclockwise C^2 curve parametrized over t in [0, 2pi).
class BoundaryCurve {
 public:
  using Map = std::function<Point(double)>;

  /// `derivative` may be empty; a central difference with step `fd_step` is used then.
  BoundaryCurve(std::string name, Map point, Map derivative, double fd_step = 1e-6);

  const std::string& name() const { return name_; }
  Point operator()(double t) const;
  Point derivative(double t) const;
  bool analytic_derivative() const { return analytic_; }
  double fd_step() const { return fd_step_; }

  /// Uniform scale applied relative to the registry's reference shape (1 unless rescaled).
  double scale() const { return scale_; }
  void set_scale(double s) { scale_ = s; }

  /// Free-form description of how the curve was built (spline, orientation flip).
  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  /// Dense polygon through gamma(2 pi i / n), i = 0..n-1.
  std::vector<Point> polygon(int samples) const;

  /// Shoelace area of polygon(samples); positive for counterclockwise curves.
  double signed_area(int samples = 1 << 14) const;

  /// Same curve traversed with t -> -t.
  BoundaryCurve reversed() const;

  /// Flips orientation if needed so the signed area is positive. Logs to std::clog.
  BoundaryCurve counterclockwise() const;

 private:
  std::string name_;
  Map point_;
  Map derivative_;
  bool analytic_;
  double fd_step_;
  double scale_ = 1.0;
  std::string provenance_;
};

BoundaryCurve peanut_curve();

/// Unit circle centred at the origin.
BoundaryCurve unit_disc_curve();

/// Circle of radius 0.5 centred at (0.5, 0.5): the unit disc scaled by 0.5 into [0,1]^2.
BoundaryCurve unit_square_disc_curve();

/// Circle of given radius and centre.
BoundaryCurve circle_curve(Point centre, double radius);

/// Periodic cubic spline through samples listed counterclockwise (>= 64 points).
BoundaryCurve spline_curve(const std::string& name, const std::vector<Point>& samples);

/// Reads "x y" lines from `path` and builds a spline curve. Throws IoError.
BoundaryCurve load_custom_curve(const std::string& path);

/// Registry: "peanut", "disc", "disc01", "custom:<file>". Result is counterclockwise.
BoundaryCurve make_shape(const std::string& id);

/// Checks closure, regularity and non-self-intersection on `samples` points.
/// Throws DomainError describing the first violation.
void validate_curve(const BoundaryCurve& curve, int samples = 512);

// Lagrange bases on [0,1] for nodes (0, 1/2, 1) and (alpha, 1/2, 1 - alpha).
// Index i is 1-based.
double lagrange(int i, double s);
double lagrange_derivative(int i, double s);
double lagrange_hat(int i, double s, double alpha);

inline const double kDefaultAlpha = (1.0 - std::sqrt(3.0 / 5.0)) / 2.0;

struct ElementPoint {
  Point point;
  double tangent_norm;
  Point normal;
};

struct Element {
  Point v1, v2, v3;  // start, parameter midpoint, end
};

class BoundaryMesh {
 public:
  /// Equal-parameter subdivision into n_f quadratic elements.
  BoundaryMesh(const BoundaryCurve& curve, int n_f, double alpha = kDefaultAlpha);

  int size() const { return static_cast<int>(elements_.size()); }
  int dof() const { return 3 * size(); }
  double alpha() const { return alpha_; }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& element(int j) const { return elements_[static_cast<std::size_t>(j)]; }

  /// q_k for k = 1..3.
  double node_parameter(int k) const;

  /// Collocation node v~_{j,k} = m~_j(q_k); j 0-based, k 1-based. Flat index 3j + (k-1).
  Point collocation_node(int j, int k) const { return nodes_[static_cast<std::size_t>(3 * j + k - 1)]; }
  const std::vector<Point>& collocation_nodes() const { return nodes_; }

  /// m~_j(s), its speed and the outward unit normal; j 0-based, s in [0,1].
  ElementPoint element_point(int j, double s) const;

  /// Bounding-circle centre and radius of element j (used for near-field detection).
  Point element_centre(int j) const { return centres_[static_cast<std::size_t>(j)]; }
  double element_radius(int j) const { return radii_[static_cast<std::size_t>(j)]; }

 private:
  std::vector<Element> elements_;
  std::vector<Point> nodes_;
  std::vector<Point> centres_;
  std::vector<double> radii_;
  double alpha_;
};

/// True if p lies strictly inside the closed polygon (even-odd rule).
/// Points within `edge_tol` of an edge count as outside.
bool point_in_polygon(const std::vector<Point>& polygon, Point p, double edge_tol = 1e-12);

}  // namespace spdebem

#endif  // SPDEBEM_GEOMETRY_HPP
