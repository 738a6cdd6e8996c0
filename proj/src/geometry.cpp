#include "spdebem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace spdebem {

BoundaryCurve::BoundaryCurve(std::string name, Map point, Map derivative, double fd_step)
    : name_(std::move(name)),
      point_(std::move(point)),
      derivative_(std::move(derivative)),
      analytic_(static_cast<bool>(derivative_)),
      fd_step_(fd_step) {
  if (!point_) throw DomainError("BoundaryCurve: empty parametrization");
}

Point BoundaryCurve::operator()(double t) const { return point_(t); }

Point BoundaryCurve::derivative(double t) const {
  if (analytic_) return derivative_(t);
  const Point forward = point_(t + fd_step_);
  const Point backward = point_(t - fd_step_);
  return (1.0 / (2.0 * fd_step_)) * (forward - backward);
}

std::vector<Point> BoundaryCurve::polygon(int samples) const {
  std::vector<Point> out(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) out[static_cast<std::size_t>(i)] = point_(kTwoPi * i / samples);
  return out;
}

double BoundaryCurve::signed_area(int samples) const {
  const auto poly = polygon(samples);
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * twice;
}

BoundaryCurve BoundaryCurve::reversed() const {
  Map p = point_;
  Map reversed_point = [p](double t) { return p(kTwoPi - t); };
  Map reversed_derivative;
  if (analytic_) {
    Map d = derivative_;
    reversed_derivative = [d](double t) { return -1.0 * d(kTwoPi - t); };
  }
  BoundaryCurve out(name_, reversed_point, reversed_derivative, fd_step_);
  out.scale_ = scale_;
  out.provenance_ = provenance_.empty() ? "orientation reversed" : provenance_ + "; orientation reversed";
  return out;
}

BoundaryCurve BoundaryCurve::counterclockwise() const {
  if (signed_area() > 0.0) return *this;
  std::clog << "spdebem: curve '" << name_ << "' is clockwise; reversing orientation\n";
  return reversed();
}

BoundaryCurve peanut_curve() {
  auto point = [](double t) {
    const double x = 0.06 * ((std::cos(t) + 2.0) * (std::cos(t + 0.6) + 2.0) *
                             (0.1 * std::cos(3.0 * t) + 2.0)) - 0.1;
    const double y = 0.06 * (std::sin(t) + 2.0) * (std::sin(t - 0.5) + 2.0) *
                     (0.4 * std::cos(2.0 * t) + 2.0) * (0.1 * std::sin(4.0 * t) + 1.0) - 0.06;
    return Point{x, y};
  };
  auto derivative = [](double t) {
    const double a = std::cos(t) + 2.0, da = -std::sin(t);
    const double b = std::cos(t + 0.6) + 2.0, db = -std::sin(t + 0.6);
    const double c = 0.1 * std::cos(3.0 * t) + 2.0, dc = -0.3 * std::sin(3.0 * t);
    const double p = std::sin(t) + 2.0, dp = std::cos(t);
    const double q = std::sin(t - 0.5) + 2.0, dq = std::cos(t - 0.5);
    const double r = 0.4 * std::cos(2.0 * t) + 2.0, dr = -0.8 * std::sin(2.0 * t);
    const double s = 0.1 * std::sin(4.0 * t) + 1.0, ds = 0.4 * std::cos(4.0 * t);
    const double dx = 0.06 * (da * b * c + a * db * c + a * b * dc);
    const double dy = 0.06 * (dp * q * r * s + p * dq * r * s + p * q * dr * s + p * q * r * ds);
    return Point{dx, dy};
  };
  return BoundaryCurve("peanut", point, derivative);
}

BoundaryCurve circle_curve(Point centre, double radius) {
  if (!(radius > 0.0)) throw DomainError("circle_curve: radius must be positive");
  auto point = [centre, radius](double t) {
    return Point{centre.x + radius * std::cos(t), centre.y + radius * std::sin(t)};
  };
  auto derivative = [radius](double t) { return Point{-radius * std::sin(t), radius * std::cos(t)}; };
  return BoundaryCurve("circle", point, derivative);
}

BoundaryCurve unit_disc_curve() {
  BoundaryCurve c = circle_curve({0.0, 0.0}, 1.0);
  return BoundaryCurve("disc", [c](double t) { return c(t); }, [c](double t) { return c.derivative(t); });
}

BoundaryCurve unit_square_disc_curve() {
  BoundaryCurve c = circle_curve({0.5, 0.5}, 0.5);
  BoundaryCurve out("disc01", [c](double t) { return c(t); }, [c](double t) { return c.derivative(t); });
  out.set_scale(0.5);
  return out;
}

namespace {

// Second derivatives of the periodic cubic spline through uniformly spaced
// values y_i (spacing h). Solves the cyclic system
//   m_{i-1} + 4 m_i + m_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h^2
// with the Sherman-Morrison correction of a tridiagonal Thomas solve.
std::vector<double> periodic_spline_moments(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = 6.0 * (y[(i + 1) % n] - 2.0 * y[i] + y[(i + n - 1) % n]) / (h * h);
  }
  // Cyclic tridiagonal with a = c = 1, b = 4, corner entries 1.
  const double gamma = -4.0;
  std::vector<double> diag(n, 4.0);
  diag[0] = 4.0 - gamma;
  diag[n - 1] = 4.0 - 1.0 / gamma;

  auto thomas = [&](std::vector<double> d) {
    std::vector<double> c_prime(n), d_prime(n);
    c_prime[0] = 1.0 / diag[0];
    d_prime[0] = d[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double denom = diag[i] - c_prime[i - 1];
      c_prime[i] = 1.0 / denom;
      d_prime[i] = (d[i] - d_prime[i - 1]) / denom;
    }
    std::vector<double> x(n);
    x[n - 1] = d_prime[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    return x;
  };

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = 1.0;
  const auto x = thomas(rhs);
  const auto z = thomas(u);
  const double factor = (x[0] + x[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = x[i] - factor * z[i];
  return m;
}

struct PeriodicSpline {
  std::vector<double> y;
  std::vector<double> m;
  double h;

  // Returns value and first derivative at parameter t (period n*h).
  std::pair<double, double> eval(double t) const {
    const std::size_t n = y.size();
    const double period = h * static_cast<double>(n);
    double tt = std::fmod(t, period);
    if (tt < 0.0) tt += period;
    auto i = static_cast<std::size_t>(tt / h);
    if (i >= n) i = n - 1;
    const double a = (tt - h * static_cast<double>(i)) / h;
    const double b = 1.0 - a;
    const std::size_t j = (i + 1) % n;
    const double value = b * y[i] + a * y[j] + ((b * b * b - b) * m[i] + (a * a * a - a) * m[j]) * h * h / 6.0;
    const double slope = (y[j] - y[i]) / h + ((3.0 * a * a - 1.0) * m[j] - (3.0 * b * b - 1.0) * m[i]) * h / 6.0;
    return {value, slope};
  }
};

}  // namespace

BoundaryCurve spline_curve(const std::string& name, const std::vector<Point>& samples) {
  if (samples.size() < 64) {
    throw DomainError("spline_curve: need at least 64 boundary samples, got " +
                      std::to_string(samples.size()));
  }
  std::vector<Point> pts = samples;
  if (norm(pts.front() - pts.back()) < 1e-14) pts.pop_back();  // explicit closing point
  const double h = kTwoPi / static_cast<double>(pts.size());
  std::vector<double> xs, ys;
  for (const Point& p : pts) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  auto sx = std::make_shared<PeriodicSpline>(PeriodicSpline{xs, periodic_spline_moments(xs, h), h});
  auto sy = std::make_shared<PeriodicSpline>(PeriodicSpline{ys, periodic_spline_moments(ys, h), h});
  BoundaryCurve out(
      name, [sx, sy](double t) { return Point{sx->eval(t).first, sy->eval(t).first}; },
      [sx, sy](double t) { return Point{sx->eval(t).second, sy->eval(t).second}; });
  out.set_provenance("periodic cubic spline through " + std::to_string(pts.size()) +
                     " uniformly parametrized samples");
  return out;
}

BoundaryCurve load_custom_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open curve file '" + path + "'");
  std::vector<Point> pts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    Point p;
    if (!(fields >> p.x >> p.y)) {
      throw IoError(path + ":" + std::to_string(line_no) + ": expected 'x y'");
    }
    pts.push_back(p);
  }
  return spline_curve("custom:" + path, pts);
}

BoundaryCurve make_shape(const std::string& id) {
  BoundaryCurve curve = [&]() {
    if (id == "peanut") return peanut_curve();
    if (id == "disc") return unit_disc_curve();
    if (id == "disc01") return unit_square_disc_curve();
    if (id.rfind("custom:", 0) == 0) return load_custom_curve(id.substr(7));
    throw DomainError("unknown shape '" + id + "' (expected peanut, disc, disc01 or custom:<file>)");
  }();
  return curve.counterclockwise();
}

void validate_curve(const BoundaryCurve& curve, int samples) {
  const double closure = norm(curve(0.0) - curve(kTwoPi));
  const double closure_tol = curve.analytic_derivative() ? 1e-12 : 1e-9;
  if (closure > closure_tol) {
    throw DomainError("curve '" + curve.name() + "' is not closed (gap " + std::to_string(closure) + ")");
  }
  const auto pts = curve.polygon(samples);
  for (int i = 0; i < samples; ++i) {
    if (!(norm(curve.derivative(kTwoPi * i / samples)) > 0.0)) {
      throw DomainError("curve '" + curve.name() + "' has a vanishing derivative");
    }
  }
  const auto n = static_cast<std::size_t>(samples);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // cyclic neighbours
      if (norm(pts[i] - pts[j]) < 1e-9) {
        throw DomainError("curve '" + curve.name() + "' self-intersects near sample " + std::to_string(i));
      }
    }
  }
}

double lagrange(int i, double s) {
  switch (i) {
    case 1: return (1.0 - s) * (1.0 - 2.0 * s);
    case 2: return 4.0 * s * (1.0 - s);
    case 3: return s * (2.0 * s - 1.0);
    default: throw DomainError("lagrange: index must be 1, 2 or 3");
  }
}

double lagrange_derivative(int i, double s) {
  switch (i) {
    case 1: return 4.0 * s - 3.0;
    case 2: return 4.0 - 8.0 * s;
    case 3: return 4.0 * s - 1.0;
    default: throw DomainError("lagrange_derivative: index must be 1, 2 or 3");
  }
}

double lagrange_hat(int i, double s, double alpha) {
  const double w = 1.0 - 2.0 * alpha;
  switch (i) {
    case 1: return ((1.0 - alpha - s) / w) * ((1.0 - 2.0 * s) / w);
    case 2: return 4.0 * (s - alpha) * (1.0 - alpha - s) / (w * w);
    case 3: return ((s - alpha) / w) * ((2.0 * s - 1.0) / w);
    default: throw DomainError("lagrange_hat: index must be 1, 2 or 3");
  }
}

BoundaryMesh::BoundaryMesh(const BoundaryCurve& curve, int n_f, double alpha) : alpha_(alpha) {
  if (n_f < 4) throw DomainError("subdivide: need at least 4 elements, got " + std::to_string(n_f));
  if (!(alpha > 0.0 && alpha < 0.5)) throw DomainError("subdivide: alpha must lie in (0, 1/2)");
  const auto n = static_cast<std::size_t>(n_f);
  elements_.resize(n);
  std::vector<Point> ends(n);
  for (std::size_t j = 0; j < n; ++j) ends[j] = curve(kTwoPi * static_cast<double>(j) / n_f);
  for (std::size_t j = 0; j < n; ++j) {
    const Point mid = curve(kTwoPi * (static_cast<double>(j) + 0.5) / n_f);
    elements_[j] = {ends[j], mid, ends[(j + 1) % n]};
  }
  nodes_.reserve(3 * n);
  centres_.reserve(n);
  radii_.reserve(n);
  for (int j = 0; j < n_f; ++j) {
    for (int k = 1; k <= 3; ++k) nodes_.push_back(element_point(j, node_parameter(k)).point);
    const Element& e = elements_[static_cast<std::size_t>(j)];
    const Point c = e.v2;
    double r = 0.0;
    for (int i = 0; i <= 16; ++i) r = std::max(r, norm(element_point(j, i / 16.0).point - c));
    centres_.push_back(c);
    radii_.push_back(r);
  }
}

double BoundaryMesh::node_parameter(int k) const {
  switch (k) {
    case 1: return alpha_;
    case 2: return 0.5;
    case 3: return 1.0 - alpha_;
    default: throw DomainError("node_parameter: k must be 1, 2 or 3");
  }
}

ElementPoint BoundaryMesh::element_point(int j, double s) const {
  const Element& e = elements_.at(static_cast<std::size_t>(j));
  const double l1 = lagrange(1, s), l2 = lagrange(2, s), l3 = lagrange(3, s);
  const double d1 = lagrange_derivative(1, s), d2 = lagrange_derivative(2, s), d3 = lagrange_derivative(3, s);
  const Point p = l1 * e.v1 + l2 * e.v2 + l3 * e.v3;
  const Point t = d1 * e.v1 + d2 * e.v2 + d3 * e.v3;
  const double speed = norm(t);
  if (!(speed > 0.0)) throw DomainError("element " + std::to_string(j) + " is degenerate");
  return {p, speed, Point{t.y / speed, -t.x / speed}};
}

bool point_in_polygon(const std::vector<Point>& polygon, Point p, double edge_tol) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = polygon[i];
    const Point b = polygon[j];
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    double u = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    if (norm(p - (a + u * ab)) <= edge_tol) return false;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace spdebem
