#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "spdebem/geometry.hpp"

using namespace spdebem;

namespace {

// Green's theorem with the trapezoidal rule, exact to rounding for smooth periodic curves.
double green_area(const BoundaryCurve& c, int n = 4096) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = kTwoPi * i / n;
    const Point p = c(t), d = c.derivative(t);
    s += 0.5 * (p.x * d.y - p.y * d.x);
  }
  return s * kTwoPi / n;
}

}  // namespace

TEST(Curves, PeanutAreaAndPlacement) {
  const auto c = make_shape("peanut");
  EXPECT_NEAR(c.signed_area(), green_area(c), 1e-6);
  EXPECT_NEAR(green_area(c), 0.5224, 5e-4);
  for (const Point& p : c.polygon(2000)) {
    EXPECT_GT(p.x, 0.0);
    EXPECT_LT(p.x, 1.0);
    EXPECT_GT(p.y, 0.0);
    EXPECT_LT(p.y, 1.0);
  }
  EXPECT_NO_THROW(validate_curve(c));
}

TEST(Curves, AnalyticDerivativeMatchesDifferences) {
  const auto c = peanut_curve();
  ASSERT_TRUE(c.analytic_derivative());
  for (double t : {0.0, 0.7, 2.1, 4.4, 6.0}) {
    const double h = 1e-5;
    const Point fd = (c(t + h) - c(t - h)) * (1.0 / (2.0 * h));
    EXPECT_LT(norm(fd - c.derivative(t)), 1e-8);
  }
}

TEST(Curves, DiscVariants) {
  EXPECT_NEAR(make_shape("disc").signed_area(), kPi, 1e-6);
  const auto d = make_shape("disc01");
  EXPECT_NEAR(d.signed_area(), kPi / 4.0, 1e-6);
  EXPECT_DOUBLE_EQ(d.scale(), 0.5);
  EXPECT_LT(norm(d(0.0) - Point{1.0, 0.5}), 1e-15);
  EXPECT_THROW(make_shape("hexagon"), DomainError);
}

TEST(Curves, OrientationIsNormalized) {
  const auto cw = unit_disc_curve().reversed();
  EXPECT_LT(cw.signed_area(), 0.0);
  EXPECT_GT(cw.counterclockwise().signed_area(), 0.0);
}

TEST(Curves, SplineThroughCircleSamples) {
  std::vector<Point> s;
  for (int i = 0; i < 128; ++i) s.push_back({std::cos(kTwoPi * i / 128), std::sin(kTwoPi * i / 128)});
  const auto c = spline_curve("ring", s);
  for (double t = 0.05; t < kTwoPi; t += 0.37) EXPECT_NEAR(norm(c(t)), 1.0, 1e-6);
  EXPECT_NEAR(c.signed_area(), kPi, 1e-5);
  s.resize(40);
  EXPECT_THROW(spline_curve("few", s), DomainError);
}

TEST(Curves, CustomFileRoundTrip) {
  const std::string path = ::testing::TempDir() + "/ellipse.txt";
  {
    std::ofstream out(path);
    out << "# ellipse 0.3 x 0.2 around (0.5, 0.5)\n";
    for (int i = 0; i < 200; ++i) out << 0.5 + 0.3 * std::cos(kTwoPi * i / 200) << " " << 0.5 + 0.2 * std::sin(kTwoPi * i / 200) << "\n";
  }
  const auto c = make_shape("custom:" + path);
  EXPECT_NEAR(c.signed_area(), kPi * 0.3 * 0.2, 1e-5);
  EXPECT_THROW(make_shape("custom:/nonexistent/file"), IoError);
  std::remove(path.c_str());
}

TEST(Curves, SelfIntersectionRejected) {
  const BoundaryCurve eight("eight", [](double t) { return Point{std::sin(t), std::sin(t) * std::cos(t)}; }, {});
  EXPECT_THROW(validate_curve(eight), DomainError);
}

TEST(Lagrange, NodalAndPartitionOfUnity) {
  const double nodes[] = {0.0, 0.5, 1.0};
  const double a = kDefaultAlpha;
  const double hat_nodes[] = {a, 0.5, 1.0 - a};
  for (int i = 1; i <= 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(lagrange(i, nodes[k]), i - 1 == k ? 1.0 : 0.0, 1e-15);
      EXPECT_NEAR(lagrange_hat(i, hat_nodes[k], a), i - 1 == k ? 1.0 : 0.0, 1e-14);
    }
  }
  for (double s : {0.1, 0.33, 0.8}) {
    EXPECT_NEAR(lagrange(1, s) + lagrange(2, s) + lagrange(3, s), 1.0, 1e-15);
    EXPECT_NEAR(lagrange_hat(1, s, a) + lagrange_hat(2, s, a) + lagrange_hat(3, s, a), 1.0, 1e-14);
    EXPECT_NEAR(lagrange_derivative(1, s) + lagrange_derivative(2, s) + lagrange_derivative(3, s), 0.0, 1e-14);
  }
}

TEST(Mesh, NodesOnCurveAndOutwardNormals) {
  const auto c = unit_disc_curve();
  const BoundaryMesh mesh(c, 12);
  EXPECT_EQ(mesh.dof(), 36);
  EXPECT_NEAR(mesh.node_parameter(1), kDefaultAlpha, 1e-15);
  EXPECT_NEAR(mesh.node_parameter(2), 0.5, 1e-15);
  for (int j = 0; j < mesh.size(); ++j) {
    EXPECT_LT(norm(mesh.element(j).v1 - c(kTwoPi * j / 12)), 1e-14);
    for (double s : {0.0, 0.3, 1.0}) {
      const auto ep = mesh.element_point(j, s);
      EXPECT_NEAR(norm(ep.normal), 1.0, 1e-14);
      EXPECT_GT(dot(ep.normal, ep.point), 0.9);
      // quadratic interpolation of an arc of angle pi/6
      EXPECT_NEAR(norm(ep.point), 1.0, 2e-3);
    }
    EXPECT_LE(norm(mesh.collocation_node(j, 2) - mesh.element_centre(j)), mesh.element_radius(j) + 1e-14);
  }
  EXPECT_THROW(BoundaryMesh(c, 2), DomainError);
}

TEST(Polygon, StrictInterior) {
  const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_TRUE(point_in_polygon(sq, {0.5, 0.5}));
  EXPECT_FALSE(point_in_polygon(sq, {1.5, 0.5}));
  EXPECT_FALSE(point_in_polygon(sq, {1.0, 0.5}));
  EXPECT_FALSE(point_in_polygon(sq, {0.0, 0.0}));
}
