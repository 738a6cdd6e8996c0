#include "spdebem/bem.hpp"

#include <array>

namespace spdebem {

Complex fundamental_solution(Complex kappa, Point x, Point y) {
  const double r = norm(y - x);
  if (!(r > 0.0)) throw DomainError("fundamental_solution: x and y coincide");
  return 0.25 * kI * hankel1(0, kappa * r);
}

Complex dl_kernel_diff(Complex kappa, Point d, Point nu_y) {
  const double r = norm(d);
  if (!(r > 0.0)) throw DomainError("dl_kernel: x and y coincide");
  const Complex h1 = hankel1_01(kappa * r).h1;
  return -0.25 * kI * kappa * h1 * (dot(d, nu_y) / r);
}

Complex dl_kernel(Complex kappa, Point x, Point y, Point nu_y) { return dl_kernel_diff(kappa, y - x, nu_y); }

namespace {

// Monomial form m(s) = a + b s + c s^2 of a quadratic element.
struct Quadratic {
  Point a, b, c;
  explicit Quadratic(const Element& e)
      : a(e.v1), b(-3.0 * e.v1 + 4.0 * e.v2 - 1.0 * e.v3), c(2.0 * e.v1 - 4.0 * e.v2 + 2.0 * e.v3) {}
  Point tangent(double s) const { return b + (2.0 * s) * c; }
  // m(s) - m(q) without cancellation.
  Point difference(double s, double q) const { return (s - q) * (b + (s + q) * c); }
  Point point(double s) const { return a + s * b + (s * s) * c; }
};

using Block = Eigen::Vector3cd;

Block element_integral(Complex kappa, const Quadratic& m, double alpha, Point x, const double* split,
                       const QuadratureOptions& opt) {
  auto integrand = [&](double s) -> Block {
    const Point t = m.tangent(s);
    const double speed = norm(t);
    const Point nu{t.y / speed, -t.x / speed};
    const Point d = split ? m.difference(s, *split) : m.point(s) - x;
    const Complex kernel = dl_kernel_diff(kappa, d, nu) * speed;
    return Block(kernel * lagrange_hat(1, s, alpha), kernel * lagrange_hat(2, s, alpha),
                 kernel * lagrange_hat(3, s, alpha));
  };
  if (split) {
    const std::array<double, 1> cut{*split};
    return gauss_kronrod(integrand, 0.0, 1.0, std::span<const double>(cut), opt).value;
  }
  return gauss_kronrod(integrand, 0.0, 1.0, opt).value;
}

}  // namespace

NepMatrixAssembler::NepMatrixAssembler(BoundaryMesh mesh, QuadratureOptions options)
    : mesh_(std::move(mesh)), options_(options) {}

Eigen::Vector3cd NepMatrixAssembler::entry_block(Complex kappa, int row, int element) const {
  const int i = row / 3;
  const int l = row % 3 + 1;
  const Quadratic m(mesh_.element(element));
  const double q = mesh_.node_parameter(l);
  try {
    return element_integral(kappa, m, mesh_.alpha(), mesh_.collocation_node(i, l), i == element ? &q : nullptr,
                            options_);
  } catch (const QuadratureBudgetError& e) {
    throw NumericError("assembly failed for (i=" + std::to_string(i + 1) + ", j=" + std::to_string(element + 1) +
                       ", l=" + std::to_string(l) + ", k=1..3): " + e.what());
  }
}

void NepMatrixAssembler::fill_row(Complex kappa, int row, ComplexMatrix& out) const {
  for (int j = 0; j < mesh_.size(); ++j) {
    out.block<1, 3>(row, 3 * j) = entry_block(kappa, row, j).transpose();
  }
}

ComplexMatrix NepMatrixAssembler::double_layer(Complex kappa) const {
  if (kappa == Complex(0.0, 0.0)) throw DomainError("assemble: kappa must be nonzero");
  const int n = dof();
  ComplexMatrix d(n, n);
  bool failed = false;
  std::string message;
#pragma omp parallel for schedule(dynamic, 4)
  for (int row = 0; row < n; ++row) {
    try {
      fill_row(kappa, row, d);
    } catch (const std::exception& e) {
#pragma omp critical(spdebem_assembly_error)
      if (!failed) {
        failed = true;
        message = e.what();
      }
    }
  }
  if (failed) throw NumericError(message);
  return d;
}

ComplexMatrix NepMatrixAssembler::assemble(Complex kappa) const {
  ComplexMatrix m = double_layer(kappa);
  m.diagonal().array() -= 0.5;
  return m;
}

ComplexMatrix NepMatrixAssembler::assemble_serial(Complex kappa) const {
  if (kappa == Complex(0.0, 0.0)) throw DomainError("assemble: kappa must be nonzero");
  const int n = dof();
  ComplexMatrix m(n, n);
  for (int row = 0; row < n; ++row) fill_row(kappa, row, m);
  m.diagonal().array() -= 0.5;
  return m;
}

InteriorEvaluator::InteriorEvaluator(BoundaryMesh mesh, QuadratureOptions options)
    : mesh_(std::move(mesh)), options_(options) {}

ComplexVector InteriorEvaluator::coefficients(Complex kappa, Point x) const {
  ComplexVector a(mesh_.dof());
  for (int j = 0; j < mesh_.size(); ++j) {
    const Quadratic m(mesh_.element(j));
    try {
      a.segment<3>(3 * j) = element_integral(kappa, m, mesh_.alpha(), x, nullptr, options_);
    } catch (const QuadratureBudgetError& e) {
      throw NumericError("interior evaluation failed at point (" + std::to_string(x.x) + ", " +
                         std::to_string(x.y) + "): " + e.what());
    }
  }
  return a;
}

void InteriorEvaluator::evaluate_point(Complex kappa, const ComplexMatrix& densities, Point x, Eigen::Index row,
                                       ComplexMatrix& out) const {
  out.row(row) = coefficients(kappa, x).transpose() * densities;
}

ComplexMatrix InteriorEvaluator::evaluate(Complex kappa, const ComplexMatrix& densities,
                                          const std::vector<Point>& points) const {
  if (densities.rows() != mesh_.dof()) throw DomainError("evaluate: density length must be 3 n_f");
  const auto n = static_cast<Eigen::Index>(points.size());
  ComplexMatrix out(n, densities.cols());
  bool failed = false;
  std::string message;
#pragma omp parallel for schedule(dynamic, 64)
  for (Eigen::Index p = 0; p < n; ++p) {
    try {
      evaluate_point(kappa, densities, points[static_cast<std::size_t>(p)], p, out);
    } catch (const std::exception& e) {
#pragma omp critical(spdebem_evaluation_error)
      if (!failed) {
        failed = true;
        message = e.what();
      }
    }
  }
  if (failed) throw NumericError(message);
  return out;
}

ComplexMatrix InteriorEvaluator::evaluate_serial(Complex kappa, const ComplexMatrix& densities,
                                                 const std::vector<Point>& points) const {
  if (densities.rows() != mesh_.dof()) throw DomainError("evaluate: density length must be 3 n_f");
  ComplexMatrix out(static_cast<Eigen::Index>(points.size()), densities.cols());
  for (std::size_t p = 0; p < points.size(); ++p) {
    evaluate_point(kappa, densities, points[p], static_cast<Eigen::Index>(p), out);
  }
  return out;
}

ComplexVector InteriorEvaluator::evaluate(Complex kappa, const ComplexVector& density,
                                          const std::vector<Point>& points) const {
  return evaluate(kappa, ComplexMatrix(density), points).col(0);
}

}  // namespace spdebem
