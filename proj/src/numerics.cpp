#include "spdebem/numerics.hpp"

#include <cmath>
#include <limits>

namespace spdebem {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Ascending series for J0, J1, Y0, Y1. Converges for all z; used where the
// cancellation loss (about e^{|Im z|} * I0(|z|) relative to |H|) is acceptable.
void series_jy(Complex z, Complex& j0, Complex& j1, Complex& y0, Complex& y1) {
  const Complex half = 0.5 * z;
  const Complex mw = -half * half;  // -(z/2)^2

  // t0_k = (-w)^k / (k!)^2, t1_k = (-w)^k / (k! (k+1)!)
  Complex t0 = 1.0;
  Complex t1 = 1.0;
  Complex s_j0 = t0;
  Complex s_j1 = t1;
  Complex s_y0 = 0.0;  // sum_{k>=1} H_k t0_k
  Complex s_y1 = t1;   // sum_{k>=0} (H_k + H_{k+1}) t1_k, H_0 = 0, H_1 = 1
  double harmonic = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double dk = static_cast<double>(k);
    t0 *= mw / (dk * dk);
    t1 *= mw / (dk * (dk + 1.0));
    harmonic += 1.0 / dk;
    const double harmonic_next = harmonic + 1.0 / (dk + 1.0);
    s_j0 += t0;
    s_j1 += t1;
    s_y0 += harmonic * t0;
    s_y1 += (harmonic + harmonic_next) * t1;
    if (std::abs(t0) * harmonic_next < 1e-17 * std::abs(s_j0) + 1e-300 &&
        std::abs(t1) * harmonic_next < 1e-17 * std::abs(s_j1) + 1e-300 && std::abs(t0) < 1e-17) {
      break;
    }
  }
  j0 = s_j0;
  j1 = half * s_j1;
  const Complex log_term = std::log(half) + kEulerGamma;
  y0 = (2.0 / kPi) * (log_term * j0 - s_y0);
  y1 = (2.0 / kPi) * log_term * j1 - 2.0 / (kPi * z) - (1.0 / kPi) * half * s_y1;
}

// Hankel's asymptotic expansion of H_nu^(1), nu in {0, 1}.
Complex asymptotic_h1(int nu, Complex z) {
  const double mu = 4.0 * nu * nu;
  const Complex inv_z = 1.0 / z;
  Complex term = 1.0;
  Complex sum = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= kI * (mu - odd * odd) / (8.0 * k) * inv_z;
    const double size = std::abs(term);
    if (size >= last) break;  // divergent tail
    sum += term;
    last = size;
    if (size < 1e-17) break;
  }
  const Complex phase = z - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * z)) * std::exp(kI * phase) * sum;
}

}  // namespace

HankelPair hankel1_01(Complex z) {
  if (z == Complex(0.0, 0.0)) {
    throw DomainError("hankel1: logarithmic singularity at z = 0");
  }
  if (std::abs(z) < kHankelCrossover) {
    Complex j0, j1, y0, y1;
    series_jy(z, j0, j1, y0, y1);
    return {j0 + kI * y0, j1 + kI * y1};
  }
  return {asymptotic_h1(0, z), asymptotic_h1(1, z)};
}

Complex hankel1(int order, Complex z) {
  if (order != 0 && order != 1) throw DomainError("hankel1: only orders 0 and 1 are supported");
  const HankelPair h = hankel1_01(z);
  return order == 0 ? h.h0 : h.h1;
}

std::pair<Complex, Complex> bessel_jy(int order, Complex z) {
  if (order != 0 && order != 1) throw DomainError("bessel_jy: only orders 0 and 1 are supported");
  if (z == Complex(0.0, 0.0)) throw DomainError("bessel_jy: Y is singular at z = 0");
  if (std::abs(z) < kHankelCrossover) {
    Complex j0, j1, y0, y1;
    series_jy(z, j0, j1, y0, y1);
    return order == 0 ? std::pair{j0, y0} : std::pair{j1, y1};
  }
  // H^(2)(z) = conj(H^(1)(conj z)) for the principal branch away from the cut.
  const Complex h1 = asymptotic_h1(order, z);
  const Complex h2 = std::conj(asymptotic_h1(order, std::conj(z)));
  return {0.5 * (h1 + h2), (h1 - h2) / (2.0 * kI)};
}

std::vector<double> simpson_weights(int resolution) {
  if (resolution < 3 || resolution % 2 == 0) {
    throw DomainError("simpson: resolution must be odd and >= 3, got " + std::to_string(resolution));
  }
  const double h = 1.0 / (resolution - 1);
  std::vector<double> w(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    double c = (i == 0 || i == resolution - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[static_cast<std::size_t>(i)] = c * h / 3.0;
  }
  return w;
}

double simpson_2d(std::span<const double> values, int resolution) {
  const auto w = simpson_weights(resolution);
  const auto r = static_cast<std::size_t>(resolution);
  if (values.size() != r * r) {
    throw DomainError("simpson_2d: grid has " + std::to_string(values.size()) +
                      " values, expected R*R = " + std::to_string(r * r));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < r; ++j) row += w[j] * values[i * r + j];
    total += w[i] * row;
  }
  return total;
}

ComplexMatrix lu_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw DomainError("lu_solve: dimension mismatch");
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = diag.maxCoeff();
  const double smallest = diag.minCoeff();
  if (!(largest > 0.0) || smallest <= 1e-14 * largest) {
    throw SingularMatrixError("lu_solve: matrix is numerically singular (pivot ratio " +
                              std::to_string(largest > 0.0 ? smallest / largest : 0.0) + ")");
  }
  ComplexMatrix x = lu.solve(b);
  if (!x.allFinite()) throw SingularMatrixError("lu_solve: non-finite solution");
  return x;
}

ThinSvd svd(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> decomposition(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {decomposition.matrixU(), decomposition.singularValues(), decomposition.matrixV()};
}

EigenDecomposition small_nonsymmetric_eig(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DomainError("small_nonsymmetric_eig: matrix must be square");
  if (a.rows() > 64) throw DomainError("small_nonsymmetric_eig: matrix larger than 64 x 64");
  if (a.rows() == 0) return {};
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, true);
  if (solver.info() != Eigen::Success) throw NumericError("small_nonsymmetric_eig: QR iteration failed");
  ComplexMatrix vectors = solver.eigenvectors();
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) vectors.col(c).normalize();
  return {solver.eigenvalues(), vectors};
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need >= 2 matched points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace spdebem
