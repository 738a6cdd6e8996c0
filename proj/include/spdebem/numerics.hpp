#ifndef SPDEBEM_NUMERICS_HPP
#define SPDEBEM_NUMERICS_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "spdebem/types.hpp"

namespace spdebem {

// ---------------------------------------------------------------------------
// Hankel functions of the first kind, orders 0 and 1, principal branch.
//
// Power series below |z| = kHankelCrossover, Hankel's asymptotic expansion
// above it. Relative accuracy is about 1e-11 for |z| <= 1e3 and |Im z| small
// compared to |z|.
// ---------------------------------------------------------------------------

inline constexpr double kHankelCrossover = 12.0;

struct HankelPair {
  Complex h0;
  Complex h1;
};

/// H_0^(1)(z) and H_1^(1)(z) together; both share most of the work.
HankelPair hankel1_01(Complex z);

/// H_order^(1)(z) for order 0 or 1. Throws DomainError for z == 0 or other orders.
Complex hankel1(int order, Complex z);

/// J_order(z) and Y_order(z) for order 0/1 (real and imaginary part of H for real z).
std::pair<Complex, Complex> bessel_jy(int order, Complex z);

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7/15) quadrature.
// ---------------------------------------------------------------------------

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_evaluations = 10000;
};

template <class Value>
struct QuadratureResult {
  Value value{};
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Thrown when the evaluation budget is exhausted; carries the best estimate.
class QuadratureBudgetError : public NumericError {
 public:
  QuadratureBudgetError(const std::string& what, double best_error, int evaluations)
      : NumericError(what), best_error_(best_error), evaluations_(evaluations) {}
  double best_error() const { return best_error_; }
  int evaluations() const { return evaluations_; }

 private:
  double best_error_;
  int evaluations_;
};

template <class Value>
class QuadratureBudgetErrorWithValue : public QuadratureBudgetError {
 public:
  QuadratureBudgetErrorWithValue(const std::string& what, Value best, double err, int evals)
      : QuadratureBudgetError(what, err, evals), best_(std::move(best)) {}
  const Value& best_estimate() const { return best_; }

 private:
  Value best_;
};

namespace detail {

// Abscissae and weights of the 15-point Kronrod rule and the embedded 7-point
// Gauss rule on [-1, 1] (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Complex& v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

template <class Value>
Value zero_like(const Value& v) {
  if constexpr (std::is_arithmetic_v<Value> || std::is_same_v<Value, Complex>) {
    return Value{};
  } else {
    return Value::Zero(v.rows(), v.cols());
  }
}

template <class Value>
struct Panel {
  double a;
  double b;
  Value value;
  double error;
};

template <class Value, class F>
Panel<Value> kronrod_panel(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Value fc = f(center);
  Value kronrod = fc * kWgk[7];
  Value gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    Value f1 = f(center - dx);
    Value f2 = f(center + dx);
    Value sum = f1 + f2;
    kronrod += sum * kWgk[j];
    if (j % 2 == 1) gauss += sum * kWg[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  const double err = magnitude(Value(kronrod - gauss));
  return {a, b, std::move(kronrod), err};
}

}  // namespace detail

/// Integrates f over [a, b] split at the given interior breakpoints.
/// Subdivides the panel with the largest error estimate until the total
/// estimate is below max(abs_tol, rel_tol * |value|).
template <class F>
auto gauss_kronrod(F&& f, double a, double b, std::span<const double> breakpoints,
                   const QuadratureOptions& opt = {})
    -> QuadratureResult<std::decay_t<decltype(f(a))>> {
  using Value = std::decay_t<decltype(f(a))>;
  using detail::Panel;

  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 2);
  cuts.push_back(a);
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  auto worse = [](const Panel<Value>& l, const Panel<Value>& r) { return l.error < r.error; };
  std::vector<Panel<Value>> heap;
  int evaluations = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    heap.push_back(detail::kronrod_panel<Value>(f, cuts[i], cuts[i + 1]));
    evaluations += 15;
  }
  if (heap.empty()) return {};
  std::make_heap(heap.begin(), heap.end(), worse);

  auto totals = [&heap]() {
    Value v = detail::zero_like(heap.front().value);
    double e = 0.0;
    for (const auto& p : heap) {
      v += p.value;
      e += p.error;
    }
    return std::pair<Value, double>{v, e};
  };

  auto [value, error] = totals();
  while (error > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(value))) {
    if (evaluations + 30 > opt.max_evaluations) {
      throw QuadratureBudgetErrorWithValue<Value>(
          "gauss_kronrod: evaluation budget exhausted (error estimate " +
              std::to_string(error) + ")",
          value, error, evaluations);
    }
    std::pop_heap(heap.begin(), heap.end(), worse);
    Panel<Value> worst = std::move(heap.back());
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    heap.push_back(detail::kronrod_panel<Value>(f, worst.a, mid));
    std::push_heap(heap.begin(), heap.end(), worse);
    heap.push_back(detail::kronrod_panel<Value>(f, mid, worst.b));
    std::push_heap(heap.begin(), heap.end(), worse);
    evaluations += 30;
    // Running sums drift; recomputing is cheap next to the integrand.
    std::tie(value, error) = totals();
  }
  return {std::move(value), error, evaluations};
}

template <class F>
auto gauss_kronrod(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  return gauss_kronrod(std::forward<F>(f), a, b, std::span<const double>{}, opt);
}

// ---------------------------------------------------------------------------
// Composite Simpson rule on the unit square.
// ---------------------------------------------------------------------------

/// One-dimensional composite Simpson weights for R equidistant nodes on [0, 1].
std::vector<double> simpson_weights(int resolution);

/// Integral over [0,1]^2 of a row-major R x R grid (spacing 1/(R-1)).
double simpson_2d(std::span<const double> values, int resolution);

// ---------------------------------------------------------------------------
// Dense complex linear algebra.
// ---------------------------------------------------------------------------

class SingularMatrixError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Solves A X = B by partial-pivoting LU. Throws SingularMatrixError when a
/// pivot is negligible relative to the largest one.
ComplexMatrix lu_solve(const ComplexMatrix& a, const ComplexMatrix& b);

struct ThinSvd {
  ComplexMatrix u;          // rows x k
  RealVector sigma;         // k, non-increasing
  ComplexMatrix v;          // cols x k  (A = U diag(sigma) V^*)
};

ThinSvd svd(const ComplexMatrix& a);

struct EigenDecomposition {
  ComplexVector values;
  ComplexMatrix vectors;    // columns, unit 2-norm
};

/// Eigenpairs of a small general complex matrix (up to 64 x 64).
EigenDecomposition small_nonsymmetric_eig(const ComplexMatrix& a);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace spdebem

#endif  // SPDEBEM_NUMERICS_HPP
