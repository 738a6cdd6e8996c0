#include "spdebem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spdebem {

CoefficientSuprema CoefficientSuprema::from_caps(int n, double v_cap, double e_cap, double f_cap) {
  const double nn = n;
  CoefficientSuprema s;
  s.sum_eps_plus_abs_v = nn * (e_cap + v_cap);
  s.sum_eps = nn * e_cap;
  s.sum_abs_f = nn * f_cap;
  s.norm_v = std::sqrt(nn) * v_cap;
  s.norm_f = std::sqrt(nn) * f_cap;
  s.sum_abs_v_final = nn * v_cap;
  s.max_abs_v_final = v_cap;
  return s;
}

void ErrorBoundParams::validate() const {
  if (!(T > 0.0)) throw DomainError("error bound: T must be positive");
  if (N < 1 || M < 1) throw DomainError("error bound: N and M must be >= 1");
  if (!(R > 0.0)) throw DomainError("error bound: R must be positive");
  if (!(lambda_1 > 0.0)) throw DomainError("error bound: lambda_1 must be positive");
  if (L < 0.0 || eps_lambda < 0.0 || eps_eta < 0.0 || C < 0.0 || C_T < 0.0) {
    throw DomainError("error bound: L, tolerances and constants must be non-negative");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("error bound: eps must lie in (0, 1)");
}

double affine_iterate(double a, double b, double x0, int M) {
  if (!(a > 0.0)) throw DomainError("affine_iterate: a must be positive");
  if (M < 0) throw DomainError("affine_iterate: M must be >= 0");
  if (a == 1.0) return x0 + M * b;
  const double aM = std::pow(a, M);
  // expm1(M log a) / (a - 1) is the geometric sum without cancellation near a = 1
  const double series = std::expm1(M * std::log(a)) / (a - 1.0);
  if (a < 1.0 || a - 1.0 < 1e-3) return aM * x0 + b * series;
  return aM * (x0 + b / (a - 1.0)) - b / (a - 1.0);
}

double affine_iterate_literal(double a, double b, double x0, int M) {
  double x = x0;
  for (int k = 0; k < M; ++k) x = a * x + b;
  return x;
}

BoundConstants bound_constants(const ErrorBoundParams& p) {
  p.validate();
  const double h = p.h();
  const double l1 = p.lambda_1;
  const double lt = p.lambda_tilde();
  const double n = p.N;
  const double e1 = std::exp(-l1 * h);
  const double et = std::exp(-lt * h);
  const double g1 = -std::expm1(-l1 * h) / l1;
  const double gt = -std::expm1(-lt * h) / lt;
  const CoefficientSuprema& s = p.sup;

  BoundConstants c;
  c.a2 = e1 + p.L * n * g1;
  c.a2_tilde = et + p.L * n * gt;
  c.b2 = g1 * n * p.C / (p.R * p.R);

  const double sd1 = std::sqrt(-std::expm1(-2.0 * l1 * h) / (2.0 * l1));
  const double sdt = std::sqrt(-std::expm1(-2.0 * lt * h) / (2.0 * lt));
  c.b3 = e1 * std::abs(std::expm1(-p.eps_lambda * h)) * s.sum_eps_plus_abs_v +
         (p.eps_lambda + std::abs(et * l1 - e1 * lt)) / (l1 * lt) * (n * p.L * s.sum_eps + s.sum_abs_f) +
         n * std::abs(sd1 - sdt);
  c.b4 = n * (1.0 + s.max_abs_v_final) * (et * p.eps_eta * s.norm_v + p.eps_eta * gt * s.norm_f);
  c.b5 = p.eps_eta * s.sum_abs_v_final;
  return c;
}

ErrorBound error_bound(const ErrorBoundParams& p) {
  ErrorBound out;
  out.constants = bound_constants(p);
  const BoundConstants& c = out.constants;
  // affine_iterate(a, b, x0, M) = a^M x0 + b (1 - a^M) / (1 - a) in every regime
  out.e234 = affine_iterate(c.a2, c.b2, p.eps0_2, p.M) + affine_iterate(c.a2, c.b3, p.eps0_3, p.M) +
             affine_iterate(c.a2_tilde, c.b4, p.eps0_4, p.M) + c.b5;
  const double lambda_term = p.lambda_N > 0.0 ? std::pow(p.lambda_N, p.eps - 1.0) : 0.0;
  out.e1 = p.C_T * (lambda_term + std::log(static_cast<double>(p.M)) / p.M);
  out.total = out.e1 + out.e234;
  out.regime = c.a2 < 1.0 ? "a2<1" : (c.a2 == 1.0 ? "a2=1" : "a2>1");
  out.limit = c.a2 < 1.0 ? (c.b2 + c.b3) / (1.0 - c.a2) + c.b4 / (1.0 - c.a2_tilde) + c.b5
                         : std::numeric_limits<double>::infinity();
  return out;
}

CoefficientSuprema extract_suprema(const std::vector<Trajectory>& runs, const PackedBasis& basis,
                                   const Nonlinearity& f, double e_cap) {
  CoefficientSuprema s;
  if (runs.empty()) return s;
  const Eigen::Index steps = runs.front().coefficients.rows();
  const Eigen::Index n = runs.front().coefficients.cols();
  for (const auto& r : runs) {
    if (r.coefficients.rows() != steps || r.coefficients.cols() != n) {
      throw DomainError("extract_suprema: trajectories differ in shape");
    }
  }
  if (n > basis.size()) throw DomainError("extract_suprema: basis holds fewer functions than the trajectories");
  const PackedBasis used = n == basis.size() ? basis : basis.head(static_cast<int>(n));
  const double count = static_cast<double>(runs.size());
  for (Eigen::Index k = 0; k < steps; ++k) {
    RealVector mean_abs_v = RealVector::Zero(n);
    RealVector mean_abs_f = RealVector::Zero(n);
    double mean_norm_v = 0.0;
    double mean_norm_f = 0.0;
    for (const auto& r : runs) {
      const RealVector v = r.coefficients.row(k).transpose();
      const RealVector fv = nemytskii_coeffs(used, v, f);
      mean_abs_v += v.cwiseAbs();
      mean_abs_f += fv.cwiseAbs();
      mean_norm_v += v.norm();
      mean_norm_f += fv.norm();
      s.max_abs_v = std::max(s.max_abs_v, v.cwiseAbs().maxCoeff());
    }
    mean_abs_v /= count;
    mean_abs_f /= count;
    s.sum_eps_plus_abs_v = std::max(s.sum_eps_plus_abs_v, static_cast<double>(n) * e_cap + mean_abs_v.sum());
    s.sum_abs_f = std::max(s.sum_abs_f, mean_abs_f.sum());
    s.norm_v = std::max(s.norm_v, mean_norm_v / count);
    s.norm_f = std::max(s.norm_f, mean_norm_f / count);
    if (k == steps - 1) {
      s.sum_abs_v_final = mean_abs_v.sum();
      s.max_abs_v_final = mean_abs_v.maxCoeff();
    }
  }
  s.sum_eps = static_cast<double>(n) * e_cap;
  return s;
}

double kernel_eval(const OrthonormalBasis& basis, Point x, Point y, int terms, double decay) {
  if (terms < 1 || terms > basis.size()) throw DomainError("kernel_eval: terms must lie in [1, N]");
  const int r = basis.resolution;
  auto cell = [&](Point p) {
    if (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0) throw DomainError("kernel_eval: point outside [0,1]^2");
    const auto i = static_cast<std::size_t>(std::lround(p.y * (r - 1)));
    const auto j = static_cast<std::size_t>(std::lround(p.x * (r - 1)));
    const std::size_t c = i * static_cast<std::size_t>(r) + j;
    if (!basis.mask[c]) throw DomainError("kernel_eval: point is not inside the domain");
    return static_cast<Eigen::Index>(c);
  };
  const Eigen::Index cx = cell(x);
  const Eigen::Index cy = cell(y);
  double sum = 0.0;
  for (int n = 1; n <= terms; ++n) {
    sum += std::pow(static_cast<double>(n), -decay) * (basis.functions(n - 1, cx) * basis.functions(n - 1, cy));
  }
  return sum;
}

}  // namespace spdebem
