#ifndef SPDEBEM_TESTS_BESSEL_ORACLE_HPP
#define SPDEBEM_TESTS_BESSEL_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <vector>

// Power series of J_m in long double; accurate to ~1e-15 for x <= 15, m <= 10.
inline long double oracle_bessel_j(int m, long double x) {
  const long double half = x / 2.0L;
  long double term = 1.0L;
  for (int i = 1; i <= m; ++i) term *= half / i;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -half * half / (static_cast<long double>(k) * (k + m));
    sum += term;
    if (std::fabs(term) < 1e-30L * std::fabs(sum) && k > x) break;
  }
  return sum;
}

// Positive zeros of J_m below x_max: sign-change scan at step 0.01, then bisection.
inline std::vector<double> oracle_bessel_zeros(int m, double x_max) {
  std::vector<double> zeros;
  const long double step = 0.01L;
  long double a = 0.5L;
  long double fa = oracle_bessel_j(m, a);
  for (long double b = a + step; b <= x_max; b += step) {
    const long double fb = oracle_bessel_j(m, b);
    if (fa * fb < 0.0L) {
      long double lo = b - step, hi = b, flo = fa;
      for (int it = 0; it < 100; ++it) {
        const long double mid = 0.5L * (lo + hi);
        const long double fm = oracle_bessel_j(m, mid);
        if (flo * fm <= 0.0L) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      zeros.push_back(static_cast<double>(0.5L * (lo + hi)));
    }
    fa = fb;
  }
  return zeros;
}

struct DiscLevel {
  double kappa;
  int multiplicity;
};

// Dirichlet wavenumbers of the disc of radius `radius` below kappa_max, m <= 8.
inline std::vector<DiscLevel> oracle_disc_levels(double kappa_max, double radius = 1.0) {
  std::vector<DiscLevel> out;
  for (int m = 0; m <= 8; ++m) {
    for (double z : oracle_bessel_zeros(m, kappa_max * radius)) out.push_back({z / radius, m == 0 ? 1 : 2});
  }
  std::sort(out.begin(), out.end(), [](const DiscLevel& a, const DiscLevel& b) { return a.kappa < b.kappa; });
  return out;
}

#endif  // SPDEBEM_TESTS_BESSEL_ORACLE_HPP
