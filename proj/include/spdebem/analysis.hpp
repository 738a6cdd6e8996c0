#ifndef SPDEBEM_ANALYSIS_HPP
#define SPDEBEM_ANALYSIS_HPP

#include <string>
#include <vector>

#include "spdebem/spde.hpp"

namespace spdebem {

/// Coefficient statistics entering the bound. Expectations are realization means.
struct CoefficientSuprema {
  double sum_eps_plus_abs_v = 0.0;  // sup_k sum_j (eps_kj + E|V_kj|)
  double sum_eps = 0.0;             // sup_k sum_j eps_kj
  double sum_abs_f = 0.0;           // sup_k sum_j E|f^j(V_k)|
  double norm_v = 0.0;              // sup_k E||V_k||
  double norm_f = 0.0;              // sup_k E||f(V_k)||
  double sum_abs_v_final = 0.0;     // sum_j E|V_Mj|
  double max_abs_v_final = 0.0;     // sup_j E|V_Mj|
  double max_abs_v = 0.0;           // observed sup_kj |V_kj|, diagnostic only; 0 when not observed

  /// Worst case under |V_kj| <= v_cap, eps_kj <= e_cap and |f^j| <= f_cap.
  static CoefficientSuprema from_caps(int n, double v_cap, double e_cap, double f_cap);
};

struct ErrorBoundParams {
  double T = 0.1;
  int N = 100;
  int M = 50;
  double R = 301;
  double L = 0.01;
  double lambda_1 = 6.5155;
  double lambda_N = 0.0;  // only enters E1; <= 0 disables that term
  double eps_lambda = 2e-4;
  double eps_eta = 5e-6;
  double C = 1.0;
  double C_T = 1.0;
  double eps = 0.5;
  double eps0_2 = 1e-4;
  double eps0_3 = 1e-4;
  double eps0_4 = 1e-4;
  CoefficientSuprema sup = CoefficientSuprema::from_caps(100, 1.0, 1.0, 1.0);

  double h() const { return T / M; }
  double lambda_tilde() const { return lambda_1 + eps_lambda; }
  void validate() const;
};

struct BoundConstants {
  double a2 = 0.0;
  double a2_tilde = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b4 = 0.0;
  double b5 = 0.0;
};

struct ErrorBound {
  BoundConstants constants;
  double e1 = 0.0;    // C_T (lambda_N^{eps-1} + log M / M), constant not rigorous
  double e234 = 0.0;
  double total = 0.0;
  std::string regime;  // "a2<1", "a2=1" or "a2>1"
  double limit = 0.0;  // M -> infinity limit of e234, infinite unless a2 < 1
};

/// psi^M(x0) for psi(x) = a x + b, in closed form.
double affine_iterate(double a, double b, double x0, int M);

/// The same by literal repetition.
double affine_iterate_literal(double a, double b, double x0, int M);

BoundConstants bound_constants(const ErrorBoundParams& p);

ErrorBound error_bound(const ErrorBoundParams& p);

/// Empirical statistics over a batch of trajectories. eps_kj is not
/// observable and enters as the constant e_cap.
CoefficientSuprema extract_suprema(const std::vector<Trajectory>& runs, const PackedBasis& basis,
                                   const Nonlinearity& f, double e_cap = 1.0);

/// sum_{n <= terms} n^{-decay} e_n(x) e_n(y) with nearest-grid-point lookup.
double kernel_eval(const OrthonormalBasis& basis, Point x, Point y, int terms, double decay);

}  // namespace spdebem

#endif  // SPDEBEM_ANALYSIS_HPP
