#ifndef SPDEBEM_SPDE_HPP
#define SPDEBEM_SPDE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spdebem/basis.hpp"
#include "spdebem/expression.hpp"

namespace spdebem {

/// q_n = amplitude^2 n^{-(decay - eps_q)}.
struct NoiseSpec {
  double decay = 2.0;
  double eps_q = 0.0;
  double amplitude = 1.0;
  double gamma = 0.5;  // informational regularity, must satisfy gamma < decay / 2

  double q(int n) const;  // n is 1-based
  RealVector coefficients(int count) const;
  void validate() const;
};

class Nonlinearity {
 public:
  enum class Kind { Identity, Rational, Bump, Zero, Expression };

  static Nonlinearity identity();
  static Nonlinearity rational();
  static Nonlinearity bump(double p);
  static Nonlinearity zero();
  /// `lipschitz` < 0 estimates sup |f'| on [-10, 10] by dense differences.
  static Nonlinearity expression(const std::string& source, double lipschitz = -1.0);
  /// "f1", "f2", "bump:<p>", "zero" or "expr:<source>".
  static Nonlinearity parse(const std::string& spec);

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  double lipschitz() const { return lipschitz_; }
  std::string name() const;

  double operator()(double x) const;

  /// max |f'| sampled densely on [lo, hi] with central differences.
  double sampled_lipschitz(double lo = -10.0, double hi = 10.0, int samples = 200001) const;

 private:
  Kind kind_ = Kind::Zero;
  double p_ = 0.0;
  double lipschitz_ = 0.0;
  std::shared_ptr<const Expression> expr_;
};

/// exp(-1 / (1 - r^2)) for r^2 < 1, r measured from the rectangle centre; zero outside the mask.
std::vector<double> bump_initial(double x1, double x2, double y1, double y2, int resolution,
                                 const std::vector<std::uint8_t>& mask);

struct SpdeProblem {
  std::shared_ptr<const PackedBasis> basis;
  Nonlinearity nonlinearity = Nonlinearity::zero();
  NoiseSpec noise{};
  RealVector initial;  // on the basis' inside points
  double T = 0.1;
  int M = 100;
  std::uint64_t seed = 1;
  bool force_quadrature = false;  // evaluate identity drift through the grid as well
  std::vector<int> snapshots;     // steps whose fields are kept

  void validate() const;
};

struct Trajectory {
  RealMatrix coefficients;  // (M+1) x N
  std::map<int, std::vector<double>> snapshots;  // step -> R*R grid
  double T = 0.0;
  int M = 0;

  RealVector final() const { return coefficients.row(coefficients.rows() - 1).transpose(); }
};

/// One step of the exponential Euler scheme for every mode.
RealVector exp_euler_step(const RealVector& v, const RealVector& f, const RealVector& normals,
                          const RealVector& lambda, const RealVector& q, double h);

/// <f(sum_j v_j e_j), e_n> for n = 1..N via the grid.
RealVector nemytskii_coeffs(const PackedBasis& basis, const RealVector& v, const Nonlinearity& f);

/// Standard normals R_k^j, k = 0..M-1, j = 0..modes-1. Mode j's column depends
/// only on (seed, realization, j), so runs with different N share draws.
RealMatrix noise_draws(std::uint64_t seed, int realization, int steps, int modes);

/// Exponential Euler trajectory of one realization.
Trajectory solve(const SpdeProblem& problem, int realization = 0);

/// Same recursion with F = 0 and lambda_j replaced by lambda_j - 1 in every
/// factor; the exact per-mode solution for f(x) = x at the grid times.
/// Requires lambda_j > 1 for all modes.
Trajectory exact_linear_solution(const SpdeProblem& problem, int realization = 0);

/// Grid L2 norm of the field difference at the final time. Coefficient
/// vectors of different lengths are zero-padded; `basis` must hold the longer one.
double strong_error(const Trajectory& a, const Trajectory& b, const PackedBasis& basis);

struct ConvergenceRow {
  int parameter = 0;
  double error = 0.0;
  double std_error = 0.0;
};

struct ConvergenceTable {
  std::string mode;
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;
};

/// M mode: error against exact_linear_solution (identity drift only).
/// N mode: error against a reference using all modes of `problem.basis` at problem.M.
ConvergenceTable convergence_study(const SpdeProblem& problem, char mode, const std::vector<int>& values,
                                   int realizations);

/// Final coefficient vectors, one row per realization.
RealMatrix final_coefficients(const SpdeProblem& problem, int realizations);

}  // namespace spdebem

#endif  // SPDEBEM_SPDE_HPP
