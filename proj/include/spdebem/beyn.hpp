#ifndef SPDEBEM_BEYN_HPP
#define SPDEBEM_BEYN_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spdebem/bem.hpp"

namespace spdebem {

struct Contour {
  Complex centre;
  double radius;
  int nodes = 24;  // K

  Complex point(int j) const;       // gamma(t_j), t_j = 2 pi j / K
  Complex derivative(int j) const;  // gamma'(t_j)
  bool contains(Complex z) const { return std::abs(z - centre) < radius; }
};

struct BeynConfig {
  int ell = 8;
  double eps_sing = 1e-4;
  int nodes = 24;
  std::uint64_t seed = 20240521;
  double residual_tol = 1e-6;
  double imag_tol = 1e-6;
};

enum PairFlag : unsigned {
  kFlagNone = 0,
  kFlagSuspectResidual = 1u << 0,
  kFlagSuspectImaginary = 1u << 1,
  kFlagPossibleMultiplicity = 1u << 2,
};

struct EigenPair {
  Complex kappa;
  double lambda = 0.0;  // (Re kappa)^2
  ComplexVector density;
  double residual = 0.0;
  int n_f = 0;
  unsigned flags = kFlagNone;
  int contour = -1;  // id of the contour that produced the pair

  bool suspect() const { return (flags & (kFlagSuspectResidual | kFlagSuspectImaginary)) != 0; }
};

/// Text form of flags: "ok" or a '|' separated list.
std::string flag_string(unsigned flags);

/// Anything that produces M(z) for complex z.
using MatrixFunction = std::function<ComplexMatrix(Complex)>;

struct Moments {
  ComplexMatrix a0;
  ComplexMatrix a1;
};

/// Trapezoidal approximations of (1/2 pi i) \oint M(z)^{-1} V z^p dz, p = 0, 1.
/// Throws NumericError if M is singular at a node.
Moments contour_moments(const MatrixFunction& m, const Contour& contour, const ComplexMatrix& probe);

struct RankTruncation {
  ComplexMatrix v0;      // rows x n
  RealVector sigma0;     // n
  ComplexMatrix w0;      // ell x n
  int rank = 0;
};

/// Thin SVD of a0 keeping sigma_i > eps_sing. Throws SpectralAnomaly if the
/// probe rank is exhausted (rank == number of columns).
RankTruncation rank_truncate(const ComplexMatrix& a0, double eps_sing);

struct ReducedPair {
  Complex kappa;
  ComplexVector density;
};

/// Eigenpairs of B = V0^* A1 W0 Sigma0^{-1}; densities V0 s.
std::vector<ReducedPair> reduced_eigs(const RankTruncation& t, const ComplexMatrix& a1);

/// Complex standard Gaussian probe matrix from a seeded stream.
ComplexMatrix random_probe(int rows, int cols, std::uint64_t seed);

/// Beyn's algorithm for a general matrix function. Pairs outside the contour
/// are discarded; residuals use a fresh evaluation of M at each eigenvalue.
std::vector<EigenPair> solve_nep(const MatrixFunction& m, int dof, const Contour& contour, const BeynConfig& config);

/// Convenience overload for the BEM collocation matrix; records n_f.
std::vector<EigenPair> solve_nep(const NepMatrixAssembler& assembler, const Contour& contour,
                                 const BeynConfig& config);

struct ScanOptions {
  double kappa_min = 0.0;  // 0: derive from the Faber-Krahn bound
  double kappa_max = 0.0;
  double scan_radius = 0.5;
  double overlap = 0.2;
  int scan_ell = 16;
  int refine_ell = 8;
  double dedupe_tol = 1e-6;         // relative
  double refine_radius_max = 0.2;
  /// Elements used for scan circles, as a function of the circle's upper kappa.
  std::function<int(double)> scan_elements;
  /// Elements used for the refinement contour around a candidate.
  std::function<int(double)> refine_elements;
  double alpha = kDefaultAlpha;
  QuadratureOptions quadrature{};
  bool refine = true;        // false: report scan candidates only
  int first_contour_id = 0;  // offset for contour ids (chained scans)
};

struct ScanReport {
  std::vector<EigenPair> pairs;   // refined, sorted by Re kappa
  std::vector<EigenPair> candidates;
  int contours_solved = 0;
  int next_contour_id = 0;
};

/// Two-phase scan of [kappa_min, kappa_max]: overlapping circles collect
/// candidates, then each candidate cluster is refined on a tight contour.
ScanReport scan_spectrum(const BoundaryCurve& curve, const ScanOptions& options, const BeynConfig& config);

/// Sorts by Re kappa and merges pairs whose wavenumbers agree to `rel_tol`,
/// keeping the lowest residual. Pairs closer than 10 rel_tol inside one
/// solve are kept and flagged as possible multiplicity.
std::vector<EigenPair> dedupe_pairs(std::vector<EigenPair> pairs, double rel_tol);

/// Faber-Krahn lower bound j_{0,1} sqrt(pi / area) on the first wavenumber.
double faber_krahn_wavenumber(double area);

}  // namespace spdebem

#endif  // SPDEBEM_BEYN_HPP
