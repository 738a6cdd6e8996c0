#ifndef SPDEBEM_BASIS_HPP
#define SPDEBEM_BASIS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spdebem/beyn.hpp"

namespace spdebem {

struct ToleranceScenario {
  int id = 1;
  double eps_lambda = 2e-4;
  double eps_eta = 5e-6;
  double slope = 7.0;
  double intercept = 80.0;
};

/// Scenarios 1..3 of the element-count rule.
ToleranceScenario scenario(int id);

/// ceil(m kappa + b) clamped to [50, 1200].
int required_elements(double kappa, const ToleranceScenario& s);

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct BasisRecord {
  double kappa = 0.0;
  double lambda = 0.0;
  std::uint32_t n_f = 0;
  double residual = 0.0;
};

/// N grid-sampled, L2-normalized eigenfunctions on the R x R grid over [0,1]^2.
/// Row n of `functions` is the row-major grid of e_{n+1}, zero outside the mask.
struct OrthonormalBasis {
  std::string shape;
  double alpha = kDefaultAlpha;
  int resolution = 0;
  std::vector<BasisRecord> records;
  std::vector<std::uint8_t> mask;
  RowMajorMatrix functions;
  std::map<std::string, std::string> metadata;

  int size() const { return static_cast<int>(records.size()); }
  std::size_t cells() const { return static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution); }
  RealVector eigenvalues() const;
};

/// Grid point (i, j) is (j / (R-1), i / (R-1)); row-major index i R + j.
Point grid_point(int resolution, int i, int j);

/// Strictly-inside test against a dense polygon of the curve (>= 4096 samples).
/// Points within 1e-12 of the polygon count as outside.
std::vector<std::uint8_t> inside_mask(const BoundaryCurve& curve, int resolution, int samples = 8192);

/// Composite Simpson weights of the R x R grid (product weights).
std::vector<double> simpson_grid_weights(int resolution);

/// Simpson-weighted Gram matrix of the stored functions.
RealMatrix gram_matrix(const OrthonormalBasis& basis);

/// <g, e_n> for n = 1..N via the Simpson rule; `grid` has R*R values.
RealVector inner_product(const OrthonormalBasis& basis, std::span<const double> grid);

/// sum_n c_n e_n as an R*R grid.
std::vector<double> reconstruct(const OrthonormalBasis& basis, const RealVector& coeffs);

/// Dense access for repeated projections: inside points, weights and E (N x P).
class PackedBasis {
 public:
  explicit PackedBasis(const OrthonormalBasis& basis);

  int size() const { return static_cast<int>(e_.rows()); }
  int resolution() const { return resolution_; }
  const std::vector<std::size_t>& inside() const { return inside_; }
  const RealVector& weights() const { return weights_; }
  const RealMatrix& functions() const { return e_; }
  const RealVector& eigenvalues() const { return lambda_; }

  /// Field values on the inside points for coefficient vector c.
  RealVector field(const RealVector& coeffs) const { return e_.transpose() * coeffs; }
  /// Coefficients of a field given on the inside points.
  RealVector project(const RealVector& field) const { return e_ * field.cwiseProduct(weights_); }
  /// Packs an R*R grid onto the inside points.
  RealVector pack(std::span<const double> grid) const;
  /// Scatters inside-point values to an R*R grid with zeros elsewhere.
  std::vector<double> unpack(const RealVector& values) const;
  /// Simpson L2 norm of a field on the inside points.
  double l2_norm(const RealVector& values) const;
  /// The first n functions only.
  PackedBasis head(int n) const;

 private:
  int resolution_;
  std::vector<std::size_t> inside_;
  RealVector weights_;
  RealMatrix e_;
  RealVector lambda_;
};

struct SamplingOptions {
  double imag_tol = 1e-3;
  bool orthonormalize_clusters = false;
  QuadratureOptions quadrature{};
};

/// Real, L2-normalized grid functions from eigenpairs sharing one wavenumber
/// cluster (same n_f). A single pair is phase-aligned and its real part kept;
/// a cluster of m pairs is replaced by an orthonormal basis of the real span.
/// Sign rule: the entry of largest magnitude is positive.
std::vector<std::vector<double>> sample_eigenfunctions(const std::vector<EigenPair>& pairs,
                                                       const BoundaryMesh& mesh,
                                                       const std::vector<std::uint8_t>& mask, int resolution,
                                                       const SamplingOptions& options = {});

struct BuildOptions {
  int resolution = 301;
  ToleranceScenario scenario = spdebem::scenario(1);
  int fixed_elements = 0;  // > 0 overrides the scenario rule for refinement
  bool allow_multiplicity = false;
  BeynConfig beyn{};
  ScanOptions scan{};      // element rules are filled in when empty
  SamplingOptions sampling{};
  double weyl_margin = 0.2;
  bool verbose = false;
};

struct BuildReport {
  struct Entry {
    BasisRecord record;
    std::string flags;
    double seconds = 0.0;  // refinement plus sampling share
  };
  std::vector<Entry> entries;
  double predicted_cost = 0.0;
  double scan_seconds = 0.0;
  double total_seconds = 0.0;
  double kappa_max = 0.0;
  double gram_offdiag_max = 0.0;
  double gram_diag_dev_max = 0.0;
};

/// Scans, refines, samples and validates N eigenfunctions. Throws
/// SpectralAnomaly on multiplicity (unless allowed) or when fewer than N
/// accepted pairs are found.
OrthonormalBasis build_onb(const BoundaryCurve& curve, int n, const BuildOptions& options,
                           BuildReport* report = nullptr);

struct VerifyRow {
  int n_f = 0;
  double kappa = 0.0;
  double ev_error = 0.0;
  double ef_error = 0.0;
};

struct VerifyOptions {
  int resolution = 81;
  BeynConfig beyn{};
  double alpha = kDefaultAlpha;
  QuadratureOptions quadrature{};
  int scan_elements = 0;  // 0: default coarse rule
};

/// Errors of the index-th eigenpair (1-based, ordered by wavenumber) for each
/// n_f against a reference computed with n_f_ref elements.
std::vector<VerifyRow> verify_against_reference(const BoundaryCurve& curve, int index,
                                                const std::vector<int>& n_f_list, int n_f_ref,
                                                const VerifyOptions& options = {});

/// N(Lambda) = area Lambda / (4 pi).
double weyl_estimate(const BoundaryCurve& curve, double lambda);
double weyl_estimate_area(double area, double lambda);

/// Lambda with weyl_estimate = n.
double weyl_inverse(double area, double n);

/// 0.15 n_f^2 + 50 n_f (seconds on the reference machine).
double element_cost(int n_f);

/// Sum of element_cost(required_elements(kappa_i)) with kappa_i^2 = weyl_inverse(area, i).
double estimate_build_cost(int n, const ToleranceScenario& s, double area);

/// Default element count for coarse scan circles.
int default_scan_elements(double kappa);

/// Exact eigenbasis of the disc of radius 1/2 centred at (1/2, 1/2), sampled
/// on the R grid: J_m(2 j_{m,n} r) cos/sin(m theta), ordered by eigenvalue.
OrthonormalBasis disc_bessel_basis(int n, int resolution);

}  // namespace spdebem

#endif  // SPDEBEM_BASIS_HPP
