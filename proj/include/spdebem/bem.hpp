#ifndef SPDEBEM_BEM_HPP
#define SPDEBEM_BEM_HPP

#include <vector>

#include "spdebem/geometry.hpp"
#include "spdebem/numerics.hpp"

namespace spdebem {

/// (i/4) H_0^(1)(kappa |x - y|). Throws DomainError for x == y.
Complex fundamental_solution(Complex kappa, Point x, Point y);

/// Normal derivative in y of the fundamental solution:
/// -(i kappa / 4) H_1^(1)(kappa r) <(y - x)/r, nu_y>.
Complex dl_kernel(Complex kappa, Point x, Point y, Point nu_y);

/// Small-argument-safe variant taking the difference d = y - x directly.
Complex dl_kernel_diff(Complex kappa, Point d, Point nu_y);

/// Collocation matrix M(kappa) = -1/2 I + D_kappa for the double-layer ansatz.
/// Row index 3i + l and column index 3j + k (0-based element, node).
class NepMatrixAssembler {
 public:
  explicit NepMatrixAssembler(BoundaryMesh mesh, QuadratureOptions options = {});

  const BoundaryMesh& mesh() const { return mesh_; }
  const QuadratureOptions& options() const { return options_; }
  int dof() const { return mesh_.dof(); }

  /// Rows are computed in parallel; the result does not depend on the thread count.
  ComplexMatrix assemble(Complex kappa) const;

  /// Single-threaded reference of assemble().
  ComplexMatrix assemble_serial(Complex kappa) const;

  /// D_kappa only (no -1/2 I).
  ComplexMatrix double_layer(Complex kappa) const;

  /// Integrals a_{i,j,k,l} for k = 1..3 at one collocation row against one element.
  Eigen::Vector3cd entry_block(Complex kappa, int row, int element) const;

 private:
  void fill_row(Complex kappa, int row, ComplexMatrix& out) const;

  BoundaryMesh mesh_;
  QuadratureOptions options_;
};

/// Evaluates double-layer potentials u(x) = sum_j sum_k a^_{j,k}(x) phi_{3j+k}.
class InteriorEvaluator {
 public:
  explicit InteriorEvaluator(BoundaryMesh mesh, QuadratureOptions options = {});

  const BoundaryMesh& mesh() const { return mesh_; }

  /// Potential for every density column at every point: result is points x densities.
  /// Points must lie strictly inside the domain.
  ComplexMatrix evaluate(Complex kappa, const ComplexMatrix& densities, const std::vector<Point>& points) const;

  /// Single-threaded reference of evaluate().
  ComplexMatrix evaluate_serial(Complex kappa, const ComplexMatrix& densities,
                                const std::vector<Point>& points) const;

  ComplexVector evaluate(Complex kappa, const ComplexVector& density, const std::vector<Point>& points) const;

  /// Coefficients a^_{j,k}(x) for all 3 n_f columns.
  ComplexVector coefficients(Complex kappa, Point x) const;

 private:
  void evaluate_point(Complex kappa, const ComplexMatrix& densities, Point x, Eigen::Index row,
                      ComplexMatrix& out) const;

  BoundaryMesh mesh_;
  QuadratureOptions options_;
};

}  // namespace spdebem

#endif  // SPDEBEM_BEM_HPP
