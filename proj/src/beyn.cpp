#include "spdebem/beyn.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <random>

namespace spdebem {

Complex Contour::point(int j) const {
  const double t = kTwoPi * j / nodes;
  return centre + radius * Complex(std::cos(t), std::sin(t));
}

Complex Contour::derivative(int j) const {
  const double t = kTwoPi * j / nodes;
  return radius * Complex(-std::sin(t), std::cos(t));
}

std::string flag_string(unsigned flags) {
  if (flags == kFlagNone) return "ok";
  std::string out;
  auto add = [&out](const char* s) {
    if (!out.empty()) out += '|';
    out += s;
  };
  if (flags & kFlagSuspectResidual) add("suspect-residual");
  if (flags & kFlagSuspectImaginary) add("suspect-imaginary");
  if (flags & kFlagPossibleMultiplicity) add("possible-multiplicity");
  return out;
}

Moments contour_moments(const MatrixFunction& m, const Contour& contour, const ComplexMatrix& probe) {
  if (contour.nodes < 8) throw DomainError("contour_moments: need K >= 8 nodes");
  if (!(contour.radius > 0.0)) throw DomainError("contour_moments: radius must be positive");
  Moments out{ComplexMatrix::Zero(probe.rows(), probe.cols()), ComplexMatrix::Zero(probe.rows(), probe.cols())};
  for (int j = 0; j < contour.nodes; ++j) {
    const Complex z = contour.point(j);
    ComplexMatrix x;
    try {
      x = lu_solve(m(z), probe);
    } catch (const SingularMatrixError&) {
      throw SingularMatrixError("eigenvalue on contour at z = (" + std::to_string(z.real()) + ", " +
                                std::to_string(z.imag()) + ") - perturb radius");
    }
    x *= contour.derivative(j);
    out.a0 += x;
    out.a1 += z * x;
  }
  const Complex scale = 1.0 / (kI * static_cast<double>(contour.nodes));
  out.a0 *= scale;
  out.a1 *= scale;
  return out;
}

RankTruncation rank_truncate(const ComplexMatrix& a0, double eps_sing) {
  if (!(eps_sing > 0.0)) throw DomainError("rank_truncate: eps_sing must be positive");
  const ThinSvd d = svd(a0);
  int rank = 0;
  while (rank < d.sigma.size() && d.sigma(rank) > eps_sing) ++rank;
  if (rank > 0 && rank == a0.cols()) {
    throw SpectralAnomaly("probe rank exhausted (" + std::to_string(rank) + " of " + std::to_string(a0.cols()) +
                          " singular values above tolerance) - increase ell");
  }
  return {d.u.leftCols(rank), d.sigma.head(rank), d.v.leftCols(rank), rank};
}

std::vector<ReducedPair> reduced_eigs(const RankTruncation& t, const ComplexMatrix& a1) {
  std::vector<ReducedPair> out;
  if (t.rank == 0) return out;
  const ComplexMatrix b =
      t.v0.adjoint() * a1 * t.w0 * t.sigma0.cwiseInverse().cast<Complex>().asDiagonal();
  const EigenDecomposition e = small_nonsymmetric_eig(b);
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    out.push_back({e.values(i), t.v0 * e.vectors.col(i)});
  }
  return out;
}

ComplexMatrix random_probe(int rows, int cols, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols)};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix v(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      const double re = normal(gen);
      const double im = normal(gen);
      v(r, c) = Complex(re, im);
    }
  }
  return v;
}

namespace {

// Marks pairs of one solve whose wavenumbers nearly coincide.
void flag_close_pairs(std::vector<EigenPair>& pairs, double rel_tol) {
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      const double scale = std::max(1.0, std::abs(pairs[a].kappa));
      if (std::abs(pairs[a].kappa - pairs[b].kappa) < 10.0 * rel_tol * scale) {
        pairs[a].flags |= kFlagPossibleMultiplicity;
        pairs[b].flags |= kFlagPossibleMultiplicity;
      }
    }
  }
}

}  // namespace

std::vector<EigenPair> solve_nep(const MatrixFunction& m, int dof, const Contour& contour, const BeynConfig& config) {
  if (config.ell < 1 || config.ell >= dof) throw DomainError("solve_nep: need 1 <= ell < dof");
  // Moments of the shifted variable z - mu keep the reduced matrix well scaled.
  const MatrixFunction shifted = [&](Complex w) { return m(w + contour.centre); };
  const Contour local{0.0, contour.radius, config.nodes};
  const ComplexMatrix probe = random_probe(dof, config.ell, config.seed);
  const Moments mom = contour_moments(shifted, local, probe);
  const RankTruncation t = rank_truncate(mom.a0, config.eps_sing);
  std::vector<EigenPair> out;
  for (ReducedPair& r : reduced_eigs(t, mom.a1)) {
    const Complex kappa = r.kappa + contour.centre;
    if (!contour.contains(kappa)) continue;
    EigenPair p;
    p.kappa = kappa;
    p.lambda = kappa.real() * kappa.real();
    p.density = std::move(r.density);
    p.density /= p.density.norm();
    p.residual = (m(kappa) * p.density).norm();
    if (!(p.residual <= config.residual_tol)) p.flags |= kFlagSuspectResidual;
    if (!(std::abs(kappa.imag()) <= config.imag_tol)) p.flags |= kFlagSuspectImaginary;
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
    return a.kappa.real() < b.kappa.real();
  });
  return out;
}

std::vector<EigenPair> solve_nep(const NepMatrixAssembler& assembler, const Contour& contour,
                                 const BeynConfig& config) {
  auto pairs = solve_nep([&assembler](Complex z) { return assembler.assemble(z); }, assembler.dof(), contour,
                         config);
  for (auto& p : pairs) p.n_f = assembler.mesh().size();
  return pairs;
}

std::vector<EigenPair> dedupe_pairs(std::vector<EigenPair> pairs, double rel_tol) {
  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.kappa.real() != b.kappa.real()) return a.kappa.real() < b.kappa.real();
    return a.residual < b.residual;
  });
  std::vector<EigenPair> out;
  for (auto& p : pairs) {
    bool merged = false;
    // Compare against the retained pairs of the current cluster only.
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      const double scale = std::max(1.0, std::abs(p.kappa));
      if (std::abs(p.kappa.real() - it->kappa.real()) > 10.0 * rel_tol * scale) break;
      if (it->contour != p.contour && std::abs(p.kappa - it->kappa) <= rel_tol * scale) {
        if (p.residual < it->residual) *it = std::move(p);
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(std::move(p));
  }
  std::vector<EigenPair> sorted = std::move(out);
  std::stable_sort(sorted.begin(), sorted.end(), [](const EigenPair& a, const EigenPair& b) {
    return a.kappa.real() < b.kappa.real();
  });
  return sorted;
}

double faber_krahn_wavenumber(double area) {
  if (!(area > 0.0)) throw DomainError("faber_krahn_wavenumber: area must be positive");
  return 2.404825557695773 * std::sqrt(kPi / area);
}

namespace {

// Solves one contour, shrinking the radius if a node hits the spectrum and
// enlarging ell if the probe rank is exhausted.
std::vector<EigenPair> robust_solve(const NepMatrixAssembler& assembler, Contour contour, BeynConfig config,
                                    int max_ell) {
  for (int attempt = 0; attempt < 6; ++attempt) {
    try {
      return solve_nep(assembler, contour, config);
    } catch (const SingularMatrixError&) {
      contour.radius *= 0.97;
    } catch (const SpectralAnomaly&) {
      if (2 * config.ell > max_ell) throw;
      config.ell *= 2;
    }
  }
  throw NumericError("contour around " + std::to_string(contour.centre.real()) + " could not be solved");
}

}  // namespace

ScanReport scan_spectrum(const BoundaryCurve& curve, const ScanOptions& options, const BeynConfig& config) {
  if (!options.scan_elements || !options.refine_elements) {
    throw DomainError("scan_spectrum: element-count rules must be set");
  }
  const double kappa_min = options.kappa_min > 0.0
                               ? options.kappa_min
                               : 0.9 * faber_krahn_wavenumber(std::abs(curve.signed_area()));
  if (!(options.kappa_max > kappa_min)) {
    throw DomainError("scan_spectrum: kappa_max must exceed the smallest wavenumber " + std::to_string(kappa_min));
  }
  std::map<int, NepMatrixAssembler> assemblers;
  auto assembler_for = [&](int n_f) -> const NepMatrixAssembler& {
    auto it = assemblers.find(n_f);
    if (it == assemblers.end()) {
      it = assemblers.emplace(n_f, NepMatrixAssembler(BoundaryMesh(curve, n_f, options.alpha), options.quadrature))
               .first;
    }
    return it->second;
  };

  ScanReport report;
  int contour_id = options.first_contour_id;

  // Phase 1: each circle owns the central part of its diameter.
  const double r = options.scan_radius;
  const double half_step = r * (1.0 - options.overlap);
  std::vector<EigenPair> candidates;
  for (double c = kappa_min + half_step; c - half_step < options.kappa_max; c += 2.0 * half_step) {
    BeynConfig cfg = config;
    cfg.ell = options.scan_ell;
    cfg.seed = config.seed + static_cast<std::uint64_t>(contour_id);
    const auto& as = assembler_for(options.scan_elements(c + r));
    auto found = robust_solve(as, Contour{c, r, config.nodes}, cfg, 256);
    ++report.contours_solved;
    for (auto& p : found) {
      p.contour = contour_id;
      const bool owned = p.kappa.real() >= c - half_step && p.kappa.real() < c + half_step;
      if (owned && std::abs(p.kappa.imag()) < 0.1 * r && p.kappa.real() <= options.kappa_max) {
        candidates.push_back(std::move(p));
      }
    }
    ++contour_id;
  }
  candidates = dedupe_pairs(std::move(candidates), options.dedupe_tol);
  report.candidates = candidates;
  if (!options.refine) {
    report.pairs = candidates;
    report.next_contour_id = contour_id;
    return report;
  }

  // Phase 2: cluster candidates that a coarse scan cannot separate, then refine.
  std::vector<std::vector<double>> clusters;
  for (const auto& p : candidates) {
    const double k = p.kappa.real();
    if (!clusters.empty() && k - clusters.back().back() < 1e-3 * std::max(1.0, k)) {
      clusters.back().push_back(k);
    } else {
      clusters.push_back({k});
    }
  }
  std::vector<EigenPair> refined;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& cl = clusters[i];
    const double centre = 0.5 * (cl.front() + cl.back());
    double radius = options.refine_radius_max;
    if (i > 0) radius = std::min(radius, 0.5 * (cl.front() - clusters[i - 1].back()));
    if (i + 1 < clusters.size()) radius = std::min(radius, 0.5 * (clusters[i + 1].front() - cl.back()));
    radius = std::max(radius, 0.5 * (cl.back() - cl.front()) + 1e-6);
    BeynConfig cfg = config;
    cfg.ell = std::max(options.refine_ell, 2 * static_cast<int>(cl.size()) + 4);
    cfg.seed = config.seed + static_cast<std::uint64_t>(contour_id);
    const auto& as = assembler_for(options.refine_elements(centre));
    auto found = robust_solve(as, Contour{centre, radius, config.nodes}, cfg, 256);
    ++report.contours_solved;
    flag_close_pairs(found, options.dedupe_tol);
    for (auto& p : found) {
      p.contour = contour_id;
      refined.push_back(std::move(p));
    }
    ++contour_id;
  }
  report.pairs = dedupe_pairs(std::move(refined), options.dedupe_tol);
  report.next_contour_id = contour_id;
  return report;
}

}  // namespace spdebem
