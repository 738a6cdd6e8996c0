#include "spdebem/basis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>

namespace spdebem {

ToleranceScenario scenario(int id) {
  switch (id) {
    case 1: return {1, 2e-4, 5e-6, 7.0, 80.0};
    case 2: return {2, 1e-4, 5e-6, 8.5, 65.0};
    case 3: return {3, 2e-4, 2e-6, 10.0, 70.0};
    default: throw DomainError("scenario must be 1, 2 or 3, got " + std::to_string(id));
  }
}

int required_elements(double kappa, const ToleranceScenario& s) {
  if (!(kappa > 0.0)) throw DomainError("required_elements: kappa must be positive");
  const double raw = std::ceil(s.slope * kappa + s.intercept);
  return static_cast<int>(std::clamp(raw, 50.0, 1200.0));
}

int default_scan_elements(double kappa) {
  return static_cast<int>(std::clamp(std::ceil(4.0 * kappa + 40.0), 48.0, 600.0));
}

RealVector OrthonormalBasis::eigenvalues() const {
  RealVector out(size());
  for (int n = 0; n < size(); ++n) out(n) = records[static_cast<std::size_t>(n)].lambda;
  return out;
}

Point grid_point(int resolution, int i, int j) {
  const double h = 1.0 / (resolution - 1);
  return {j * h, i * h};
}

std::vector<std::uint8_t> inside_mask(const BoundaryCurve& curve, int resolution, int samples) {
  if (resolution < 3 || resolution % 2 == 0) throw DomainError("inside_mask: resolution must be odd and >= 3");
  const auto poly = curve.polygon(std::max(samples, 4096));
  const std::size_t n = poly.size();
  constexpr double tol = 1e-12;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution), 0);
  std::vector<double> crossings;
  std::vector<std::size_t> near_edges;
  for (int i = 0; i < resolution; ++i) {
    const double y = grid_point(resolution, i, 0).y;
    crossings.clear();
    near_edges.clear();
    for (std::size_t e = 0; e < n; ++e) {
      const Point a = poly[e];
      const Point b = poly[(e + 1) % n];
      if (std::min(a.y, b.y) - tol <= y && y <= std::max(a.y, b.y) + tol) near_edges.push_back(e);
      if ((a.y > y) != (b.y > y)) crossings.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(crossings.begin(), crossings.end());
    for (int j = 0; j < resolution; ++j) {
      const Point p = grid_point(resolution, i, j);
      const auto right = crossings.end() - std::upper_bound(crossings.begin(), crossings.end(), p.x);
      if (right % 2 == 0) continue;
      bool touching = false;
      for (std::size_t e : near_edges) {
        const Point a = poly[e];
        const Point ab = poly[(e + 1) % n] - a;
        const double len2 = dot(ab, ab);
        const double u = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
        if (norm(p - (a + u * ab)) <= tol) {
          touching = true;
          break;
        }
      }
      if (!touching) mask[static_cast<std::size_t>(i) * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(j)] = 1;
    }
  }
  return mask;
}

std::vector<double> simpson_grid_weights(int resolution) {
  const auto w = simpson_weights(resolution);
  const auto r = static_cast<std::size_t>(resolution);
  std::vector<double> out(r * r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) out[i * r + j] = w[i] * w[j];
  }
  return out;
}

RealMatrix gram_matrix(const OrthonormalBasis& basis) {
  const PackedBasis packed(basis);
  const RealMatrix& e = packed.functions();
  return e * packed.weights().asDiagonal() * e.transpose();
}

PackedBasis::PackedBasis(const OrthonormalBasis& basis) : resolution_(basis.resolution) {
  if (basis.mask.size() != basis.cells()) throw DomainError("PackedBasis: mask size does not match R*R");
  if (basis.functions.rows() != basis.size() || static_cast<std::size_t>(basis.functions.cols()) != basis.cells()) {
    throw DomainError("PackedBasis: function block has the wrong shape");
  }
  const auto w = simpson_grid_weights(basis.resolution);
  for (std::size_t c = 0; c < basis.cells(); ++c) {
    if (basis.mask[c]) inside_.push_back(c);
  }
  const auto p = static_cast<Eigen::Index>(inside_.size());
  weights_.resize(p);
  e_.resize(basis.size(), p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const std::size_t c = inside_[static_cast<std::size_t>(k)];
    weights_(k) = w[c];
    e_.col(k) = basis.functions.col(static_cast<Eigen::Index>(c));
  }
  lambda_ = basis.eigenvalues();
}

RealVector PackedBasis::pack(std::span<const double> grid) const {
  const auto r = static_cast<std::size_t>(resolution_);
  if (grid.size() != r * r) throw DomainError("pack: grid must have R*R values");
  RealVector out(static_cast<Eigen::Index>(inside_.size()));
  for (std::size_t k = 0; k < inside_.size(); ++k) out(static_cast<Eigen::Index>(k)) = grid[inside_[k]];
  return out;
}

std::vector<double> PackedBasis::unpack(const RealVector& values) const {
  const auto r = static_cast<std::size_t>(resolution_);
  std::vector<double> grid(r * r, 0.0);
  for (std::size_t k = 0; k < inside_.size(); ++k) grid[inside_[k]] = values(static_cast<Eigen::Index>(k));
  return grid;
}

double PackedBasis::l2_norm(const RealVector& values) const {
  return std::sqrt(values.cwiseProduct(values).dot(weights_));
}

PackedBasis PackedBasis::head(int n) const {
  if (n < 1 || n > size()) throw DomainError("PackedBasis::head: n out of range");
  PackedBasis out = *this;
  out.e_ = e_.topRows(n);
  out.lambda_ = lambda_.head(n);
  return out;
}

RealVector inner_product(const OrthonormalBasis& basis, std::span<const double> grid) {
  if (grid.size() != basis.cells()) throw DomainError("inner_product: grid must have R*R values");
  const auto w = simpson_grid_weights(basis.resolution);
  RealVector weighted(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t c = 0; c < grid.size(); ++c) {
    weighted(static_cast<Eigen::Index>(c)) = basis.mask[c] ? w[c] * grid[c] : 0.0;
  }
  return basis.functions * weighted;
}

std::vector<double> reconstruct(const OrthonormalBasis& basis, const RealVector& coeffs) {
  if (coeffs.size() != basis.size()) throw DomainError("reconstruct: need one coefficient per basis function");
  const RealVector grid = basis.functions.transpose() * coeffs;
  return {grid.data(), grid.data() + grid.size()};
}

namespace {

// Sign rule: the entry of largest magnitude is positive.
void fix_sign(std::vector<double>& f) {
  std::size_t arg = 0;
  for (std::size_t c = 1; c < f.size(); ++c) {
    if (std::abs(f[c]) > std::abs(f[arg])) arg = c;
  }
  if (f[arg] < 0.0) {
    for (double& v : f) v = -v;
  }
}

// Dense polygon through the quadratic elements themselves.
std::vector<Point> mesh_polygon(const BoundaryMesh& mesh, int per_element = 8) {
  std::vector<Point> poly;
  poly.reserve(static_cast<std::size_t>(mesh.size() * per_element));
  for (int j = 0; j < mesh.size(); ++j) {
    for (int s = 0; s < per_element; ++s) {
      poly.push_back(mesh.element_point(j, static_cast<double>(s) / per_element).point);
    }
  }
  return poly;
}

}  // namespace

std::vector<std::vector<double>> sample_eigenfunctions(const std::vector<EigenPair>& pairs,
                                                       const BoundaryMesh& mesh,
                                                       const std::vector<std::uint8_t>& mask, int resolution,
                                                       const SamplingOptions& options) {
  if (pairs.empty()) return {};
  const auto r = static_cast<std::size_t>(resolution);
  if (mask.size() != r * r) throw DomainError("sample_eigenfunctions: mask size does not match R*R");
  for (const auto& p : pairs) {
    if (p.density.size() != mesh.dof()) throw DomainError("sample_eigenfunctions: density length must be 3 n_f");
  }

  // Grid points inside the true curve but outside the discrete boundary stay zero.
  const auto poly = mesh_polygon(mesh);
  std::vector<std::size_t> cells;
  std::vector<Point> points;
  for (std::size_t c = 0; c < mask.size(); ++c) {
    if (!mask[c]) continue;
    const Point x = grid_point(resolution, static_cast<int>(c / r), static_cast<int>(c % r));
    if (!point_in_polygon(poly, x)) continue;
    cells.push_back(c);
    points.push_back(x);
  }
  const auto weights_all = simpson_grid_weights(resolution);
  RealVector w(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t k = 0; k < cells.size(); ++k) w(static_cast<Eigen::Index>(k)) = weights_all[cells[k]];

  // Members of one cluster share a wavenumber up to discretization noise;
  // evaluating them at their mean wavenumber costs one pass.
  const InteriorEvaluator evaluator(mesh, options.quadrature);
  ComplexMatrix values(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(pairs.size()));
  {
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t start = 0;
    while (start < pairs.size()) {
      std::size_t stop = start + 1;
      const Complex k0 = pairs[order[start]].kappa;
      while (stop < pairs.size() && std::abs(pairs[order[stop]].kappa - k0) < 1e-8 * std::abs(k0)) ++stop;
      ComplexMatrix dens(mesh.dof(), static_cast<Eigen::Index>(stop - start));
      Complex mean = 0.0;
      for (std::size_t q = start; q < stop; ++q) {
        dens.col(static_cast<Eigen::Index>(q - start)) = pairs[order[q]].density;
        mean += pairs[order[q]].kappa;
      }
      mean /= static_cast<double>(stop - start);
      const ComplexMatrix u = evaluator.evaluate(mean, dens, points);
      for (std::size_t q = start; q < stop; ++q) values.col(static_cast<Eigen::Index>(order[q])) = u.col(static_cast<Eigen::Index>(q - start));
      start = stop;
    }
  }

  auto weighted_norm = [&w](const RealVector& v) { return std::sqrt(v.cwiseProduct(v).dot(w)); };
  std::vector<RealVector> real_functions;

  if (pairs.size() > 1 && options.orthonormalize_clusters) {
    // Orthonormal basis of the real span of {Re u_c, Im u_c}.
    const auto m = static_cast<Eigen::Index>(pairs.size());
    RealMatrix x(values.rows(), 2 * m);
    x.leftCols(m) = values.real();
    x.rightCols(m) = values.imag();
    const RealMatrix gram = x.transpose() * w.asDiagonal() * x;
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(gram);
    for (Eigen::Index c = 0; c < m; ++c) {
      const Eigen::Index col = 2 * m - 1 - c;  // descending eigenvalues
      const double mu = eig.eigenvalues()(col);
      if (!(mu > 0.0)) throw NumericError("sample_eigenfunctions: degenerate cluster span");
      real_functions.emplace_back(x * eig.eigenvectors().col(col) / std::sqrt(mu));
    }
  } else {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      ComplexVector u = values.col(c);
      Complex s = 0.0;
      for (Eigen::Index k = 0; k < u.size(); ++k) s += w(k) * u(k) * u(k);
      const double theta = 0.5 * std::arg(s);
      u *= std::exp(Complex(0.0, -theta));
      const double re = weighted_norm(u.real());
      const double im = weighted_norm(u.imag());
      if (!(re > 0.0)) throw NumericError("sample_eigenfunctions: eigenfunction vanishes on the grid");
      if (im > options.imag_tol * std::hypot(re, im)) {
        std::ostringstream msg;
        msg << "non-real eigenfunction at kappa = " << pairs[static_cast<std::size_t>(c)].kappa
            << " (imaginary fraction " << im / std::hypot(re, im) << ")";
        throw NumericError(msg.str());
      }
      real_functions.emplace_back(u.real() / re);
    }
  }

  std::vector<std::vector<double>> out;
  for (const RealVector& f : real_functions) {
    std::vector<double> grid(r * r, 0.0);
    for (std::size_t k = 0; k < cells.size(); ++k) grid[cells[k]] = f(static_cast<Eigen::Index>(k));
    fix_sign(grid);
    out.push_back(std::move(grid));
  }
  return out;
}

double weyl_estimate_area(double area, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("weyl_estimate: Lambda must be positive");
  return area * lambda / (4.0 * kPi);
}

double weyl_estimate(const BoundaryCurve& curve, double lambda) {
  return weyl_estimate_area(std::abs(curve.signed_area(1 << 16)), lambda);
}

double weyl_inverse(double area, double n) {
  if (!(area > 0.0)) throw DomainError("weyl_inverse: area must be positive");
  return 4.0 * kPi * n / area;
}

double element_cost(int n_f) { return 0.15 * n_f * static_cast<double>(n_f) + 50.0 * n_f; }

double estimate_build_cost(int n, const ToleranceScenario& s, double area) {
  if (n < 1) throw DomainError("estimate_build_cost: N must be >= 1");
  double total = 0.0;
  for (int i = 1; i <= n; ++i) total += element_cost(required_elements(std::sqrt(weyl_inverse(area, i)), s));
  return total;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

OrthonormalBasis build_onb(const BoundaryCurve& curve, int n, const BuildOptions& options, BuildReport* report) {
  if (n < 1) throw DomainError("build_onb: N must be >= 1");
  const auto t_start = std::chrono::steady_clock::now();
  const double area = std::abs(curve.signed_area(1 << 16));
  const ToleranceScenario sc = options.scenario;

  ScanOptions scan = options.scan;
  scan.alpha = options.scan.alpha;
  if (!scan.scan_elements) scan.scan_elements = default_scan_elements;
  if (!scan.refine_elements) {
    const int fixed = options.fixed_elements;
    scan.refine_elements = [fixed, sc](double kappa) { return fixed > 0 ? fixed : required_elements(kappa, sc); };
  }
  double lo = scan.kappa_min > 0.0 ? scan.kappa_min : 0.9 * faber_krahn_wavenumber(area);
  double hi = std::sqrt(weyl_inverse(area, n)) * (1.0 + options.weyl_margin);
  hi = std::max(hi, lo + 2.0 * scan.scan_radius);

  // Scan until N accepted wavenumbers are known.
  std::vector<EigenPair> found;
  int next_id = 0;
  auto accepted_count = [&found]() {
    return std::count_if(found.begin(), found.end(), [](const EigenPair& p) { return !p.suspect(); });
  };
  for (int round = 0; round < 40; ++round) {
    scan.kappa_min = lo;
    scan.kappa_max = hi;
    scan.first_contour_id = next_id;
    ScanReport rep = scan_spectrum(curve, scan, options.beyn);
    next_id = rep.next_contour_id;
    for (auto& p : rep.pairs) found.push_back(std::move(p));
    found = dedupe_pairs(std::move(found), scan.dedupe_tol);
    if (options.verbose) {
      std::clog << "spdebem: scanned [" << lo << ", " << hi << "], " << accepted_count() << " accepted pairs\n";
    }
    if (accepted_count() >= n) break;
    lo = hi;
    hi *= 1.25;
  }
  if (accepted_count() < n) {
    throw SpectralAnomaly("found only " + std::to_string(accepted_count()) + " accepted eigenpairs, need " +
                          std::to_string(n));
  }
  const double scan_seconds = seconds_since(t_start);

  std::vector<EigenPair> chosen;
  for (auto& p : found) {
    if (p.suspect()) {
      std::clog << "spdebem: skipping suspect pair kappa = " << p.kappa << " (" << flag_string(p.flags) << ")\n";
      continue;
    }
    if (static_cast<int>(chosen.size()) < n) chosen.push_back(p);
  }

  if (!options.allow_multiplicity) {
    std::ostringstream cluster;
    for (const auto& p : chosen) {
      if (p.flags & kFlagPossibleMultiplicity) cluster << ' ' << p.kappa.real();
    }
    if (!cluster.str().empty()) {
      throw SpectralAnomaly("possible multiplicity among the first " + std::to_string(n) +
                            " eigenvalues; cluster wavenumbers:" + cluster.str());
    }
  }

  OrthonormalBasis basis;
  basis.shape = curve.name();
  basis.alpha = scan.alpha;
  basis.resolution = options.resolution;
  basis.mask = inside_mask(curve, options.resolution);
  basis.functions.resize(n, static_cast<Eigen::Index>(basis.cells()));

  BuildReport local;
  local.kappa_max = hi;
  local.scan_seconds = scan_seconds;
  local.predicted_cost = estimate_build_cost(n, sc, area);

  // Sample cluster by cluster (pairs from one refinement contour).
  std::size_t pos = 0;
  while (pos < chosen.size()) {
    std::size_t end = pos + 1;
    while (end < chosen.size() && chosen[end].contour == chosen[pos].contour) ++end;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<EigenPair> group(chosen.begin() + static_cast<std::ptrdiff_t>(pos),
                                       chosen.begin() + static_cast<std::ptrdiff_t>(end));
    const BoundaryMesh mesh(curve, group.front().n_f, scan.alpha);
    SamplingOptions so = options.sampling;
    so.orthonormalize_clusters = so.orthonormalize_clusters || options.allow_multiplicity;
    std::vector<std::vector<double>> grids;
    if (group.size() > 1 && !so.orthonormalize_clusters) {
      for (const auto& p : group) {
        auto g = sample_eigenfunctions({p}, mesh, basis.mask, options.resolution, so);
        grids.push_back(std::move(g.front()));
      }
    } else {
      grids = sample_eigenfunctions(group, mesh, basis.mask, options.resolution, so);
    }
    const double share = seconds_since(t0) / static_cast<double>(group.size());
    for (std::size_t q = 0; q < group.size(); ++q) {
      const auto& p = group[q];
      const auto row = static_cast<Eigen::Index>(pos + q);
      basis.functions.row(row) = Eigen::Map<const RealVector>(grids[q].data(), static_cast<Eigen::Index>(grids[q].size())).transpose();
      BasisRecord rec{p.kappa.real(), p.kappa.real() * p.kappa.real(), static_cast<std::uint32_t>(p.n_f), p.residual};
      basis.records.push_back(rec);
      local.entries.push_back({rec, flag_string(p.flags), share});
    }
    if (options.verbose) {
      std::clog << "spdebem: sampled " << group.size() << " function(s) at kappa = " << group.front().kappa.real()
                << " with n_f = " << group.front().n_f << "\n";
    }
    pos = end;
  }

  const RealMatrix g = gram_matrix(basis);
  for (Eigen::Index a = 0; a < g.rows(); ++a) {
    local.gram_diag_dev_max = std::max(local.gram_diag_dev_max, std::abs(g(a, a) - 1.0));
    for (Eigen::Index b = 0; b < g.cols(); ++b) {
      if (a != b) local.gram_offdiag_max = std::max(local.gram_offdiag_max, std::abs(g(a, b)));
    }
  }

  basis.metadata["scenario"] = std::to_string(sc.id);
  {
    std::ostringstream s;
    s.precision(17);
    s << sc.eps_lambda;
    basis.metadata["eps_lambda"] = s.str();
    s.str("");
    s << sc.eps_eta;
    basis.metadata["eps_eta"] = s.str();
    s.str("");
    s << sc.slope << "," << sc.intercept;
    basis.metadata["element_rule"] = s.str();
  }
  basis.metadata["seed"] = std::to_string(options.beyn.seed);
  basis.metadata["fixed_elements"] = std::to_string(options.fixed_elements);
  basis.metadata["multiplicity"] = options.allow_multiplicity ? "orthonormalized" : "rejected";
  basis.metadata["curve"] = curve.provenance().empty() ? "analytic" : curve.provenance();
  basis.metadata["scale"] = std::to_string(curve.scale());

  local.total_seconds = seconds_since(t_start);
  if (report) *report = std::move(local);
  return basis;
}

std::vector<VerifyRow> verify_against_reference(const BoundaryCurve& curve, int index,
                                                const std::vector<int>& n_f_list, int n_f_ref,
                                                const VerifyOptions& options) {
  if (index < 1) throw DomainError("verify_against_reference: index is 1-based");
  for (int nf : n_f_list) {
    if (nf > n_f_ref) throw DomainError("verify_against_reference: n_f_ref must be >= every n_f in the list");
  }
  const double area = std::abs(curve.signed_area(1 << 16));

  // Locate the index-th wavenumber with a coarse candidate scan.
  ScanOptions scan;
  scan.alpha = options.alpha;
  scan.quadrature = options.quadrature;
  scan.refine = false;
  const int coarse = options.scan_elements;
  scan.scan_elements = [coarse](double k) { return coarse > 0 ? coarse : default_scan_elements(k); };
  scan.refine_elements = scan.scan_elements;
  double lo = 0.9 * faber_krahn_wavenumber(area);
  double hi = std::max(std::sqrt(weyl_inverse(area, index)) * 1.2, lo + 1.0);
  std::vector<EigenPair> cands;
  for (int round = 0; round < 40 && static_cast<int>(cands.size()) < index + 1; ++round) {
    scan.kappa_min = lo;
    scan.kappa_max = hi;
    scan.first_contour_id = round * 1000;
    for (auto& p : scan_spectrum(curve, scan, options.beyn).pairs) cands.push_back(std::move(p));
    cands = dedupe_pairs(std::move(cands), scan.dedupe_tol);
    lo = hi;
    hi *= 1.25;
  }
  if (static_cast<int>(cands.size()) < index) throw SpectralAnomaly("could not locate eigenvalue " + std::to_string(index));
  const double target = cands[static_cast<std::size_t>(index - 1)].kappa.real();
  double radius = 0.2;
  for (const auto& p : cands) {
    const double gap = std::abs(p.kappa.real() - target);
    if (gap > 1e-3 * target) radius = std::min(radius, 0.5 * gap);
  }

  const auto mask = inside_mask(curve, options.resolution);
  const auto weights = simpson_grid_weights(options.resolution);
  struct Solved {
    double kappa;
    std::vector<double> grid;
  };
  std::map<int, Solved> cache;
  auto solve_for = [&](int nf) -> const Solved& {
    auto it = cache.find(nf);
    if (it != cache.end()) return it->second;
    const BoundaryMesh mesh(curve, nf, options.alpha);
    const NepMatrixAssembler as(mesh, options.quadrature);
    auto pairs = solve_nep(as, Contour{target, radius, options.beyn.nodes}, options.beyn);
    if (pairs.empty()) throw SpectralAnomaly("no eigenvalue near " + std::to_string(target) + " for n_f = " + std::to_string(nf));
    if (pairs.size() > 1) {
      throw SpectralAnomaly("eigenvalue near " + std::to_string(target) + " is not simple for n_f = " + std::to_string(nf));
    }
    SamplingOptions so;
    so.quadrature = options.quadrature;
    auto grids = sample_eigenfunctions(pairs, mesh, mask, options.resolution, so);
    return cache.emplace(nf, Solved{pairs.front().kappa.real(), std::move(grids.front())}).first->second;
  };

  const Solved& ref = solve_for(n_f_ref);
  std::vector<VerifyRow> rows;
  for (int nf : n_f_list) {
    const Solved& s = solve_for(nf);
    double inner = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c) inner += weights[c] * s.grid[c] * ref.grid[c];
    const double sign = inner < 0.0 ? -1.0 : 1.0;
    double err2 = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
      const double d = sign * s.grid[c] - ref.grid[c];
      err2 += weights[c] * d * d;
    }
    rows.push_back({nf, s.kappa, std::abs(s.kappa - ref.kappa), std::sqrt(err2)});
  }
  return rows;
}

OrthonormalBasis disc_bessel_basis(int n, int resolution) {
  if (n < 1) throw DomainError("disc_bessel_basis: N must be >= 1");
  const double a = 0.5;
  struct Mode {
    double j;
    int m;
    int kind;  // 0 cos, 1 sin
  };
  // Enough zeros to cover N modes by the Weyl count with a safety factor.
  const double j_max = a * std::sqrt(weyl_inverse(kPi * a * a, n)) * 1.3 + 6.0;
  std::vector<Mode> modes;
  for (int m = 0;; ++m) {
    if (boost::math::cyl_bessel_j_zero(static_cast<double>(m), 1) > j_max) break;
    for (int k = 1;; ++k) {
      const double j = boost::math::cyl_bessel_j_zero(static_cast<double>(m), k);
      if (j > j_max) break;
      modes.push_back({j, m, 0});
      if (m > 0) modes.push_back({j, m, 1});
    }
  }
  std::stable_sort(modes.begin(), modes.end(), [](const Mode& x, const Mode& y) { return x.j < y.j; });
  if (static_cast<int>(modes.size()) < n) throw NumericError("disc_bessel_basis: not enough Bessel zeros");
  modes.resize(static_cast<std::size_t>(n));

  OrthonormalBasis basis;
  basis.shape = "disc01-bessel";
  basis.resolution = resolution;
  basis.mask = inside_mask(unit_square_disc_curve(), resolution);
  basis.functions.setZero(n, static_cast<Eigen::Index>(basis.cells()));
  const auto w = simpson_grid_weights(resolution);
  for (int q = 0; q < n; ++q) {
    const Mode& md = modes[static_cast<std::size_t>(q)];
    std::vector<double> grid(basis.cells(), 0.0);
    double norm2 = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
      if (!basis.mask[c]) continue;
      const Point p = grid_point(resolution, static_cast<int>(c / static_cast<std::size_t>(resolution)),
                                 static_cast<int>(c % static_cast<std::size_t>(resolution)));
      const double dx = p.x - 0.5, dy = p.y - 0.5;
      const double rho = std::hypot(dx, dy) / a;
      const double theta = std::atan2(dy, dx);
      const double angular = md.kind == 0 ? std::cos(md.m * theta) : std::sin(md.m * theta);
      grid[c] = boost::math::cyl_bessel_j(static_cast<double>(md.m), md.j * rho) * angular;
      norm2 += w[c] * grid[c] * grid[c];
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& v : grid) v *= scale;
    fix_sign(grid);
    basis.functions.row(q) = Eigen::Map<const RealVector>(grid.data(), static_cast<Eigen::Index>(grid.size())).transpose();
    const double kappa = md.j / a;
    basis.records.push_back({kappa, kappa * kappa, 0, 0.0});
  }
  basis.metadata["source"] = "analytic Bessel modes";
  return basis;
}

}  // namespace spdebem
