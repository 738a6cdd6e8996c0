// Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]   (no arguments: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/bessel_oracle.hpp"
#include "spdebem/analysis.hpp"
#include "spdebem/basis.hpp"
#include "spdebem/basis_io.hpp"
#include "spdebem/beyn.hpp"
#include "spdebem/spde.hpp"

using namespace spdebem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

// 1. Disc wavenumbers up to 6 against Bessel zeros, multiplicity flagged.
Outcome disc_spectrum() {
  const auto levels = oracle_disc_levels(6.0);
  ScanOptions o;
  o.kappa_max = 6.0;
  o.scan_elements = [](double) { return 128; };
  o.refine_elements = [](double) { return 128; };
  const ScanReport r = scan_spectrum(unit_disc_curve(), o, BeynConfig{});
  std::vector<double> expected;
  std::vector<int> mult;
  for (const auto& l : levels) {
    for (int k = 0; k < l.multiplicity; ++k) {
      expected.push_back(l.kappa);
      mult.push_back(l.multiplicity);
    }
  }
  Outcome out;
  if (r.pairs.size() != expected.size()) {
    out.detail = "found " + std::to_string(r.pairs.size()) + " pairs, expected " + std::to_string(expected.size());
    return out;
  }
  double worst = 0.0;
  bool flags_ok = true;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    worst = std::max(worst, std::abs(r.pairs[i].kappa.real() - expected[i]));
    const bool flagged = (r.pairs[i].flags & kFlagPossibleMultiplicity) != 0;
    flags_ok = flags_ok && flagged == (mult[i] == 2) && !r.pairs[i].suspect();
  }
  out.pass = worst <= 1e-5 && flags_ok;
  out.detail = std::to_string(expected.size()) + " pairs, max |dkappa| = " + num(worst, 3) + " (tol 1e-5), multiplicity flags " +
               (flags_ok ? "consistent" : "inconsistent") + ", " + std::to_string(r.contours_solved) + " contours";
  return out;
}

// 2. Peanut ground state with scenario-1 element counts.
Outcome peanut_ground_state() {
  BuildOptions o;
  o.resolution = 41;
  BuildReport rep;
  const auto b = build_onb(make_shape("peanut"), 1, o, &rep);
  const double k = b.records[0].kappa;
  Outcome out;
  out.pass = std::abs(k - 6.51554236) <= 2e-4;
  out.detail = "kappa_1 = " + num(k, 10) + " with n_f = " + std::to_string(b.records[0].n_f) +
               ", |dkappa| = " + num(std::abs(k - 6.51554236), 3) + " (tol 2e-4)";
  return out;
}

// 3. Element convergence order of the disc ground state.
Outcome element_order() {
  const std::vector<int> nf{16, 24, 32, 48, 64};
  VerifyOptions o;
  const auto rows = verify_against_reference(make_shape("disc"), 1, nf, 256, o);
  std::vector<double> x, y;
  std::string table;
  for (const auto& r : rows) {
    x.push_back(r.n_f);
    y.push_back(r.ev_error);
    table += " " + std::to_string(r.n_f) + ":" + num(r.ev_error, 3);
  }
  const double slope = loglog_slope(x, y);
  Outcome out;
  out.pass = -slope >= 2.5;
  out.detail = "fitted order " + num(-slope, 4) + " (need >= 2.5); errors" + table;
  return out;
}

// 4. Row sums of D at a tiny wavenumber.
Outcome gauss_identity() {
  const NepMatrixAssembler a(BoundaryMesh(unit_disc_curve(), 64));
  const ComplexVector rows = a.double_layer(Complex(1e-3, 0.0)).rowwise().sum();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < rows.size(); ++i) worst = std::max(worst, std::abs(rows(i) + 0.5));
  Outcome out;
  out.pass = worst <= 5e-3;
  out.detail = "max |row sum + 1/2| = " + num(worst, 3) + " (tol 5e-3)";
  return out;
}

// 5. Gram matrix of a five-function disc basis on the 301 grid.
Outcome orthonormality() {
  BuildOptions o;
  o.resolution = 301;
  o.fixed_elements = 64;
  o.allow_multiplicity = true;
  o.sampling.orthonormalize_clusters = true;
  const auto b = build_onb(make_shape("disc01"), 5, o);
  const RealMatrix g = gram_matrix(b);
  double diag = 0.0, off = 0.0;
  for (int m = 0; m < g.rows(); ++m) {
    for (int n = 0; n < g.cols(); ++n) {
      if (m == n) diag = std::max(diag, std::abs(g(m, n) - 1.0));
      else off = std::max(off, std::abs(g(m, n)));
    }
  }
  Outcome out;
  out.pass = diag <= 1e-6 && off < 1e-3;
  out.detail = "max |G_nn - 1| = " + num(diag, 3) + " (tol 1e-6), max |G_mn| = " + num(off, 3) + " (tol 1e-3)";
  return out;
}

// 6. Stationary variance of a single noisy mode.
Outcome ou_variance() {
  OrthonormalBasis b;
  b.shape = "square";
  b.resolution = 3;
  b.records = {{std::sqrt(5.0), 5.0, 0, 0.0}};
  b.mask.assign(9, 1);
  b.functions = RowMajorMatrix::Ones(1, 9);
  SpdeProblem p;
  p.basis = std::make_shared<const PackedBasis>(b);
  p.initial = RealVector::Zero(9);
  p.nonlinearity = Nonlinearity::zero();
  p.T = 5.0;
  p.M = 200;
  p.seed = 2024;
  const RealMatrix f = final_coefficients(p, 2000);
  const double mean = f.mean();
  const double var = (f.array() - mean).square().sum() / (f.rows() - 1);
  Outcome out;
  out.pass = within_rel(var, 0.1, 0.15);
  out.detail = "sample variance " + num(var, 5) + " vs 0.1 (tol 15%)";
  return out;
}

std::shared_ptr<const PackedBasis> disc_basis(int n, int r, std::vector<std::uint8_t>* mask) {
  const auto b = disc_bessel_basis(n, r);
  *mask = b.mask;
  return std::make_shared<const PackedBasis>(b);
}

std::string conv_table(const ConvergenceTable& t) {
  std::string s;
  for (const auto& r : t.rows) s += " " + std::to_string(r.parameter) + ":" + num(r.error, 3);
  return s;
}

// 7. Time-step convergence with linear drift.
Outcome m_convergence() {
  std::vector<std::uint8_t> mask;
  SpdeProblem p;
  p.basis = disc_basis(20, 101, &mask);
  p.initial = p.basis->pack(bump_initial(0.4, 0.6, 0.3, 0.5, 101, mask));
  p.nonlinearity = Nonlinearity::identity();
  p.T = 0.1;
  p.seed = 17;
  const auto t = convergence_study(p, 'M', {10, 20, 40, 80, 160}, 100);
  Outcome out;
  out.pass = std::abs(t.slope + 1.0) <= 0.35;
  out.detail = "slope " + num(t.slope, 4) + " (target -1 +- 0.35); errors" + conv_table(t);
  return out;
}

// 8. Mode-count convergence with a nonlinear drift.
Outcome n_convergence() {
  std::vector<std::uint8_t> mask;
  SpdeProblem p;
  p.basis = disc_basis(100, 121, &mask);
  p.initial = p.basis->pack(bump_initial(0.4, 0.6, 0.3, 0.5, 121, mask));
  p.nonlinearity = Nonlinearity::rational();
  p.T = 0.1;
  p.M = 50;
  p.seed = 23;
  const auto t = convergence_study(p, 'N', {10, 20, 40, 80}, 10);
  Outcome out;
  out.pass = std::abs(t.slope + 1.0) <= 0.35;
  out.detail = "slope " + num(t.slope, 4) + " (target -1 +- 0.35); errors" + conv_table(t);
  return out;
}

// 9. Worked error-bound example.
Outcome worked_example() {
  ErrorBoundParams p;  // T=0.1, N=100, M=50, R=301, L=0.01, lambda_1=6.5155, caps 1, C=1, eps0=1e-4
  const ErrorBound loose = error_bound(p);
  ErrorBoundParams q = p;
  q.eps_lambda = 2e-5;
  q.eps_eta = 5e-7;
  const ErrorBound tight = error_bound(q);
  const auto& c = loose.constants;
  struct Check {
    const char* name;
    double value, target, rel;
  };
  const Check checks[] = {{"a2", c.a2, 0.98904, 1e-4},          {"b2", c.b2, 2.19316e-6, 5e-3},
                          {"b3", c.b3, 1.96257e-4, 5e-3},       {"b4", c.b4, 1.83156e-4, 5e-3},
                          {"b5", c.b5, 5e-5, 5e-3},             {"E234", loose.e234, 0.2234, 5e-3},
                          {"E234 tight", tight.e234, 0.02257, 5e-3}};
  Outcome out;
  out.pass = true;
  for (const auto& k : checks) {
    const bool ok = within_rel(k.value, k.target, k.rel);
    out.pass = out.pass && ok;
    out.detail += std::string(out.detail.empty() ? "" : ", ") + k.name + " " + num(k.value, 6) + (ok ? "" : "!") + "/" + num(k.target, 6);
  }
  out.detail += " (value/target, ! marks a miss)";
  return out;
}

// 10. Closed forms against literal iteration.
Outcome affine_oracle() {
  std::mt19937_64 gen(314159);
  std::uniform_real_distribution<double> a(0.05, 2.0), b(-5.0, 5.0), x(-5.0, 5.0);
  std::uniform_int_distribution<int> m(0, 50);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double ai = a(gen), bi = b(gen), xi = x(gen);
    const int mi = m(gen);
    const double lit = affine_iterate_literal(ai, bi, xi, mi);
    worst = std::max(worst, std::abs(affine_iterate(ai, bi, xi, mi) - lit) / std::max(1.0, std::abs(lit)));
  }
  Outcome out;
  out.pass = worst <= 1e-10;
  out.detail = "max relative deviation " + num(worst, 3) + " over 100 cases (tol 1e-10)";
  return out;
}

// 11. Cross-module properties.
Outcome properties() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };

  // assembly and evaluation are thread-count independent
  const NepMatrixAssembler as(BoundaryMesh(peanut_curve(), 12));
  expect((as.assemble(Complex(6.5, 0.0)) - as.assemble_serial(Complex(6.5, 0.0))).cwiseAbs().maxCoeff() == 0.0,
         "parallel assembly");
  const InteriorEvaluator ev(BoundaryMesh(peanut_curve(), 12));
  const ComplexMatrix dens = ComplexMatrix::Ones(36, 1);
  const std::vector<Point> pts{{0.5, 0.5}, {0.3, 0.6}};
  expect((ev.evaluate(Complex(6.5, 0.0), dens, pts) - ev.evaluate_serial(Complex(6.5, 0.0), dens, pts)).cwiseAbs().maxCoeff() == 0.0,
         "parallel evaluation");

  // basis invariants and persistence
  const auto b = disc_bessel_basis(10, 101);
  const RealMatrix g = gram_matrix(b);
  expect((g - RealMatrix::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-3, "Gram invariant");
  bool zeros = true;
  for (std::size_t c = 0; c < b.cells(); ++c) {
    if (!b.mask[c]) zeros = zeros && (b.functions.col(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff() == 0.0);
  }
  expect(zeros, "zero outside mask");
  const std::string path = "acceptance_roundtrip.onb2";
  save_basis(b, path);
  const auto l = load_basis(path);
  expect((l.functions - b.functions).cwiseAbs().maxCoeff() == 0.0 && l.mask == b.mask, "round trip");
  std::remove(path.c_str());

  // bound structure
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    ErrorBoundParams p;
    p.lambda_1 = 1.0 + 30.0 * u(gen);
    p.N = 1 + static_cast<int>(150 * u(gen));
    p.L = 0.4 * u(gen);
    if (std::abs(p.L * p.N - p.lambda_1) < 1e-9) continue;
    const double base = error_bound(p).total;
    expect((bound_constants(p).a2 < 1.0) == (p.L * p.N < p.lambda_1), "a2 < 1 iff L N < lambda_1");
    ErrorBoundParams q = p;
    q.eps_lambda *= 2.0;
    q.eps_eta *= 2.0;
    q.C *= 2.0;
    q.L *= 1.5;
    expect(error_bound(q).total >= base, "bound monotonicity");
  }

  // kernel positive semidefinite
  RealMatrix k(20, 20);
  std::vector<Point> kp;
  while (kp.size() < 20) {
    const Point p{u(gen), u(gen)};
    if (std::hypot(p.x - 0.5, p.y - 0.5) < 0.45) kp.push_back(p);
  }
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) k(i, j) = kernel_eval(b, kp[static_cast<std::size_t>(i)], kp[static_cast<std::size_t>(j)], 10, 2.0);
  }
  expect(Eigen::SelfAdjointEigenSolver<RealMatrix>(k).eigenvalues().minCoeff() >= -1e-8, "kernel PSD");

  // solver reproducibility with shared draws
  SpdeProblem p;
  p.basis = std::make_shared<const PackedBasis>(b);
  p.initial = p.basis->pack(bump_initial(0.4, 0.6, 0.3, 0.5, 101, b.mask));
  p.nonlinearity = Nonlinearity::bump(0.2);
  expect((solve(p, 4).coefficients - solve(p, 4).coefficients).norm() == 0.0, "solver determinism");

  Outcome out;
  out.pass = failed.empty();
  out.detail = failed.empty() ? "all property checks hold" : "failed:";
  for (const auto& f : failed) out.detail += " " + f;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"disc spectral oracle", disc_spectrum}},
      {2, {"peanut first eigenvalue", peanut_ground_state}},
      {3, {"BEM element-convergence order", element_order}},
      {4, {"Gauss identity", gauss_identity}},
      {5, {"orthonormality", orthonormality}},
      {6, {"exponential Euler statistical law", ou_variance}},
      {7, {"M-convergence, linear drift", m_convergence}},
      {8, {"N-convergence, nonlinear drift", n_convergence}},
      {9, {"error-bound reproduction", worked_example}},
      {10, {"affine-iteration oracle equivalence", affine_oracle}},
      {11, {"property suites", properties}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [id, c] : criteria) selected.push_back(id);
  }
  int failures = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << id << " [" << it->second.first << "]: " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << " (" << num(secs, 3) << " s)" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
