#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles/bessel_oracle.hpp"
#include "spdebem/basis.hpp"
#include "spdebem/beyn.hpp"

using namespace spdebem;

namespace {

// Diagonal test problem: eigenvalues 1, 2 (nonlinear entries) and a linear tail.
ComplexMatrix toy(Complex z) {
  ComplexMatrix m = ComplexMatrix::Zero(12, 12);
  m(0, 0) = z * z - 4.0;
  m(1, 1) = std::exp(z) - std::exp(1.0);
  for (int i = 2; i < 12; ++i) m(i, i) = z - (3.0 + i);
  return m;
}

}  // namespace

TEST(Contour, Geometry) {
  const Contour c{Complex(1.0, 0.5), 2.0, 16};
  EXPECT_LT(std::abs(c.point(0) - Complex(3.0, 0.5)), 1e-15);
  EXPECT_LT(std::abs(c.derivative(4) - Complex(-2.0, 0.0)), 1e-14);
  EXPECT_TRUE(c.contains(Complex(2.0, 0.5)));
  EXPECT_FALSE(c.contains(Complex(3.5, 0.5)));
}

TEST(Beyn, FindsEigenvaluesInsideOnly) {
  BeynConfig cfg;
  cfg.ell = 6;
  cfg.nodes = 64;
  const auto pairs = solve_nep(toy, 12, Contour{Complex(1.5, 0.0), 0.8, 64}, cfg);
  ASSERT_EQ(pairs.size(), 2u);
  std::vector<double> re{pairs[0].kappa.real(), pairs[1].kappa.real()};
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], 1.0, 1e-10);
  EXPECT_NEAR(re[1], 2.0, 1e-10);
  for (const auto& p : pairs) {
    EXPECT_LT(p.residual, 1e-9);
    EXPECT_FALSE(p.suspect());
    EXPECT_NEAR(p.density.norm(), 1.0, 1e-12);
  }
}

TEST(Beyn, ProbeRankExhaustionIsReported) {
  BeynConfig cfg;
  cfg.ell = 3;
  cfg.nodes = 64;
  // five eigenvalues (5..9) inside a contour probed with three columns
  EXPECT_THROW(solve_nep(toy, 12, Contour{Complex(7.0, 0.0), 2.5, 64}, cfg), SpectralAnomaly);
}

TEST(Beyn, SingularNodeIsReported) {
  BeynConfig cfg;
  cfg.ell = 4;
  // node 0 lands on z = 2 exactly
  EXPECT_THROW(solve_nep(toy, 12, Contour{Complex(1.5, 0.0), 0.5, 8}, cfg), NumericError);
}

TEST(Beyn, ProbeIsDeterministic) {
  const ComplexMatrix a = random_probe(9, 4, 42);
  const ComplexMatrix b = random_probe(9, 4, 42);
  const ComplexMatrix c = random_probe(9, 4, 43);
  EXPECT_EQ((a - b).norm(), 0.0);
  EXPECT_GT((a - c).norm(), 0.1);
}

TEST(Beyn, RankTruncationKeepsLargeSingularValues) {
  ComplexMatrix a = ComplexMatrix::Zero(6, 4);
  a(0, 0) = 3.0;
  a(1, 1) = 1e-2;
  a(2, 2) = 1e-7;
  const auto t = rank_truncate(a, 1e-4);
  EXPECT_EQ(t.rank, 2);
  EXPECT_NEAR(t.sigma0(0), 3.0, 1e-14);
  EXPECT_THROW(rank_truncate(ComplexMatrix::Identity(4, 4), 1e-4), SpectralAnomaly);
}

TEST(Dedupe, MergesAcrossContoursOnly) {
  auto pair = [](double k, int contour, double res) {
    EigenPair p;
    p.kappa = Complex(k, 0.0);
    p.lambda = k * k;
    p.contour = contour;
    p.residual = res;
    return p;
  };
  const auto out = dedupe_pairs({pair(3.0, 0, 1e-9), pair(3.0 + 1e-9, 1, 1e-11), pair(4.0, 1, 1e-9),
                                 pair(5.0, 2, 1e-9), pair(5.0 + 1e-9, 2, 1e-9)},
                                1e-6);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(out[0].contour, 1);
  EXPECT_DOUBLE_EQ(out[0].residual, 1e-11);
  EXPECT_NEAR(out[2].kappa.real(), 5.0, 1e-8);
  EXPECT_NEAR(out[3].kappa.real(), 5.0, 1e-8);
}

TEST(Flags, TextForm) {
  EXPECT_EQ(flag_string(kFlagNone), "ok");
  const std::string s = flag_string(kFlagSuspectResidual | kFlagPossibleMultiplicity);
  EXPECT_NE(s.find('|'), std::string::npos);
}

TEST(FaberKrahn, DiscIsExtremal) {
  const double j01 = oracle_bessel_zeros(0, 3.0).front();
  EXPECT_NEAR(faber_krahn_wavenumber(kPi), j01, 1e-12);
  EXPECT_THROW(faber_krahn_wavenumber(0.0), DomainError);
}

TEST(BemEigen, DiscGroundStateOnCoarseMesh) {
  const double j01 = oracle_bessel_zeros(0, 3.0).front();
  const NepMatrixAssembler a(BoundaryMesh(unit_disc_curve(), 32));
  const auto pairs = solve_nep(a, Contour{Complex(2.4, 0.0), 0.2, 24}, BeynConfig{});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_NEAR(pairs[0].kappa.real(), j01, 1e-4);
  EXPECT_LT(std::abs(pairs[0].kappa.imag()), 1e-6);
  EXPECT_EQ(pairs[0].n_f, 32);
  EXPECT_NEAR(pairs[0].lambda, pairs[0].kappa.real() * pairs[0].kappa.real(), 1e-12);
}

TEST(Scan, DiscLowSpectrumWithMultiplicity) {
  const auto levels = oracle_disc_levels(4.3);
  ScanOptions o;
  o.kappa_max = 4.3;
  o.scan_elements = [](double) { return 40; };
  o.refine_elements = [](double) { return 48; };
  const ScanReport r = scan_spectrum(unit_disc_curve(), o, BeynConfig{});
  ASSERT_EQ(r.pairs.size(), 3u);  // j01 and the double j11
  EXPECT_NEAR(r.pairs[0].kappa.real(), levels[0].kappa, 2e-4);
  EXPECT_NEAR(r.pairs[1].kappa.real(), levels[1].kappa, 2e-4);
  EXPECT_NEAR(r.pairs[2].kappa.real(), levels[1].kappa, 2e-4);
  EXPECT_TRUE(r.pairs[1].flags & kFlagPossibleMultiplicity);
  EXPECT_TRUE(r.pairs[2].flags & kFlagPossibleMultiplicity);
  EXPECT_FALSE(r.pairs[0].flags & kFlagPossibleMultiplicity);
  EXPECT_GE(r.contours_solved, 3);
  for (std::size_t i = 1; i < r.pairs.size(); ++i) EXPECT_LE(r.pairs[i - 1].kappa.real(), r.pairs[i].kappa.real());
}

TEST(Scan, RequiresElementRules) {
  ScanOptions o;
  o.kappa_max = 4.0;
  EXPECT_THROW(scan_spectrum(unit_disc_curve(), o, BeynConfig{}), DomainError);
}
