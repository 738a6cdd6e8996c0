#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oracles/bessel_oracle.hpp"
#include "spdebem/basis.hpp"
#include "spdebem/basis_io.hpp"

using namespace spdebem;

TEST(ElementRule, ScenariosAndClamping) {
  EXPECT_EQ(required_elements(40.0, scenario(1)), 360);
  EXPECT_EQ(required_elements(80.0, scenario(2)), 745);
  EXPECT_EQ(required_elements(1e-9, scenario(3)), 71);
  EXPECT_EQ(required_elements(1e4, scenario(1)), 1200);
  EXPECT_EQ(required_elements(6.51554236, scenario(1)), 126);
  EXPECT_THROW(scenario(4), DomainError);
  EXPECT_THROW(required_elements(0.0, scenario(1)), DomainError);
}

TEST(Weyl, EstimateAndInverse) {
  EXPECT_NEAR(weyl_estimate_area(kPi, 100.0), 25.0, 1e-12);
  EXPECT_NEAR(weyl_estimate_area(2 * kPi, 100.0), 50.0, 1e-12);
  EXPECT_NEAR(weyl_estimate_area(0.7, weyl_inverse(0.7, 13.0)), 13.0, 1e-12);
  // true count (with multiplicity) of unit-disc eigenvalues below 100
  int count = 0;
  for (const auto& l : oracle_disc_levels(10.0)) count += l.multiplicity;
  EXPECT_NEAR(count, weyl_estimate(unit_disc_curve(), 100.0), 0.3 * 25.0);
}

TEST(Cost, ModelConstants) {
  EXPECT_DOUBLE_EQ(element_cost(100), 6500.0);
  double prev = 0.0;
  for (int n : {1, 5, 20, 80}) {
    const double c = estimate_build_cost(n, scenario(1), 0.5224);
    EXPECT_GT(c, prev);
    prev = c;
  }
}

TEST(Grid, MaskAndWeights) {
  const int r = 81;
  const auto mask = inside_mask(circle_curve({0.5, 0.5}, 0.4), r);
  double inside = 0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      inside += mask[static_cast<std::size_t>(i * r + j)];
      EXPECT_EQ(mask[static_cast<std::size_t>(i * r + j)], mask[static_cast<std::size_t>(j * r + i)]);
    }
  }
  // each node stands for one cell of side 1/(r-1)
  EXPECT_NEAR(inside / ((r - 1.0) * (r - 1.0)), kPi * 0.16, 0.02 * kPi * 0.16);
  const auto none = inside_mask(circle_curve({5.0, 5.0}, 0.5), r);
  EXPECT_EQ(std::count(none.begin(), none.end(), 1), 0);
  const auto w = simpson_grid_weights(r);
  double sum = 0.0;
  for (double v : w) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-13);
  EXPECT_EQ(grid_point(r, 0, 80).x, 1.0);
  EXPECT_EQ(grid_point(r, 40, 0).y, 0.5);
}

TEST(AnalyticDisc, BesselModesAreOrthonormal) {
  const auto b = disc_bessel_basis(8, 101);
  ASSERT_EQ(b.size(), 8);
  const RealMatrix g = gram_matrix(b);
  EXPECT_LT((g - RealMatrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-5);
  // lambda = (j_mn / 0.5)^2 in oracle order, doubled levels for m > 0
  std::vector<double> expected;
  for (const auto& l : oracle_disc_levels(14.0, 0.5)) {
    for (int k = 0; k < l.multiplicity; ++k) expected.push_back(l.kappa * l.kappa);
  }
  for (int n = 0; n < 8; ++n) EXPECT_NEAR(b.records[static_cast<std::size_t>(n)].lambda, expected[static_cast<std::size_t>(n)], 1e-9);
}

TEST(Projection, InnerProductAndReconstruct) {
  const auto b = disc_bessel_basis(6, 61);
  RealVector c(6);
  c << 0.3, -1.0, 0.5, 0.0, 2.0, 0.1;
  const auto grid = reconstruct(b, c);
  const RealVector back = inner_product(b, grid);
  EXPECT_LT((back - c).cwiseAbs().maxCoeff(), 1e-3);
  const std::vector<double> zero(grid.size(), 0.0);
  EXPECT_EQ(inner_product(b, zero).norm(), 0.0);

  const PackedBasis p(b);
  EXPECT_LT((p.project(p.field(c)) - back).norm(), 1e-12);
  const PackedBasis h = p.head(3);
  EXPECT_EQ(h.size(), 3);
  EXPECT_EQ(h.inside().size(), p.inside().size());
  EXPECT_LT((h.functions() - p.functions().topRows(3)).norm(), 1e-15);
  const auto unpacked = p.unpack(p.pack(grid));
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(unpacked[k], grid[k]);
}

TEST(Persistence, RoundTripIsBitExact) {
  auto b = disc_bessel_basis(3, 31);
  b.metadata["note"] = "round trip";
  const std::string path = ::testing::TempDir() + "/rt.onb2";
  save_basis(b, path);
  write_manifest(manifest_path(path), b.metadata);
  const auto l = load_basis(path);
  EXPECT_EQ(l.shape, b.shape);
  EXPECT_EQ(l.alpha, b.alpha);
  EXPECT_EQ(l.resolution, b.resolution);
  EXPECT_EQ(l.mask, b.mask);
  EXPECT_EQ((l.functions - b.functions).cwiseAbs().maxCoeff(), 0.0);
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_EQ(l.records[n].kappa, b.records[n].kappa);
    EXPECT_EQ(l.records[n].n_f, b.records[n].n_f);
  }
  EXPECT_EQ(l.metadata.at("note"), "round trip");

  // second save is byte-identical
  const std::string path2 = ::testing::TempDir() + "/rt2.onb2";
  save_basis(l, path2);
  std::ifstream a(path, std::ios::binary), c(path2, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sc((std::istreambuf_iterator<char>(c)), {});
  EXPECT_EQ(sa, sc);

  std::ofstream bad(path2, std::ios::binary);
  bad << "XXXX";
  bad.close();
  EXPECT_THROW(load_basis(path2), IoError);
  EXPECT_THROW(load_basis(::testing::TempDir() + "/missing.onb2"), IoError);
  std::remove(path.c_str());
  std::remove(path2.c_str());
  std::remove(manifest_path(path).c_str());
}

TEST(Build, DiscGroundStateMatchesBessel) {
  const double j01 = oracle_bessel_zeros(0, 3.0).front();
  BuildOptions o;
  o.resolution = 41;
  o.fixed_elements = 64;
  const auto b = build_onb(make_shape("disc01"), 1, o);
  ASSERT_EQ(b.size(), 1);
  // radius 1/2: lambda = 4 j01^2
  EXPECT_NEAR(b.records[0].lambda, 4.0 * j01 * j01, 4.0 * 1e-5);
  EXPECT_LT(b.records[0].residual, 1e-6);
  // profile c J0(2 j01 r) with c fitted by least squares
  const int r = b.resolution;
  double num = 0.0, den = 0.0;
  std::vector<double> exact(b.cells(), 0.0);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const std::size_t c = static_cast<std::size_t>(i * r + j);
      if (!b.mask[c]) continue;
      const Point p = grid_point(r, i, j);
      exact[c] = static_cast<double>(oracle_bessel_j(0, 2.0L * j01 * std::hypot(p.x - 0.5, p.y - 0.5)));
      num += exact[c] * b.functions(0, static_cast<Eigen::Index>(c));
      den += exact[c] * exact[c];
    }
  }
  const double scale = num / den;
  double dev = 0.0;
  for (std::size_t c = 0; c < exact.size(); ++c) {
    dev = std::max(dev, std::abs(b.functions(0, static_cast<Eigen::Index>(c)) - scale * exact[c]));
    if (!b.mask[c]) EXPECT_EQ(b.functions(0, static_cast<Eigen::Index>(c)), 0.0);
  }
  EXPECT_LT(dev, 1e-4);
  EXPECT_GT(scale, 0.0);  // sign rule: the peak at the centre is positive
}

TEST(Build, MultiplicityAbortsUnlessAllowed) {
  BuildOptions o;
  o.resolution = 21;
  o.fixed_elements = 48;
  EXPECT_THROW(build_onb(make_shape("disc01"), 2, o), SpectralAnomaly);
  o.allow_multiplicity = true;
  o.sampling.orthonormalize_clusters = true;
  const auto b = build_onb(make_shape("disc01"), 3, o);
  ASSERT_EQ(b.size(), 3);
  EXPECT_NEAR(b.records[1].kappa, b.records[2].kappa, 1e-6);
}

TEST(Verify, ReferenceRowIsZero) {
  VerifyOptions o;
  o.resolution = 21;
  const auto rows = verify_against_reference(make_shape("disc01"), 1, {16, 32}, 32, o);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].ev_error, 0.0);
  EXPECT_EQ(rows[1].ef_error, 0.0);
  EXPECT_GT(rows[0].ev_error, 0.0);
}
