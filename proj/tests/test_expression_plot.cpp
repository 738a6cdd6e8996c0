#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "spdebem/expression.hpp"
#include "spdebem/plot.hpp"
#include "spdebem/types.hpp"

using namespace spdebem;

TEST(Expression, PrecedenceAndFunctions) {
  EXPECT_NEAR(Expression("1 + 2 * 3")(0.0), 7.0, 0.0);
  EXPECT_NEAR(Expression("-x^2")(3.0), -9.0, 0.0);
  EXPECT_NEAR(Expression("2^3^2")(0.0), 512.0, 0.0);
  EXPECT_NEAR(Expression("exp(-10*(x-0.2)^2)")(0.2), 1.0, 0.0);
  EXPECT_NEAR(Expression("1/(1+x*x)")(2.0), 0.2, 1e-16);
  EXPECT_NEAR(Expression("pi*e")(0.0), kPi * std::exp(1.0), 1e-15);
  EXPECT_NEAR(Expression("abs(tanh(x)) + sqrt(4) - log(e) + cos(0) + tan(0) + sin(0)")(-1.0), std::tanh(1.0) + 2.0, 1e-15);
  EXPECT_EQ(Expression("x").source(), "x");
}

TEST(Expression, Errors) {
  EXPECT_THROW(Expression("1 +"), DomainError);
  EXPECT_THROW(Expression("foo(x)"), DomainError);
  EXPECT_THROW(Expression("(x"), DomainError);
  EXPECT_THROW(Expression("x y"), DomainError);
}

TEST(Plot, HeatmapOrientationAndMask) {
  const int r = 3;
  std::vector<double> g(9, 0.0);
  g[0] = 1.0;  // (x, y) = (0, 0): bottom-left in the image
  std::vector<std::uint8_t> mask(9, 1);
  mask[8] = 0;
  const Image img = heatmap(g, r, mask, 1);
  EXPECT_EQ(img.width, 3);
  EXPECT_EQ(img.get(0, 2), diverging_color(1.0));
  EXPECT_EQ(img.get(2, 0), (std::array<std::uint8_t, 3>{160, 160, 160}));
  EXPECT_EQ(img.get(1, 1), diverging_color(0.0));
}

TEST(Plot, LineChartAndPpm) {
  Series s{{10, 20, 40}, {1.0, 0.5, 0.25}, {255, 0, 0}};
  const Image img = line_chart({s}, true, true, 200, 150);
  int red = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) red += img.get(x, y) == std::array<std::uint8_t, 3>{255, 0, 0};
  }
  EXPECT_GT(red, 50);
  const std::string path = ::testing::TempDir() + "/chart.ppm";
  img.write_ppm(path);
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, max = 0;
  in >> magic >> w >> h >> max;
  EXPECT_EQ(magic, "P6");
  EXPECT_EQ(w, 200);
  EXPECT_EQ(h, 150);
  EXPECT_EQ(max, 255);
  EXPECT_THROW(img.write_ppm("/nonexistent/dir/x.ppm"), IoError);
}
