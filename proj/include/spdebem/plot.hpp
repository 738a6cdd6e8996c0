#ifndef SPDEBEM_PLOT_HPP
#define SPDEBEM_PLOT_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spdebem {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first

  Image(int w, int h, std::array<std::uint8_t, 3> fill = {255, 255, 255});
  void set(int x, int y, std::array<std::uint8_t, 3> c);
  std::array<std::uint8_t, 3> get(int x, int y) const;
  void line(int x0, int y0, int x1, int y1, std::array<std::uint8_t, 3> c);
  void write_ppm(const std::string& path) const;  // binary P6
};

/// Blue-white-red map of v in [-1, 1].
std::array<std::uint8_t, 3> diverging_color(double v);

/// R x R grid (row-major, row 0 at y = 0) as a heatmap, symmetric colour range
/// around zero; masked-out cells are grey. `scale` pixels per cell.
Image heatmap(std::span<const double> grid, int resolution, const std::vector<std::uint8_t>& mask, int scale = 2);

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::array<std::uint8_t, 3> color{0, 0, 0};
};

/// Polylines with point markers on optional log axes; non-positive values are
/// skipped on a log axis.
Image line_chart(const std::vector<Series>& series, bool log_x, bool log_y, int width = 640, int height = 480);

}  // namespace spdebem

#endif  // SPDEBEM_PLOT_HPP
