#include "spdebem/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "spdebem/types.hpp"

namespace spdebem {

Image::Image(int w, int h, std::array<std::uint8_t, 3> fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw DomainError("image: dimensions must be positive");
  rgb.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  for (std::size_t i = 0; i < rgb.size(); i += 3) std::copy(fill.begin(), fill.end(), rgb.begin() + static_cast<long>(i));
}

void Image::set(int x, int y, std::array<std::uint8_t, 3> c) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const std::size_t o = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
  std::copy(c.begin(), c.end(), rgb.begin() + static_cast<long>(o));
}

std::array<std::uint8_t, 3> Image::get(int x, int y) const {
  const std::size_t o = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
  return {rgb[o], rgb[o + 1], rgb[o + 2]};
}

void Image::line(int x0, int y0, int x1, int y1, std::array<std::uint8_t, 3> c) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    set(x0, y0, c);
    if (x0 == x1 && y0 == y1) return;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void Image::write_ppm(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "P6\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::array<std::uint8_t, 3> diverging_color(double v) {
  v = std::clamp(v, -1.0, 1.0);
  auto mix = [](double a, double b, double t) { return static_cast<std::uint8_t>(std::lround(a + (b - a) * t)); };
  if (v < 0.0) return {mix(255, 40, -v), mix(255, 70, -v), mix(255, 200, -v)};
  return {mix(255, 200, v), mix(255, 40, v), mix(255, 40, v)};
}

Image heatmap(std::span<const double> grid, int resolution, const std::vector<std::uint8_t>& mask, int scale) {
  const auto r = static_cast<std::size_t>(resolution);
  if (grid.size() != r * r || mask.size() != r * r) throw DomainError("heatmap: grid and mask must hold R*R values");
  double peak = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (mask[c]) peak = std::max(peak, std::abs(grid[c]));
  }
  if (peak == 0.0) peak = 1.0;
  Image img(resolution * scale, resolution * scale);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * r + static_cast<std::size_t>(j);
      const auto colour = mask[c] ? diverging_color(grid[c] / peak) : std::array<std::uint8_t, 3>{160, 160, 160};
      // y grows upwards in the grid, downwards in the image
      const int top = (resolution - 1 - i) * scale;
      for (int a = 0; a < scale; ++a) {
        for (int b = 0; b < scale; ++b) img.set(j * scale + b, top + a, colour);
      }
    }
  }
  return img;
}

Image line_chart(const std::vector<Series>& series, bool log_x, bool log_y, int width, int height) {
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0) && (!log_y || y > 0.0);
  };
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x_lo = std::min(x_lo, tx(s.x[i]));
      x_hi = std::max(x_hi, tx(s.x[i]));
      y_lo = std::min(y_lo, ty(s.y[i]));
      y_hi = std::max(y_hi, ty(s.y[i]));
    }
  }
  Image img(width, height);
  const int margin = 40;
  const std::array<std::uint8_t, 3> axis{0, 0, 0};
  const std::array<std::uint8_t, 3> grid_colour{225, 225, 225};
  if (!(x_lo <= x_hi)) return img;
  if (x_hi - x_lo < 1e-12) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi - y_lo < 1e-12) y_lo -= 0.5, y_hi += 0.5;
  const double pad_y = 0.05 * (y_hi - y_lo);
  y_lo -= pad_y;
  y_hi += pad_y;
  auto px = [&](double v) { return margin + static_cast<int>(std::lround((tx(v) - x_lo) / (x_hi - x_lo) * (width - 2 * margin))); };
  auto py = [&](double v) { return height - margin - static_cast<int>(std::lround((ty(v) - y_lo) / (y_hi - y_lo) * (height - 2 * margin))); };

  // decade gridlines on log axes
  if (log_x) {
    for (double d = std::ceil(x_lo); d <= x_hi; d += 1.0) {
      const int x = px(std::pow(10.0, d));
      img.line(x, margin, x, height - margin, grid_colour);
    }
  }
  if (log_y) {
    for (double d = std::ceil(y_lo); d <= y_hi; d += 1.0) {
      const int y = py(std::pow(10.0, d));
      img.line(margin, y, width - margin, y, grid_colour);
    }
  }
  img.line(margin, height - margin, width - margin, height - margin, axis);
  img.line(margin, margin, margin, height - margin, axis);

  for (const auto& s : series) {
    bool have_prev = false;
    int prev_x = 0, prev_y = 0;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) {
        have_prev = false;
        continue;
      }
      const int x = px(s.x[i]);
      const int y = py(s.y[i]);
      if (have_prev) img.line(prev_x, prev_y, x, y, s.color);
      for (int a = -2; a <= 2; ++a) {
        for (int b = -2; b <= 2; ++b) img.set(x + a, y + b, s.color);
      }
      prev_x = x;
      prev_y = y;
      have_prev = true;
    }
  }
  return img;
}

}  // namespace spdebem
