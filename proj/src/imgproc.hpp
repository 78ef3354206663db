#pragma once

// Internal image plumbing shared by flow, synth and metrics.

#include <cstddef>
#include <span>
#include <vector>

#include "phyfid/fields.hpp"

namespace phyfid::detail {

/// Mutable working buffer. Public field types are immutable, so algorithms
/// build into a Plane and convert at the end.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  std::span<double> row(int y) {
    return std::span<double>(data).subspan(static_cast<std::size_t>(y) * width, width);
  }
  std::span<const double> row(int y) const {
    return std::span<const double>(data).subspan(static_cast<std::size_t>(y) * width, width);
  }
  GridView view() const { return {width, height, data}; }
};

/// Mirror index into [0, n) without repeating the edge sample (…2 1 | 0 1 2…).
int reflect101(int i, int n);

/// Copy with a reflective border of r pixels on every side.
Plane pad_reflect(GridView src, int r);

/// Separable correlation with a symmetric 1-D kernel of odd length,
/// reflective borders.
Plane separable_filter(GridView src, std::span<const double> kernel);

/// Normalized Gaussian taps exp(-t^2 / 2 sigma^2) for t in [-radius, radius].
std::vector<double> gaussian_kernel(double sigma, int radius);

/// Bilinear sample with coordinates clamped to the grid.
double sample_bilinear(GridView src, double x, double y);

/// Point-sample src at (x / scale, y / scale) onto a width x height grid.
Plane resample(GridView src, int width, int height, double scale);

}  // namespace phyfid::detail
