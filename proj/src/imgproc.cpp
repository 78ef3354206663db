#include "imgproc.hpp"

#include <algorithm>
#include <cmath>

#include "phyfid/kernels.hpp"

namespace phyfid::detail {

int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

Plane pad_reflect(GridView src, int r) {
  Plane out(src.width + 2 * r, src.height + 2 * r);
  for (int y = 0; y < out.height; ++y) {
    const int sy = reflect101(y - r, src.height);
    for (int x = 0; x < out.width; ++x) {
      out.at(x, y) = src(reflect101(x - r, src.width), sy);
    }
  }
  return out;
}

Plane separable_filter(GridView src, std::span<const double> kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  const Plane padded = pad_reflect(src, r);

  // Horizontal pass over the padded rows, keeping the vertical padding.
  Plane horiz(src.width, padded.height);
  for (int y = 0; y < padded.height; ++y) {
    const auto in = padded.row(y);
    auto out = horiz.row(y);
    for (std::size_t t = 0; t < kernel.size(); ++t) {
      kernels::axpy(kernel[t], in.subspan(t, src.width), out);
    }
  }

  Plane result(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    auto out = result.row(y);
    for (std::size_t t = 0; t < kernel.size(); ++t) {
      kernels::axpy(kernel[t], horiz.row(y + static_cast<int>(t)), out);
    }
  }
  return result;
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    k[t + radius] = std::exp(-(t * t) / (2.0 * sigma * sigma));
    total += k[t + radius];
  }
  for (auto& v : k) v /= total;
  return k;
}

double sample_bilinear(GridView src, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(src.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(src.height - 1));
  const int x0 = std::min(static_cast<int>(x), src.width - 1);
  const int y0 = std::min(static_cast<int>(y), src.height - 1);
  const int x1 = std::min(x0 + 1, src.width - 1);
  const int y1 = std::min(y0 + 1, src.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = src(x0, y0) * (1.0 - fx) + src(x1, y0) * fx;
  const double bottom = src(x0, y1) * (1.0 - fx) + src(x1, y1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

Plane resample(GridView src, int width, int height, double scale) {
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out.at(x, y) = sample_bilinear(src, x / scale, y / scale);
    }
  }
  return out;
}

}  // namespace phyfid::detail
