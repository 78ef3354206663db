#include "phyfid/flow.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>

#include "imgproc.hpp"
#include "phyfid/error.hpp"
#include "phyfid/kernels.hpp"

namespace phyfid {

using detail::Plane;

void FlowParams::validate() const {
  if (!(pyramid_scale > 0.0 && pyramid_scale < 1.0)) {
    throw ConfigError("pyramid_scale must be in (0, 1), got " + std::to_string(pyramid_scale));
  }
  if (levels < 1) throw ConfigError("levels must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (window_size < 3 || window_size % 2 == 0) {
    throw ConfigError("window_size must be odd and >= 3, got " + std::to_string(window_size));
  }
  if (poly_n < 3 || poly_n % 2 == 0) {
    throw ConfigError("poly_n must be odd and >= 3, got " + std::to_string(poly_n));
  }
  if (!(poly_sigma > 0.0)) throw ConfigError("poly_sigma must be positive");
}

namespace {

constexpr double kSingularDet = 1e-9;

// Rows of (B^T W B)^{-1} B^T W for the basis [1, x, y, x^2, y^2, xy]; row k
// dotted with the neighbourhood gives the k-th least-squares coefficient.
std::array<std::vector<double>, 6> expansion_filters(int poly_n, double sigma) {
  const int r = poly_n / 2;
  const int taps = poly_n * poly_n;
  Eigen::MatrixXd basis(taps, 6);
  Eigen::VectorXd weight(taps);
  for (int dy = -r, t = 0; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx, ++t) {
      basis.row(t) << 1.0, dx, dy, dx * dx, dy * dy, dx * dy;
      weight(t) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  }
  const Eigen::MatrixXd weighted = weight.asDiagonal() * basis;
  const Eigen::Matrix<double, 6, 6> gram = basis.transpose() * weighted;
  const Eigen::MatrixXd filters = gram.ldlt().solve(weighted.transpose());

  std::array<std::vector<double>, 6> out;
  for (int k = 0; k < 6; ++k) {
    out[k].resize(taps);
    for (int t = 0; t < taps; ++t) out[k][t] = filters(k, t);
  }
  return out;
}

// Box mean over a window, counting only in-bounds samples.
Plane box_mean(const Plane& src, int radius) {
  const int w = src.width, h = src.height;
  Plane out(w, h);
  std::vector<double> column_sum(w);
  for (int y = 0; y < h; ++y) {
    std::fill(column_sum.begin(), column_sum.end(), 0.0);
    const int y0 = std::max(0, y - radius), y1 = std::min(h - 1, y + radius);
    for (int yy = y0; yy <= y1; ++yy) kernels::axpy(1.0, src.row(yy), column_sum);
    const int ny = y1 - y0 + 1;
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius), x1 = std::min(w - 1, x + radius);
      double s = 0.0;
      for (int xx = x0; xx <= x1; ++xx) s += column_sum[xx];
      out.at(x, y) = s / static_cast<double>(ny * (x1 - x0 + 1));
    }
  }
  return out;
}

Plane warp(GridView src, const Plane& u, const Plane& v) {
  Plane out(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      out.at(x, y) = detail::sample_bilinear(src, x + u.at(x, y), y + v.at(x, y));
    }
  }
  return out;
}

struct Level {
  int width, height;
};

std::vector<Level> pyramid_sizes(int width, int height, const FlowParams& p, int levels) {
  std::vector<Level> sizes{{width, height}};
  for (int k = 1; k < levels; ++k) {
    const Level& prev = sizes.back();
    sizes.push_back({static_cast<int>(std::lround(prev.width * p.pyramid_scale)),
                     static_cast<int>(std::lround(prev.height * p.pyramid_scale))});
  }
  return sizes;
}

Plane downsample(GridView src, Level to, double scale) {
  static const std::array<double, 5> kBlur5 = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16,
                                               1.0 / 16};
  const Plane blurred = detail::separable_filter(src, kBlur5);
  return detail::resample(blurred.view(), to.width, to.height, scale);
}

Plane upsample_flow(const Plane& coarse, Level to, double scale) {
  Plane out = detail::resample(coarse.view(), to.width, to.height, 1.0 / scale);
  for (auto& x : out.data) x /= scale;
  return out;
}

}  // namespace

PolyCoeffs polynomial_expansion(GridView frame, int poly_n, double poly_sigma) {
  if (poly_n < 3 || poly_n % 2 == 0) {
    throw ConfigError("poly_n must be odd and >= 3, got " + std::to_string(poly_n));
  }
  if (!(poly_sigma > 0.0)) throw ConfigError("poly_sigma must be positive");
  if (frame.width < poly_n || frame.height < poly_n) {
    throw ShapeError("frame " + std::to_string(frame.width) + "x" +
                     std::to_string(frame.height) + " is smaller than poly_n " +
                     std::to_string(poly_n));
  }
  const int r = poly_n / 2;
  const int w = frame.width, h = frame.height;
  const auto filters = expansion_filters(poly_n, poly_sigma);
  const Plane padded = detail::pad_reflect(frame, r);

  std::array<Plane, 6> out;
  for (auto& p : out) p = Plane(w, h);
  for (int y = 0; y < h; ++y) {
    for (int ty = 0; ty < poly_n; ++ty) {
      const auto src_row = padded.row(y + ty);
      for (int tx = 0; tx < poly_n; ++tx) {
        const auto src = src_row.subspan(tx, w);
        const int t = ty * poly_n + tx;
        for (int k = 0; k < 6; ++k) {
          if (filters[k][t] != 0.0) kernels::axpy(filters[k][t], src, out[k].row(y));
        }
      }
    }
  }

  PolyCoeffs coeffs;
  coeffs.width = w;
  coeffs.height = h;
  coeffs.c = std::move(out[0].data);
  coeffs.b1 = std::move(out[1].data);
  coeffs.b2 = std::move(out[2].data);
  coeffs.a11 = std::move(out[3].data);
  coeffs.a22 = std::move(out[4].data);
  // The xy basis coefficient is 2 * a12.
  coeffs.a12 = std::move(out[5].data);
  for (auto& x : coeffs.a12) x *= 0.5;
  return coeffs;
}

PolyCoeffs polynomial_expansion(const Frame& frame, int poly_n, double poly_sigma) {
  return polynomial_expansion(frame.view(), poly_n, poly_sigma);
}

FlowField displacement_from_coeffs(const PolyCoeffs& first, const PolyCoeffs& second,
                                   int window, FlowDiagnostics* diag) {
  if (first.width != second.width || first.height != second.height) {
    throw ShapeError("polynomial coefficient grids differ in size");
  }
  if (window < 1 || window % 2 == 0) {
    throw ConfigError("window must be odd and >= 1, got " + std::to_string(window));
  }
  const int w = first.width, h = first.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  // Per-pixel normal equations G d = rhs with G = Ā^T Ā (symmetric).
  Plane g11(w, h), g12(w, h), g22(w, h), rhs1(w, h), rhs2(w, h);
  for (std::size_t i = 0; i < n; ++i) {
    const double a11 = 0.5 * (first.a11[i] + second.a11[i]);
    const double a12 = 0.5 * (first.a12[i] + second.a12[i]);
    const double a22 = 0.5 * (first.a22[i] + second.a22[i]);
    const double db1 = -0.5 * (second.b1[i] - first.b1[i]);
    const double db2 = -0.5 * (second.b2[i] - first.b2[i]);
    g11.data[i] = a11 * a11 + a12 * a12;
    g12.data[i] = a12 * (a11 + a22);
    g22.data[i] = a12 * a12 + a22 * a22;
    rhs1.data[i] = a11 * db1 + a12 * db2;
    rhs2.data[i] = a12 * db1 + a22 * db2;
  }

  const int radius = window / 2;
  g11 = box_mean(g11, radius);
  g12 = box_mean(g12, radius);
  g22 = box_mean(g22, radius);
  rhs1 = box_mean(rhs1, radius);
  rhs2 = box_mean(rhs2, radius);

  std::vector<double> u(n), v(n);
  std::size_t singular = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double det = g11.data[i] * g22.data[i] - g12.data[i] * g12.data[i];
    if (!(det >= kSingularDet)) {
      u[i] = v[i] = 0.0;
      ++singular;
      continue;
    }
    u[i] = (g22.data[i] * rhs1.data[i] - g12.data[i] * rhs2.data[i]) / det;
    v[i] = (g11.data[i] * rhs2.data[i] - g12.data[i] * rhs1.data[i]) / det;
  }
  if (diag != nullptr) {
    diag->singular_pixels += singular;
    diag->final_singular_pixels = singular;
  }
  return FlowField(w, h, std::move(u), std::move(v));
}

int max_pyramid_levels(int width, int height, const FlowParams& params) {
  int levels = 0;
  // 64 caps the loop for scales that round back to the same size.
  while (width >= params.poly_n && height >= params.poly_n && levels < 64) {
    ++levels;
    width = static_cast<int>(std::lround(width * params.pyramid_scale));
    height = static_cast<int>(std::lround(height * params.pyramid_scale));
  }
  return levels;
}

FlowField farneback_flow(const Frame& f1, const Frame& f2, const FlowParams& params,
                         FlowDiagnostics* diag) {
  params.validate();
  if (f1.width() != f2.width() || f1.height() != f2.height()) {
    throw ShapeError("flow frames differ in size");
  }
  const int max_levels = max_pyramid_levels(f1.width(), f1.height(), params);
  if (params.levels > max_levels) {
    throw ConfigError("frame " + std::to_string(f1.width()) + "x" +
                      std::to_string(f1.height()) + " supports at most " +
                      std::to_string(max_levels) + " pyramid levels, requested " +
                      std::to_string(params.levels));
  }

  const auto sizes = pyramid_sizes(f1.width(), f1.height(), params, params.levels);
  std::vector<Plane> pyr1{Plane()}, pyr2{Plane()};
  pyr1[0].width = pyr2[0].width = f1.width();
  pyr1[0].height = pyr2[0].height = f1.height();
  pyr1[0].data.assign(f1.values().begin(), f1.values().end());
  pyr2[0].data.assign(f2.values().begin(), f2.values().end());
  for (int k = 1; k < params.levels; ++k) {
    pyr1.push_back(downsample(pyr1.back().view(), sizes[k], params.pyramid_scale));
    pyr2.push_back(downsample(pyr2.back().view(), sizes[k], params.pyramid_scale));
  }

  FlowDiagnostics local;
  Plane u, v;
  for (int k = params.levels - 1; k >= 0; --k) {
    const Level size = sizes[k];
    if (k == params.levels - 1) {
      u = Plane(size.width, size.height);
      v = Plane(size.width, size.height);
    } else {
      u = upsample_flow(u, size, params.pyramid_scale);
      v = upsample_flow(v, size, params.pyramid_scale);
    }
    const PolyCoeffs c1 = polynomial_expansion(pyr1[k].view(), params.poly_n, params.poly_sigma);
    for (int it = 0; it < params.iterations; ++it) {
      const Plane warped = warp(pyr2[k].view(), u, v);
      const PolyCoeffs c2 =
          polynomial_expansion(warped.view(), params.poly_n, params.poly_sigma);
      const FlowField delta = displacement_from_coeffs(c1, c2, params.window_size, &local);
      for (std::size_t i = 0; i < u.data.size(); ++i) {
        u.data[i] += delta.u_values()[i];
        v.data[i] += delta.v_values()[i];
      }
    }
  }
  local.levels_used = params.levels;
  if (diag != nullptr) {
    diag->singular_pixels += local.singular_pixels;
    diag->final_singular_pixels = local.final_singular_pixels;
    diag->levels_used = local.levels_used;
  }
  return FlowField(f1.width(), f1.height(), std::move(u.data), std::move(v.data));
}

}  // namespace phyfid
