#include "phyfid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "imgproc.hpp"
#include "rng.hpp"
#include "phyfid/error.hpp"

namespace phyfid::synth {

using detail::Plane;

void GridSpec::validate() const {
  if (width < 8 || height < 8) {
    throw ConfigError("grid must be at least 8x8, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
}

namespace {

template <class Fn>
FlowField make_flow(const GridSpec& grid, Fn&& fn) {
  grid.validate();
  const std::size_t n = static_cast<std::size_t>(grid.width) * grid.height;
  std::vector<double> u(n), v(n);
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * grid.width + i;
      fn(grid.x_coord(i), grid.y_coord(j), u[idx], v[idx]);
    }
  }
  return FlowField(grid.width, grid.height, std::move(u), std::move(v));
}

}  // namespace

FlowField uniform_flow(const GridSpec& grid, double dx, double dy) {
  return make_flow(grid, [&](double, double, double& u, double& v) {
    u = dx;
    v = dy;
  });
}

FlowField rigid_rotation_flow(const GridSpec& grid, double omega) {
  if (!grid.centered) throw ConfigError("rigid rotation needs a centered grid");
  return make_flow(grid, [&](double x, double y, double& u, double& v) {
    u = -omega * y;
    v = omega * x;
  });
}

double taylor_green_wavenumber(const GridSpec& grid) {
  return 2.0 * std::numbers::pi / grid.width;
}

FlowField taylor_green_flow(const GridSpec& grid, double amplitude) {
  const double k = taylor_green_wavenumber(grid);
  return make_flow(grid, [&](double x, double y, double& u, double& v) {
    u = amplitude * std::sin(k * x) * std::cos(k * y);
    v = -amplitude * std::cos(k * x) * std::sin(k * y);
  });
}

ScalarField taylor_green_stream_function(const GridSpec& grid, double amplitude) {
  grid.validate();
  const double k = taylor_green_wavenumber(grid);
  std::vector<double> psi(static_cast<std::size_t>(grid.width) * grid.height);
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      psi[static_cast<std::size_t>(j) * grid.width + i] =
          amplitude * std::sin(k * grid.x_coord(i)) * std::sin(k * grid.y_coord(j)) / k;
    }
  }
  return ScalarField(grid.width, grid.height, std::move(psi));
}

FlowField radial_source_flow(const GridSpec& grid) {
  GridSpec centered = grid;
  centered.centered = true;
  return make_flow(centered, [](double x, double y, double& u, double& v) {
    u = x;
    v = y;
  });
}

Frame smooth_noise_texture(int width, int height, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  Plane noise(width, height);
  for (auto& x : noise.data) x = detail::unit_uniform(engine);

  const double sigma = 2.0;
  const auto kernel = detail::gaussian_kernel(sigma, static_cast<int>(std::ceil(3 * sigma)));
  Plane smooth = detail::separable_filter(noise.view(), kernel);

  const auto [lo, hi] = std::minmax_element(smooth.data.begin(), smooth.data.end());
  const double min = *lo, range = *hi - *lo;
  for (auto& x : smooth.data) x = range > 0.0 ? (x - min) / range * 255.0 : 0.0;
  return Frame(width, height, std::move(smooth.data));
}

FrameSequence render_advected_sequence(const GridSpec& grid, const FlowField& flow,
                                       int n_frames, std::uint64_t texture_seed) {
  grid.validate();
  if (n_frames < 2) throw LengthError("need at least 2 frames");
  if (flow.width() != grid.width || flow.height() != grid.height) {
    throw ShapeError("flow does not match the grid");
  }
  std::vector<Frame> frames;
  frames.reserve(n_frames);
  frames.push_back(smooth_noise_texture(grid.width, grid.height, texture_seed));
  for (int t = 1; t < n_frames; ++t) {
    const GridView prev = frames.back().view();
    std::vector<double> next(prev.values.size());
    for (int y = 0; y < grid.height; ++y) {
      for (int x = 0; x < grid.width; ++x) {
        next[static_cast<std::size_t>(y) * grid.width + x] =
            detail::sample_bilinear(prev, x - flow.u(x, y), y - flow.v(x, y));
      }
    }
    frames.emplace_back(grid.width, grid.height, std::move(next));
  }
  return FrameSequence(std::move(frames));
}

FrameSequence quantize_8bit(const FrameSequence& seq) {
  std::vector<Frame> frames;
  frames.reserve(seq.size());
  for (const Frame& f : seq.frames()) {
    std::vector<double> q(f.values().begin(), f.values().end());
    for (auto& x : q) x = std::clamp(std::round(x), 0.0, 255.0);
    frames.emplace_back(f.width(), f.height(), std::move(q));
  }
  return FrameSequence(std::move(frames), seq.fps());
}

}  // namespace phyfid::synth
