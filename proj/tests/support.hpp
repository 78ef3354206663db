#pragma once
// Helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "phyfid/fields.hpp"

namespace testing {

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = d(engine);
  return out;
}

template <class Grid = phyfid::Frame, class F>
Grid grid_from(int w, int h, F&& f) {
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) v[static_cast<std::size_t>(y) * w + x] = f(x, y);
  return Grid(w, h, std::move(v));
}

template <class F>
phyfid::Frame frame_from(int w, int h, F&& f) {
  return grid_from<phyfid::Frame>(w, h, std::forward<F>(f));
}

template <class F>
phyfid::ScalarField scalar_from(int w, int h, F&& f) {
  return grid_from<phyfid::ScalarField>(w, h, std::forward<F>(f));
}

template <class F>
phyfid::FlowField flow_from(int w, int h, F&& f) {
  std::vector<double> u(static_cast<std::size_t>(w) * h), v(u.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto [a, b] = f(x, y);
      u[static_cast<std::size_t>(y) * w + x] = a;
      v[static_cast<std::size_t>(y) * w + x] = b;
    }
  return phyfid::FlowField(w, h, std::move(u), std::move(v));
}

/// Largest |g(x, y) - expected(x, y)| over pixels at least `border` from every edge.
template <class Grid, class E>
double max_interior_error(const Grid& g, int border, E&& expected) {
  double worst = 0.0;
  for (int y = border; y < g.height() - border; ++y)
    for (int x = border; x < g.width() - border; ++x)
      worst = std::max(worst, std::abs(g(x, y) - expected(x, y)));
  return worst;
}

template <class Grid>
double max_interior_error(const Grid& g, int border, double expected) {
  return max_interior_error(g, border, [&](int, int) { return expected; });
}

inline double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

/// Interior u and v samples of a flow field.
struct Samples {
  std::vector<double> u, v;
};

inline Samples interior(const phyfid::FlowField& f, int border) {
  Samples s;
  for (int y = border; y < f.height() - border; ++y)
    for (int x = border; x < f.width() - border; ++x) {
      s.u.push_back(f.u(x, y));
      s.v.push_back(f.v(x, y));
    }
  return s;
}

/// Pearson correlation of the stacked (u, v) vectors of two flows over the interior.
inline double flow_correlation(const phyfid::FlowField& a, const phyfid::FlowField& b,
                               int border) {
  const Samples sa = interior(a, border), sb = interior(b, border);
  std::vector<double> x = sa.u, y = sb.u;
  x.insert(x.end(), sa.v.begin(), sa.v.end());
  y.insert(y.end(), sb.v.begin(), sb.v.end());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// frame shifted so that out(x, y) = in(x - dx, y - dy), with edge clamping.
inline phyfid::Frame shift_integer(const phyfid::Frame& in, int dx, int dy) {
  return frame_from(in.width(), in.height(), [&](int x, int y) {
    const int sx = std::clamp(x - dx, 0, in.width() - 1);
    const int sy = std::clamp(y - dy, 0, in.height() - 1);
    return in(sx, sy);
  });
}

}  // namespace testing
