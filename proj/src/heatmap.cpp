#include "phyfid/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace phyfid::heatmap {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

Color diverging(double value, double limit) {
  const double t = limit > 0.0 ? std::clamp(value / limit, -1.0, 1.0) : 0.0;
  const double fade = 255.0 * (1.0 - std::abs(t));
  if (t >= 0.0) return {255, to_byte(fade), to_byte(fade)};
  return {to_byte(fade), to_byte(fade), 255};
}

Color flow_color(double u, double v, double max_mag) {
  const double mag = std::hypot(u, v);
  const double value = max_mag > 0.0 ? std::clamp(mag / max_mag, 0.0, 1.0) : 0.0;
  double hue = std::atan2(v, u) * 180.0 / std::numbers::pi;
  if (hue < 0.0) hue += 360.0;
  const double sector = hue / 60.0;
  const double frac = sector - std::floor(sector);
  const double p = 0.0, q = value * (1.0 - frac), t = value * frac;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(sector) % 6) {
    case 0: r = value, g = t, b = p; break;
    case 1: r = q, g = value, b = p; break;
    case 2: r = p, g = value, b = t; break;
    case 3: r = p, g = q, b = value; break;
    case 4: r = t, g = p, b = value; break;
    default: r = value, g = p, b = q; break;
  }
  return {to_byte(255.0 * r), to_byte(255.0 * g), to_byte(255.0 * b)};
}

io::Rgb8Image render(const ScalarField& field) {
  const auto values = field.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double limit = std::max(std::abs(*lo), std::abs(*hi));
  io::Rgb8Image img{field.width(), field.height(), {}};
  img.pixels.reserve(values.size() * 3);
  for (double v : values) {
    const Color c = diverging(v, limit);
    img.pixels.insert(img.pixels.end(), c.begin(), c.end());
  }
  return img;
}

io::Rgb8Image render(const FlowField& flow) {
  double max_mag = 0.0;
  for (std::size_t i = 0; i < flow.size(); ++i) {
    max_mag = std::max(max_mag, std::hypot(flow.u_values()[i], flow.v_values()[i]));
  }
  io::Rgb8Image img{flow.width(), flow.height(), {}};
  img.pixels.reserve(flow.size() * 3);
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const Color c = flow_color(flow.u_values()[i], flow.v_values()[i], max_mag);
    img.pixels.insert(img.pixels.end(), c.begin(), c.end());
  }
  return img;
}

void emit_heatmap(const ScalarField& field, const std::filesystem::path& path) {
  const auto values = field.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  io::write_rgb(path, render(field), {{"min", format(*lo)}, {"max", format(*hi)}});
}

void emit_heatmap(const FlowField& flow, const std::filesystem::path& path) {
  double max_mag = 0.0;
  for (std::size_t i = 0; i < flow.size(); ++i) {
    max_mag = std::max(max_mag, std::hypot(flow.u_values()[i], flow.v_values()[i]));
  }
  io::write_rgb(path, render(flow), {{"min", "0"}, {"max", format(max_mag)}});
}

}  // namespace phyfid::heatmap
