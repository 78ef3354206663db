#include "phyfid/fields.hpp"

#include <cmath>
#include <string>

#include "phyfid/error.hpp"

namespace phyfid {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::shape: return "shape";
    case ErrorKind::length: return "length";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::numeric: return "numeric";
  }
  return "unknown";
}

namespace {

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

void check_grid(int width, int height, std::span<const double> values, const char* what) {
  if (width <= 0 || height <= 0) {
    throw ShapeError(std::string(what) + ": non-positive dimensions " + dims(width, height));
  }
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw ShapeError(std::string(what) + ": " + std::to_string(values.size()) +
                     " values for a " + dims(width, height) + " grid");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError(std::string(what) + ": non-finite value");
  }
}

}  // namespace

template <class Tag>
BasicGrid<Tag>::BasicGrid(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  check_grid(width_, height_, values_, "grid");
}

template <class Tag>
BasicGrid<Tag>::BasicGrid(int width, int height, double fill)
    : BasicGrid(width, height,
                std::vector<double>(width > 0 && height > 0
                                        ? static_cast<std::size_t>(width) * height
                                        : 0,
                                    fill)) {}

template class BasicGrid<FrameTag>;
template class BasicGrid<ScalarTag>;

FlowField::FlowField(int width, int height, std::vector<double> u, std::vector<double> v)
    : width_(width), height_(height), u_(std::move(u)), v_(std::move(v)) {
  check_grid(width_, height_, u_, "flow u");
  check_grid(width_, height_, v_, "flow v");
}

FlowField FlowField::scaled(double k) const {
  std::vector<double> u = u_, v = v_;
  for (auto& x : u) x *= k;
  for (auto& x : v) x *= k;
  return {width_, height_, std::move(u), std::move(v)};
}

FlowField FlowField::translated(double du, double dv) const {
  std::vector<double> u = u_, v = v_;
  for (auto& x : u) x += du;
  for (auto& x : v) x += dv;
  return {width_, height_, std::move(u), std::move(v)};
}

FrameSequence::FrameSequence(std::vector<Frame> frames, std::optional<double> fps)
    : frames_(std::move(frames)), fps_(fps) {
  if (frames_.size() < 2) {
    throw LengthError("frame sequence needs at least 2 frames, got " +
                      std::to_string(frames_.size()));
  }
  const int w = frames_.front().width();
  const int h = frames_.front().height();
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (frames_[i].width() != w || frames_[i].height() != h) {
      throw ShapeError("frame " + std::to_string(i) + " is " +
                       dims(frames_[i].width(), frames_[i].height()) + ", expected " +
                       dims(w, h));
    }
  }
  if (fps_ && !(*fps_ > 0.0)) throw ConfigError("fps must be positive");
}

Frame to_grayscale(const RgbImage& rgb) {
  const std::size_t n = static_cast<std::size_t>(rgb.width) * rgb.height;
  if (rgb.width <= 0 || rgb.height <= 0 || rgb.r.size() != n || rgb.g.size() != n ||
      rgb.b.size() != n) {
    throw ShapeError("rgb channels do not match " + dims(rgb.width, rgb.height));
  }
  std::vector<double> luma(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Same weights as 0.299 R + 0.587 G + 0.114 B, arranged so gray input
    // maps to itself exactly.
    luma[i] = rgb.g[i] + 0.299 * (rgb.r[i] - rgb.g[i]) + 0.114 * (rgb.b[i] - rgb.g[i]);
  }
  return Frame(rgb.width, rgb.height, std::move(luma));
}

void validate_pair(const FrameSequence& a, const FrameSequence& b) {
  if (a.size() != b.size()) {
    throw LengthError("sequence lengths differ: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].width() != b[i].width() || a[i].height() != b[i].height()) {
      throw ShapeError("frame " + std::to_string(i) + " dimensions differ: " +
                       dims(a[i].width(), a[i].height()) + " vs " +
                       dims(b[i].width(), b[i].height()));
    }
  }
}

}  // namespace phyfid
