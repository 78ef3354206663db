#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace phyfid {

/// Read-only view of a row-major grid of doubles.
struct GridView {
  int width = 0;
  int height = 0;
  std::span<const double> values;

  double operator()(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  std::span<const double> row(int y) const {
    return values.subspan(static_cast<std::size_t>(y) * width, width);
  }
};

/// Immutable row-major grid of finite doubles. The tag separates frames from
/// derived scalar quantities at the type level.
template <class Tag>
class BasicGrid {
 public:
  BasicGrid() = default;
  BasicGrid(int width, int height, std::vector<double> values);
  BasicGrid(int width, int height, double fill);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row(int y) const {
    return std::span<const double>(values_).subspan(
        static_cast<std::size_t>(y) * width_, width_);
  }
  GridView view() const noexcept { return {width_, height_, values_}; }

  bool operator==(const BasicGrid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

struct FrameTag {};
struct ScalarTag {};

/// Grayscale intensities, nominally in [0, 255].
using Frame = BasicGrid<FrameTag>;
/// Per-pixel derived quantity (divergence, vorticity, stream function, Q).
using ScalarField = BasicGrid<ScalarTag>;

extern template class BasicGrid<FrameTag>;
extern template class BasicGrid<ScalarTag>;

/// Per-pixel displacement in pixels per frame step. A pixel at p in the first
/// frame is found at p + (u, v) in the second.
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height, std::vector<double> u, std::vector<double> v);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return u_.size(); }

  double u(int x, int y) const { return u_[static_cast<std::size_t>(y) * width_ + x]; }
  double v(int x, int y) const { return v_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<const double> u_values() const noexcept { return u_; }
  std::span<const double> v_values() const noexcept { return v_; }
  GridView u_view() const noexcept { return {width_, height_, u_}; }
  GridView v_view() const noexcept { return {width_, height_, v_}; }

  /// Flow with both components multiplied by k.
  FlowField scaled(double k) const;
  /// Flow with (du, dv) added at every pixel.
  FlowField translated(double du, double dv) const;

  bool operator==(const FlowField&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> u_;
  std::vector<double> v_;
};

/// Ordered frames of identical size, at least two of them.
class FrameSequence {
 public:
  explicit FrameSequence(std::vector<Frame> frames,
                         std::optional<double> fps = std::nullopt);

  std::size_t size() const noexcept { return frames_.size(); }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  const std::vector<Frame>& frames() const noexcept { return frames_; }
  std::optional<double> fps() const noexcept { return fps_; }
  int width() const noexcept { return frames_.front().width(); }
  int height() const noexcept { return frames_.front().height(); }
  std::size_t pixel_count() const noexcept { return frames_.front().size(); }

  bool operator==(const FrameSequence&) const = default;

 private:
  std::vector<Frame> frames_;
  std::optional<double> fps_;
};

/// Three equally sized planes of 0-255 channel values.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<double> r, g, b;
};

/// Rec. 601 luma: 0.299 R + 0.587 G + 0.114 B.
Frame to_grayscale(const RgbImage& rgb);

/// Throws LengthError on differing frame counts and ShapeError on differing
/// frame dimensions.
void validate_pair(const FrameSequence& a, const FrameSequence& b);

}  // namespace phyfid
