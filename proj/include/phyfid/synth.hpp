#pragma once

// Analytic flow fields and frame sequences rendered from them. These are the
// ground truth for the flow estimator and the metric tests.

#include <cstdint>

#include "phyfid/fields.hpp"

namespace phyfid::synth {

struct GridSpec {
  int width = 64;
  int height = 64;
  /// When true, pixel (i, j) sits at (i - (width-1)/2, j - (height-1)/2).
  bool centered = true;

  void validate() const;
  double x_coord(int i) const { return centered ? i - 0.5 * (width - 1) : i; }
  double y_coord(int j) const { return centered ? j - 0.5 * (height - 1) : j; }
};

FlowField uniform_flow(const GridSpec& grid, double dx, double dy);

/// u = -omega * y, v = omega * x. Requires a centered grid.
FlowField rigid_rotation_flow(const GridSpec& grid, double omega);

/// Wavenumber k = 2 pi / width used by taylor_green_flow.
double taylor_green_wavenumber(const GridSpec& grid);

/// With X = k x, Y = k y: u = A sin X cos Y, v = -A cos X sin Y.
FlowField taylor_green_flow(const GridSpec& grid, double amplitude);

/// psi = A sin X sin Y / k for the field above.
ScalarField taylor_green_stream_function(const GridSpec& grid, double amplitude);

/// u = x, v = y about the grid centre.
FlowField radial_source_flow(const GridSpec& grid);

/// Seeded uniform noise smoothed by a sigma = 2 px Gaussian and rescaled to
/// span [0, 255].
Frame smooth_noise_texture(int width, int height, std::uint64_t seed);

/// Frame 0 is smooth_noise_texture; frame t+1 samples frame t at p - flow(p)
/// (bilinear, edge-clamped).
FrameSequence render_advected_sequence(const GridSpec& grid, const FlowField& flow,
                                       int n_frames, std::uint64_t texture_seed);

/// Copy of seq with every intensity rounded to the nearest integer in
/// [0, 255], as stored in 8-bit images.
FrameSequence quantize_8bit(const FrameSequence& seq);

}  // namespace phyfid::synth
