#pragma once

// Dense optical flow by polynomial expansion (Farnebäck), coarse to fine.

#include <cstddef>
#include <vector>

#include "phyfid/fields.hpp"

namespace phyfid {

struct FlowParams {
  double pyramid_scale = 0.5;
  int levels = 4;
  int window_size = 15;
  int iterations = 3;
  int poly_n = 5;
  double poly_sigma = 1.1;

  /// Throws ConfigError on out-of-range values.
  void validate() const;

  bool operator==(const FlowParams&) const = default;
};

/// Per-pixel quadratic model f(p) ~ p^T A p + b^T p + c in local coordinates
/// centred on the pixel. A is symmetric and stored as (a11, a12, a22).
struct PolyCoeffs {
  int width = 0;
  int height = 0;
  std::vector<double> a11, a12, a22;
  std::vector<double> b1, b2;
  std::vector<double> c;
};

struct FlowDiagnostics {
  /// Pixels whose aggregated 2x2 system was singular, over all levels and
  /// iterations.
  std::size_t singular_pixels = 0;
  /// Singular pixels in the last full-resolution iteration.
  std::size_t final_singular_pixels = 0;
  int levels_used = 0;
};

/// Weighted least-squares quadratic fit over a poly_n x poly_n neighbourhood
/// with Gaussian applicability of width poly_sigma, reflective borders.
PolyCoeffs polynomial_expansion(GridView frame, int poly_n, double poly_sigma);
PolyCoeffs polynomial_expansion(const Frame& frame, int poly_n, double poly_sigma);

/// Solves the window-aggregated normal equations (Ā^T Ā) d = Ā^T Δb with
/// Ā = (A1 + A2) / 2 and Δb = -(b2 - b1) / 2. Pixels whose aggregated
/// determinant is below 1e-9 get zero displacement and are counted in diag.
FlowField displacement_from_coeffs(const PolyCoeffs& first, const PolyCoeffs& second,
                                   int window, FlowDiagnostics* diag = nullptr);

/// Largest level count the frame size supports (coarsest level >= poly_n).
int max_pyramid_levels(int width, int height, const FlowParams& params);

/// Flow such that f1(p) ~ f2(p + flow(p)).
FlowField farneback_flow(const Frame& f1, const Frame& f2, const FlowParams& params = {},
                         FlowDiagnostics* diag = nullptr);

}  // namespace phyfid
