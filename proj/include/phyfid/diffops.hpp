#pragma once

// Finite-difference operators on unit-spaced pixel grids: central differences
// in the interior, one-sided differences on the border.

#include "phyfid/fields.hpp"

namespace phyfid {

struct GradientField {
  ScalarField dx;
  ScalarField dy;
};

GradientField gradient(GridView field);
inline GradientField gradient(const Frame& f) { return gradient(f.view()); }
inline GradientField gradient(const ScalarField& f) { return gradient(f.view()); }

/// du/dx + dv/dy
ScalarField divergence(const FlowField& flow);

/// dv/dx - du/dy
ScalarField vorticity(const FlowField& flow);

/// 0.5 * (-(du/dx)^2 - (dv/dy)^2 - 2 du/dy dv/dx)
ScalarField q_criterion(const FlowField& flow);

/// psi with psi(0,0) = 0: trapezoidal integration of u down column 0, then
/// psi(x, y) = psi(0, y) - trapezoidal integral of v along each row.
ScalarField stream_function(const FlowField& flow);

/// Max |psi_a - psi_b| between the column-first path above and the row-first
/// path (v along row 0, then u down each column). Zero for exactly
/// integrable discrete fields; grows with the flow's divergence.
double stream_function_path_discrepancy(const FlowField& flow);

}  // namespace phyfid
