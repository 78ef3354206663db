#include "phyfid/diffops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imgproc.hpp"
#include "phyfid/error.hpp"
#include "phyfid/kernels.hpp"

namespace phyfid {

using detail::Plane;

namespace {

Plane d_dx(GridView f) {
  const int w = f.width;
  Plane out(w, f.height);
  for (int y = 0; y < f.height; ++y) {
    const auto row = f.row(y);
    auto o = out.row(y);
    if (w > 2) kernels::half_diff(row.subspan(2), row.first(w - 2), o.subspan(1, w - 2));
    o[0] = row[1] - row[0];
    o[w - 1] = row[w - 1] - row[w - 2];
  }
  return out;
}

Plane d_dy(GridView f) {
  const int h = f.height;
  Plane out(f.width, h);
  for (int y = 1; y + 1 < h; ++y) kernels::half_diff(f.row(y + 1), f.row(y - 1), out.row(y));
  for (int x = 0; x < f.width; ++x) {
    out.at(x, 0) = f(x, 1) - f(x, 0);
    out.at(x, h - 1) = f(x, h - 1) - f(x, h - 2);
  }
  return out;
}

void require_differentiable(int w, int h) {
  if (w < 2 || h < 2) {
    throw ShapeError("differential operators need at least 2x2 pixels, got " +
                     std::to_string(w) + "x" + std::to_string(h));
  }
}

ScalarField to_field(Plane p) { return ScalarField(p.width, p.height, std::move(p.data)); }

}  // namespace

GradientField gradient(GridView field) {
  require_differentiable(field.width, field.height);
  return {to_field(d_dx(field)), to_field(d_dy(field))};
}

ScalarField divergence(const FlowField& flow) {
  require_differentiable(flow.width(), flow.height());
  Plane ux = d_dx(flow.u_view());
  const Plane vy = d_dy(flow.v_view());
  for (std::size_t i = 0; i < ux.data.size(); ++i) ux.data[i] += vy.data[i];
  return to_field(std::move(ux));
}

ScalarField vorticity(const FlowField& flow) {
  require_differentiable(flow.width(), flow.height());
  Plane vx = d_dx(flow.v_view());
  const Plane uy = d_dy(flow.u_view());
  for (std::size_t i = 0; i < vx.data.size(); ++i) vx.data[i] -= uy.data[i];
  return to_field(std::move(vx));
}

ScalarField q_criterion(const FlowField& flow) {
  require_differentiable(flow.width(), flow.height());
  const Plane ux = d_dx(flow.u_view());
  const Plane uy = d_dy(flow.u_view());
  const Plane vx = d_dx(flow.v_view());
  const Plane vy = d_dy(flow.v_view());
  Plane q(flow.width(), flow.height());
  for (std::size_t i = 0; i < q.data.size(); ++i) {
    q.data[i] = 0.5 * (-ux.data[i] * ux.data[i] - vy.data[i] * vy.data[i] -
                       2.0 * uy.data[i] * vx.data[i]);
  }
  return to_field(std::move(q));
}

namespace {

Plane integrate_column_first(const FlowField& flow) {
  const int w = flow.width(), h = flow.height();
  Plane psi(w, h);
  for (int y = 1; y < h; ++y) {
    psi.at(0, y) = psi.at(0, y - 1) + 0.5 * (flow.u(0, y - 1) + flow.u(0, y));
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 1; x < w; ++x) {
      psi.at(x, y) = psi.at(x - 1, y) - 0.5 * (flow.v(x - 1, y) + flow.v(x, y));
    }
  }
  return psi;
}

Plane integrate_row_first(const FlowField& flow) {
  const int w = flow.width(), h = flow.height();
  Plane psi(w, h);
  for (int x = 1; x < w; ++x) {
    psi.at(x, 0) = psi.at(x - 1, 0) - 0.5 * (flow.v(x - 1, 0) + flow.v(x, 0));
  }
  for (int y = 1; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      psi.at(x, y) = psi.at(x, y - 1) + 0.5 * (flow.u(x, y - 1) + flow.u(x, y));
    }
  }
  return psi;
}

}  // namespace

ScalarField stream_function(const FlowField& flow) {
  return to_field(integrate_column_first(flow));
}

double stream_function_path_discrepancy(const FlowField& flow) {
  const Plane a = integrate_column_first(flow);
  const Plane b = integrate_row_first(flow);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  }
  return worst;
}

}  // namespace phyfid
