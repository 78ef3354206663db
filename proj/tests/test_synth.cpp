#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "phyfid/diffops.hpp"
#include "phyfid/error.hpp"
#include "phyfid/flow.hpp"
#include "phyfid/metrics.hpp"
#include "phyfid/synth.hpp"
#include "support.hpp"

using namespace phyfid;
using namespace phyfid::synth;
using testing::max_interior_error;

TEST_CASE("grid spec") {
  CHECK_THROWS_AS(GridSpec({7, 8, true}).validate(), ConfigError);
  CHECK_THROWS_AS(uniform_flow({8, 4, false}, 0, 0), ConfigError);
  const GridSpec c{8, 6, true};
  CHECK(c.x_coord(0) == -3.5);
  CHECK(c.y_coord(5) == 2.5);
  const GridSpec n{8, 6, false};
  CHECK(n.x_coord(3) == 3.0);
}

TEST_CASE("uniform flow") {
  const FlowField f = uniform_flow({16, 12, true}, 3, 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f.u_values()[i] == 3.0);
    CHECK(f.v_values()[i] == 1.0);
  }
  const FlowField z = uniform_flow({16, 12, true}, 0, 0);
  CHECK(max_interior_error(divergence(f), 0, 0.0) == 0.0);
  CHECK(max_interior_error(vorticity(f), 0, 0.0) == 0.0);
  CHECK(max_interior_error(divergence(z), 0, 0.0) == 0.0);
}

TEST_CASE("rigid rotation") {
  const GridSpec g{9, 9, true};  // odd size puts pixel (6, 5) at (2, 1)
  const FlowField f = rigid_rotation_flow(g, 0.5);
  CHECK(g.x_coord(6) == 2.0);
  CHECK(g.y_coord(5) == 1.0);
  CHECK(f.u(6, 5) == -0.5);
  CHECK(f.v(6, 5) == 1.0);
  const FlowField still = rigid_rotation_flow(g, 0.0);
  for (double v : still.u_values()) CHECK(v == 0.0);
  CHECK_THROWS_AS(rigid_rotation_flow({16, 16, false}, 0.1), ConfigError);
  const FlowField big = rigid_rotation_flow({64, 64, true}, 0.5);
  CHECK(max_interior_error(vorticity(big), 1, 1.0) == 0.0);
  CHECK(max_interior_error(q_criterion(big), 1, 0.25) == 0.0);
  CHECK(max_interior_error(divergence(big), 1, 0.0) == 0.0);
}

TEST_CASE("Taylor-Green") {
  const GridSpec g{128, 128, false};
  const FlowField f = taylor_green_flow(g, 1.5);
  CHECK(taylor_green_wavenumber(g) == doctest::Approx(2 * std::numbers::pi / 128));
  // X = pi/2, Y = 0
  CHECK(f.u(32, 0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(std::abs(f.v(32, 0)) < 1e-15);
  CHECK(max_interior_error(divergence(taylor_green_flow(g, 1.0)), 0, 0.0) < 1e-2);
  // Closed-form derivative identities, within central-difference truncation.
  const double k = taylor_green_wavenumber(g);
  const ScalarField w = vorticity(f);
  CHECK(max_interior_error(w, 1, [&](int i, int j) {
          return 2 * 1.5 * k * std::sin(k * i) * std::sin(k * j);
        }) < 1.5 * k * k * k);
}

TEST_CASE("radial source") {
  const FlowField f = radial_source_flow({16, 16, false});
  CHECK(f.u(0, 0) == -7.5);
  CHECK(max_interior_error(divergence(f), 0, 2.0) == 0.0);
}

TEST_CASE("smooth noise texture") {
  const Frame t = smooth_noise_texture(64, 48, 11);
  double lo = 1e9, hi = -1e9;
  for (double v : t.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo == 0.0);
  CHECK(hi == 255.0);
  CHECK(t == smooth_noise_texture(64, 48, 11));
  CHECK_FALSE(t == smooth_noise_texture(64, 48, 12));
}

TEST_CASE("render advected sequence") {
  const GridSpec g{48, 40, true};
  const FrameSequence still = render_advected_sequence(g, uniform_flow(g, 0, 0), 4, 3);
  CHECK(still.size() == 4);
  for (std::size_t t = 1; t < still.size(); ++t) CHECK(still[t] == still[0]);

  const FlowField rot = rigid_rotation_flow(g, 0.03);
  CHECK(render_advected_sequence(g, rot, 3, 9) == render_advected_sequence(g, rot, 3, 9));

  // Integer translation moves content by exactly (dx, dy) away from the edges.
  const FrameSequence s = render_advected_sequence(g, uniform_flow(g, 2, 1), 2, 3);
  CHECK(max_interior_error(s[1], 0, [&](int x, int y) {
          return s[0](std::max(x - 2, 0), std::max(y - 1, 0));
        }) == 0.0);

  CHECK_THROWS_AS(render_advected_sequence(g, rot, 1, 0), LengthError);
  CHECK_THROWS_AS(render_advected_sequence({32, 32, true}, rot, 2, 0), ShapeError);
}

TEST_CASE("translated texture flows back to (3, 1)") {
  const GridSpec g{128, 128, true};
  const FrameSequence s = render_advected_sequence(g, uniform_flow(g, 3, 1), 2, 7);
  const auto samples = testing::interior(farneback_flow(s[0], s[1]), 16);
  CHECK(std::abs(testing::median(samples.u) - 3.0) < 0.25);
  CHECK(std::abs(testing::median(samples.v) - 1.0) < 0.25);
}

TEST_CASE("quantize") {
  const FrameSequence s({Frame(8, 8, 3.4), Frame(8, 8, 300.0)}, 10.0);
  const FrameSequence q = quantize_8bit(s);
  CHECK(q[0](0, 0) == 3.0);
  CHECK(q[1](0, 0) == 255.0);
  CHECK(*q.fps() == 10.0);
}

TEST_CASE("pipeline oracle: a rendered sequence against itself") {
  const GridSpec g{48, 48, true};
  const FrameSequence s = render_advected_sequence(g, rigid_rotation_flow(g, 0.04), 4, 21);
  const MetricReport r = evaluate_all(s, s);
  CHECK(r.rmse == 0.0);
  CHECK(std::abs(r.ssim - 1.0) < 1e-9);
  CHECK(r.sfe == 0.0);
  CHECK(r.se == 0.0);
  CHECK(r.qce == 0.0);
  CHECK(r.ve == 0.0);
  CHECK(r.gs == r.notes.gs_real);
}
