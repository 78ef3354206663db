#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phyfid/diffops.hpp"
#include "phyfid/error.hpp"
#include "phyfid/synth.hpp"
#include "support.hpp"

using namespace phyfid;
using testing::max_interior_error;

namespace {

const synth::GridSpec kGrid64{64, 64, true};

FlowField taylor_green_128() { return synth::taylor_green_flow({128, 128, false}, 1.0); }

double mean(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s / f.size();
}

// max |a - mean(a) - (b - mean(b))| / max |b - mean(b)|
double relative_error_after_means(const ScalarField& a, const ScalarField& b) {
  const double ma = mean(a), mb = mean(b);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    err = std::max(err, std::abs((a.values()[i] - ma) - (b.values()[i] - mb)));
    scale = std::max(scale, std::abs(b.values()[i] - mb));
  }
  return err / scale;
}

}  // namespace

TEST_CASE("gradient of simple fields") {
  const auto c = gradient(Frame(6, 5, 9.0));
  for (double v : c.dx.values()) CHECK(v == 0.0);
  for (double v : c.dy.values()) CHECK(v == 0.0);

  const auto lin = gradient(testing::frame_from(7, 6, [](int x, int y) { return 2.0 * x + 3.0 * y; }));
  // One-sided differences are exact for linear fields too.
  CHECK(max_interior_error(lin.dx, 0, 2.0) == 0.0);
  CHECK(max_interior_error(lin.dy, 0, 3.0) == 0.0);

  const auto sq = gradient(testing::frame_from(9, 3, [](int x, int) { return double(x) * x; }));
  CHECK(sq.dx(5, 1) == 10.0);
  CHECK(sq.dx(0, 1) == 1.0);  // forward difference at the border
  CHECK(sq.dx(8, 1) == 15.0);

  CHECK_THROWS_AS(gradient(Frame(1, 5, 0.0)), ShapeError);
  CHECK_THROWS_AS(gradient(Frame(5, 1, 0.0)), ShapeError);
  CHECK_NOTHROW(gradient(Frame(2, 2, 0.0)));
}

TEST_CASE("divergence") {
  CHECK(max_interior_error(divergence(synth::rigid_rotation_flow(kGrid64, 0.5)), 1, 0.0) == 0.0);
  CHECK(max_interior_error(divergence(synth::radial_source_flow(kGrid64)), 1, 2.0) == 0.0);
  const ScalarField tg = divergence(taylor_green_128());
  CHECK(max_interior_error(tg, 0, 0.0) < 1e-2);
}

TEST_CASE("vorticity") {
  CHECK(max_interior_error(vorticity(synth::rigid_rotation_flow(kGrid64, 0.5)), 1, 1.0) == 0.0);
  CHECK(max_interior_error(vorticity(synth::uniform_flow(kGrid64, 3, 1)), 0, 0.0) == 0.0);
  const FlowField shear = testing::flow_from(16, 16, [](int, int y) { return std::pair{double(y), 0.0}; });
  CHECK(max_interior_error(vorticity(shear), 0, -1.0) == 0.0);
}

TEST_CASE("q criterion") {
  CHECK(max_interior_error(q_criterion(synth::rigid_rotation_flow(kGrid64, 0.5)), 1, 0.25) == 0.0);
  CHECK(max_interior_error(q_criterion(synth::uniform_flow(kGrid64, 3, 1)), 0, 0.0) == 0.0);
  const FlowField strain =
      testing::flow_from(16, 16, [](int x, int y) { return std::pair{double(x), -double(y)}; });
  CHECK(max_interior_error(q_criterion(strain), 0, -1.0) == 0.0);
}

TEST_CASE("stream function closed forms") {
  const FlowField ux = synth::uniform_flow({20, 12, false}, 2.5, 0.0);
  CHECK(max_interior_error(stream_function(ux), 0, [](int, int y) { return 2.5 * y; }) == 0.0);
  const FlowField vy = synth::uniform_flow({20, 12, false}, 0.0, 1.5);
  CHECK(max_interior_error(stream_function(vy), 0, [](int x, int) { return -1.5 * x; }) == 0.0);

  const synth::GridSpec g{128, 128, true};
  const double omega = 0.05;
  const ScalarField exact = testing::scalar_from(128, 128, [&](int i, int j) {
    const double x = g.x_coord(i), y = g.y_coord(j);
    return -omega * (x * x + y * y) / 2;
  });
  const ScalarField psi = stream_function(synth::rigid_rotation_flow(g, omega));
  CHECK(psi(0, 0) == 0.0);
  CHECK(relative_error_after_means(psi, exact) < 1e-2);
}

TEST_CASE("stream function of Taylor-Green") {
  const FlowField flow = taylor_green_128();
  const ScalarField psi = stream_function(flow);
  const ScalarField exact = synth::taylor_green_stream_function({128, 128, false}, 1.0);
  CHECK(relative_error_after_means(psi, exact) < 2e-2);

  // d(psi)/dy reproduces u.
  const auto g = gradient(psi);
  CHECK(max_interior_error(g.dy, 1, [&](int x, int y) { return flow.u(x, y); }) < 5e-2);
  CHECK(max_interior_error(g.dx, 1, [&](int x, int y) { return -flow.v(x, y); }) < 5e-2);
}

TEST_CASE("stream function path discrepancy") {
  // Discrete-exactly integrable fields agree on both paths.
  CHECK(stream_function_path_discrepancy(synth::rigid_rotation_flow(kGrid64, 0.25)) < 1e-12);
  CHECK(stream_function_path_discrepancy(synth::uniform_flow(kGrid64, 1, 2)) < 1e-12);
  CHECK(stream_function_path_discrepancy(synth::radial_source_flow(kGrid64)) > 1.0);
}

TEST_CASE("gradient flows have zero vorticity") {
  // u = grad(phi) for linear and quadratic phi.
  const FlowField lin = testing::flow_from(24, 20, [](int, int) { return std::pair{0.7, -1.3}; });
  CHECK(max_interior_error(vorticity(lin), 1, 0.0) < 1e-6);
  const FlowField quad = testing::flow_from(24, 20, [](int x, int y) {
    // phi = 0.5 x^2 + 0.25 x y - 0.75 y^2
    return std::pair{x + 0.25 * y, 0.25 * x - 1.5 * y};
  });
  CHECK(max_interior_error(vorticity(quad), 1, 0.0) == 0.0);
}

TEST_CASE("vorticity and Q ignore uniform translation") {
  const FlowField rot = synth::rigid_rotation_flow(kGrid64, 0.5);
  const FlowField moved = rot.translated(3.0, -1.0);
  CHECK(vorticity(moved) == vorticity(rot));
  CHECK(q_criterion(moved) == q_criterion(rot));

  const FlowField rnd(16, 12, testing::random_values(192, 1), testing::random_values(192, 2));
  const FlowField rnd_moved = rnd.translated(0.3, 0.7);
  const ScalarField w0 = vorticity(rnd), w1 = vorticity(rnd_moved);
  const ScalarField q0 = q_criterion(rnd), q1 = q_criterion(rnd_moved);
  for (std::size_t i = 0; i < w0.size(); ++i) {
    CHECK(std::abs(w0.values()[i] - w1.values()[i]) < 1e-12);
    CHECK(std::abs(q0.values()[i] - q1.values()[i]) < 1e-12);
  }
}
