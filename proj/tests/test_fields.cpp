#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>

#include "phyfid/error.hpp"
#include "phyfid/fields.hpp"
#include "support.hpp"

using namespace phyfid;

namespace {

FrameSequence constant_sequence(int n, int w, int h, double value) {
  return FrameSequence(std::vector<Frame>(n, Frame(w, h, value)));
}

RgbImage single_pixel(double r, double g, double b) { return {1, 1, {r}, {g}, {b}}; }

}  // namespace

TEST_CASE("grid construction validates size and finiteness") {
  CHECK_THROWS_AS(Frame(2, 2, std::vector<double>(3)), ShapeError);
  CHECK_THROWS_AS(Frame(0, 2, std::vector<double>{}), ShapeError);
  CHECK_THROWS_AS(Frame(1, 1, std::vector<double>{std::nan("")}), NumericError);
  CHECK_THROWS_AS(ScalarField(1, 1, std::vector<double>{std::numeric_limits<double>::infinity()}),
                  NumericError);
  CHECK_THROWS_AS(FlowField(2, 1, {0.0, 0.0}, {0.0}), ShapeError);
  CHECK_THROWS_AS(FlowField(1, 1, {std::nan("")}, {0.0}), NumericError);

  const Frame f(3, 2, std::vector<double>{0, 1, 2, 3, 4, 5});
  CHECK(f(2, 1) == 5.0);
  CHECK(f.row(1)[0] == 3.0);
  CHECK(f.view()(1, 1) == 4.0);
}

TEST_CASE("flow helpers") {
  const FlowField f(2, 1, {1.0, -2.0}, {0.5, 0.0});
  const FlowField s = f.scaled(-2.0);
  CHECK(s.u(1, 0) == 4.0);
  CHECK(s.v(0, 0) == -1.0);
  const FlowField t = f.translated(1.0, 2.0);
  CHECK(t.u(0, 0) == 2.0);
  CHECK(t.v(1, 0) == 2.0);
}

TEST_CASE("frame sequence invariants") {
  CHECK_NOTHROW(constant_sequence(10, 64, 64, 0.0));
  CHECK_THROWS_AS(constant_sequence(1, 8, 8, 0.0), LengthError);
  CHECK_THROWS_AS(FrameSequence({Frame(8, 8, 0.0), Frame(8, 7, 0.0)}), ShapeError);
  CHECK_THROWS_AS(FrameSequence({Frame(8, 8, 0.0), Frame(8, 8, 0.0)}, 0.0), ConfigError);
  const FrameSequence s({Frame(8, 8, 0.0), Frame(8, 8, 1.0)}, 24.0);
  CHECK(*s.fps() == 24.0);
  CHECK(s.pixel_count() == 64);
}

TEST_CASE("to_grayscale uses Rec. 601 weights") {
  CHECK(to_grayscale(single_pixel(255, 255, 255))(0, 0) == doctest::Approx(255.0).epsilon(1e-15));
  CHECK(to_grayscale(single_pixel(0, 0, 0))(0, 0) == 0.0);
  CHECK(to_grayscale(single_pixel(255, 0, 0))(0, 0) == doctest::Approx(76.245).epsilon(1e-13));
  CHECK(to_grayscale(single_pixel(0, 255, 0))(0, 0) == doctest::Approx(149.685).epsilon(1e-13));
  CHECK(to_grayscale(single_pixel(0, 0, 255))(0, 0) == doctest::Approx(29.07).epsilon(1e-13));
  CHECK_THROWS_AS(to_grayscale(RgbImage{2, 1, {0, 0}, {0}, {0, 0}}), ShapeError);
}

TEST_CASE("to_grayscale of a replicated frame returns the frame") {
  const auto values = testing::random_values(40 * 30, 5, 0.0, 255.0);
  const Frame f(40, 30, values);
  const Frame g = to_grayscale(RgbImage{40, 30, values, values, values});
  CHECK(g == f);
  // Applying it again to the replicated result is still the identity.
  const auto gv = std::vector<double>(g.values().begin(), g.values().end());
  CHECK(to_grayscale(RgbImage{40, 30, gv, gv, gv}) == f);
}

TEST_CASE("to_grayscale stays in range") {
  const auto r = testing::random_values(500, 1, 0.0, 255.0);
  const auto g = testing::random_values(500, 2, 0.0, 255.0);
  const auto b = testing::random_values(500, 3, 0.0, 255.0);
  const Frame out = to_grayscale(RgbImage{25, 20, r, g, b});
  for (double v : out.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 255.0);
  }
}

TEST_CASE("validate_pair") {
  const auto a = constant_sequence(10, 64, 64, 1.0);
  CHECK_NOTHROW(validate_pair(a, constant_sequence(10, 64, 64, 2.0)));
  CHECK_THROWS_AS(validate_pair(a, constant_sequence(9, 64, 64, 1.0)), LengthError);
  CHECK_THROWS_AS(validate_pair(a, constant_sequence(10, 64, 32, 1.0)), ShapeError);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const int n = 2 + static_cast<int>(seed);
    std::vector<Frame> frames;
    for (int i = 0; i < n; ++i) frames.emplace_back(9, 7, testing::random_values(63, seed * 10 + i));
    const FrameSequence s(frames);
    CHECK_NOTHROW(validate_pair(s, s));
  }
}
