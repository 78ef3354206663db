#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <png.h>

#include <cmath>
#include <cstring>

#include "phyfid/error.hpp"
#include "phyfid/io.hpp"
#include "phyfid/synth.hpp"
#include "support.hpp"
#include "tempdir.hpp"

using namespace phyfid;
namespace fs = std::filesystem;
using testing::TempDir;

namespace {

FrameSequence integer_sequence(int n, int w, int h, std::uint64_t seed) {
  std::vector<Frame> frames;
  for (int t = 0; t < n; ++t) {
    auto v = testing::random_values(static_cast<std::size_t>(w) * h, seed + t, 0, 255);
    for (double& x : v) x = std::round(x);
    frames.emplace_back(w, h, v);
  }
  return FrameSequence(frames);
}

void write_gray_png(const fs::path& path, int w, int h, const std::vector<std::uint8_t>& px) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = w;
  img.height = h;
  img.format = PNG_FORMAT_GRAY;
  REQUIRE(png_image_write_to_file(&img, path.c_str(), 0, px.data(), 0, nullptr));
}

std::uint32_t le32(const std::string& s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[at + i]);
  return v;
}

}  // namespace

TEST_CASE("tensor byte layout") {
  TempDir dir;
  const FrameSequence s({Frame(3, 2, std::vector<double>{0, 1, 2, 3, 4, 5}), Frame(3, 2, 0.5)});
  io::write_tensor(dir / "t.pft", s);
  const std::string bytes = testing::slurp(dir / "t.pft");
  REQUIRE(bytes.size() == 16 + 4 * 12);
  CHECK(bytes.substr(0, 4) == "PFT1");
  CHECK(le32(bytes, 4) == 2);
  CHECK(le32(bytes, 8) == 2);
  CHECK(le32(bytes, 12) == 3);
  float f = 0;
  std::memcpy(&f, bytes.data() + 16 + 4 * 5, 4);  // little-endian host
  CHECK(f == 5.0f);
  std::memcpy(&f, bytes.data() + 16 + 4 * 6, 4);
  CHECK(f == 0.5f);
  CHECK(io::read_tensor(dir / "t.pft") == s);
}

TEST_CASE("tensor errors") {
  TempDir dir;
  testing::spit(dir / "bad.pft", "PFT2\x01\0\0\0");
  CHECK_THROWS_AS(io::read_tensor_records(dir / "bad.pft"), IoError);
  std::string truncated("PFT1", 4);
  for (std::uint32_t v : {1u, 2u, 2u}) truncated.append(reinterpret_cast<const char*>(&v), 4);
  truncated.append(8, '\0');
  testing::spit(dir / "short.pft", truncated);
  CHECK_THROWS_AS(io::read_tensor_records(dir / "short.pft"), IoError);
  testing::spit(dir / "empty.pft", "");
  CHECK_THROWS_AS(io::read_tensor_records(dir / "empty.pft"), IoError);
  CHECK_THROWS_AS(io::write_tensor_records(dir / "x.pft", {{1, 1, 2, {1.0f}}}), ShapeError);
  CHECK_THROWS_AS(io::write_tensor(dir.path() / "missing" / "x.pft", integer_sequence(2, 4, 4, 0)),
                  IoError);
}

TEST_CASE("pgm round trip and directory loading") {
  TempDir dir;
  const FrameSequence s = integer_sequence(3, 10, 7, 1);
  // Written out of order: loading sorts by name.
  io::write_pgm(dir / "f002.pgm", s[2]);
  io::write_pgm(dir / "f000.pgm", s[0]);
  io::write_pgm(dir / "f001.pgm", s[1]);
  testing::spit(dir / "notes.txt", "ignored");
  CHECK(io::load_sequence(dir.path()) == s);
}

TEST_CASE("ascii and 16-bit PNM") {
  TempDir dir;
  testing::spit(dir / "a.pgm", "P2\n# comment\n3 1\n15\n0 15 5\n");
  const Frame a = io::read_image(dir / "a.pgm");
  CHECK(a(1, 0) == 255.0);
  CHECK(a(2, 0) == 85.0);

  std::string p5 = "P5 2 1 65535\n";
  p5 += std::string("\xff\xff\x00\x00", 4);
  testing::spit(dir / "b.pgm", p5);
  const Frame b = io::read_image(dir / "b.pgm");
  CHECK(b(0, 0) == 255.0);
  CHECK(b(1, 0) == 0.0);

  testing::spit(dir / "c.ppm", "P3 1 1 255 255 0 0\n");
  CHECK(io::read_image(dir / "c.ppm")(0, 0) == doctest::Approx(76.245).epsilon(1e-13));

  testing::spit(dir / "d.pgm", "P5 4 4 255\nabc");
  CHECK_THROWS_AS(io::read_image(dir / "d.pgm"), IoError);
  testing::spit(dir / "e.pgm", "P7 1 1 255\n");
  CHECK_THROWS_AS(io::read_image(dir / "e.pgm"), IoError);
  CHECK_THROWS_AS(io::read_image(dir / "f.bmp"), IoError);
}

TEST_CASE("png frames") {
  TempDir dir;
  std::vector<std::uint8_t> px(12);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>(20 * i);
  write_gray_png(dir / "f000.png", 4, 3, px);
  write_gray_png(dir / "f001.png", 4, 3, px);
  const FrameSequence s = io::load_sequence(dir.path());
  CHECK(s.size() == 2);
  CHECK(s[1](3, 2) == 220.0);

  io::Rgb8Image rgb{2, 1, {255, 0, 0, 10, 10, 10}};
  io::write_rgb(dir / "c.png", rgb);
  const Frame g = io::read_image(dir / "c.png");
  CHECK(g(0, 0) == doctest::Approx(76.245).epsilon(1e-13));
  CHECK(g(1, 0) == 10.0);
  const io::Rgb8Image back = io::read_rgb(dir / "c.png");
  CHECK(back.pixels == rgb.pixels);
}

TEST_CASE("load_sequence errors") {
  TempDir dir;
  CHECK_THROWS_AS(io::load_sequence(dir / "nope"), IoError);
  CHECK_THROWS_AS(io::load_sequence(dir.path()), LengthError);
  io::write_pgm(dir / "a.pgm", Frame(4, 4, 1.0));
  CHECK_THROWS_AS(io::load_sequence(dir.path()), LengthError);
  io::write_pgm(dir / "b.pgm", Frame(4, 5, 1.0));
  CHECK_THROWS_AS(io::load_sequence(dir.path()), ShapeError);
  testing::spit(dir / "plain.bin", "hello");
  CHECK_THROWS_AS(io::load_sequence(dir / "plain.bin"), IoError);

  TempDir one;
  io::write_tensor_records(one / "one.pft", {{1, 2, 2, {0, 0, 0, 0}}});
  CHECK_THROWS_AS(io::load_sequence(one / "one.pft"), LengthError);
}

TEST_CASE("tensor files load as sequences") {
  TempDir dir;
  const FrameSequence s = synth::render_advected_sequence(
      {16, 12, true}, synth::uniform_flow({16, 12, true}, 0.5, 0.25), 4, 2);
  io::write_tensor(dir / "s.pft", s);
  const FrameSequence back = io::load_sequence(dir / "s.pft");
  REQUIRE(back.size() == 4);
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t i = 0; i < s.pixel_count(); ++i)
      CHECK(back[t].values()[i] == static_cast<double>(static_cast<float>(s[t].values()[i])));
}

TEST_CASE("weight bundles") {
  TempDir dir;
  const auto w = qnn::QuaternionLayerWeights::random(5, 3, 9);
  io::save_weights(dir / "q.pft", w);
  const auto wb = io::load_quaternion_weights(dir / "q.pft");
  CHECK(wb.out_dim() == 3);
  CHECK(wb.in_dim() == 5);
  CHECK((wb.w_y - w.w_y).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(wb.w_x(2, 4) == static_cast<double>(static_cast<float>(w.w_x(2, 4))));

  auto lora = qnn::LoraAdapter::wrap(Eigen::MatrixXd::Random(6, 4), 2, 4.0, 1);
  lora.b = Eigen::MatrixXd::Constant(6, 2, 0.25);
  io::save_weights(dir / "l.pft", lora);
  const auto lb = io::load_lora_adapter(dir / "l.pft");
  CHECK(lb.rank() == 2);
  CHECK(lb.scale == 2.0);
  CHECK(lb.b == lora.b);
  CHECK((lb.a - lora.a).cwiseAbs().maxCoeff() < 1e-7);

  CHECK_THROWS_AS(io::load_lora_adapter(dir / "q.pft"), IoError);
  CHECK_THROWS_AS(io::load_quaternion_weights(dir / "l.pft"), IoError);
}
