#pragma once

// Frame and tensor files.
//
// Tensor format (all integers and floats little-endian):
//   "PFT1" | u32 N | u32 H | u32 W | N*H*W float32, row-major, frame-major
// A weight bundle is a concatenation of such records.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "phyfid/fields.hpp"
#include "phyfid/promptnet.hpp"

namespace phyfid::io {

/// 8-bit per channel interleaved RGB.
struct Rgb8Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * 3
};

/// Reads PGM (P2/P5, 8 or 16 bit), PPM (P3/P6) or PNG. Colour images go
/// through to_grayscale. 16-bit samples are rescaled to [0, 255].
Frame read_image(const std::filesystem::path& path);

/// 8-bit binary PGM; values are rounded and clamped to [0, 255].
void write_pgm(const std::filesystem::path& path, const Frame& frame);

/// PNG or binary PPM, chosen by extension (.png / .ppm). Text entries become
/// PNG tEXt chunks or PPM comment lines.
void write_rgb(const std::filesystem::path& path, const Rgb8Image& image,
               const std::vector<std::pair<std::string, std::string>>& text = {});

Rgb8Image read_rgb(const std::filesystem::path& path);

struct TensorRecord {
  std::uint32_t n = 0, h = 0, w = 0;
  std::vector<float> data;
};

void write_tensor_records(const std::filesystem::path& path,
                          const std::vector<TensorRecord>& records);
std::vector<TensorRecord> read_tensor_records(const std::filesystem::path& path);

/// Single-record tensor file holding every frame.
void write_tensor(const std::filesystem::path& path, const FrameSequence& seq);
FrameSequence read_tensor(const std::filesystem::path& path);

/// A directory of .png/.pgm/.ppm frames in lexicographic name order, or a
/// single tensor file.
FrameSequence load_sequence(const std::filesystem::path& path);

/// One record with N = 4 blocks (r, x, y, z), H = out_dim, W = in_dim.
void save_weights(const std::filesystem::path& path, const qnn::QuaternionLayerWeights& w);
qnn::QuaternionLayerWeights load_quaternion_weights(const std::filesystem::path& path);

/// Records: base, A, B, then a 1x1x1 record holding the scale.
void save_weights(const std::filesystem::path& path, const qnn::LoraAdapter& adapter);
qnn::LoraAdapter load_lora_adapter(const std::filesystem::path& path);

}  // namespace phyfid::io
