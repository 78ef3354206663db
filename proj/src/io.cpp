#include "phyfid/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "phyfid/error.hpp"

namespace phyfid::io {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --- PNM ---------------------------------------------------------------

class PnmParser {
 public:
  PnmParser(const std::vector<unsigned char>& bytes, const fs::path& path)
      : bytes_(bytes), path_(path) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) out += static_cast<char>(bytes_[pos_++]);
    if (out.empty()) fail("truncated header");
    return out;
  }

  int integer() {
    const std::string t = token();
    try {
      std::size_t used = 0;
      const int v = std::stoi(t, &used);
      if (used != t.size() || v < 0) fail("bad number '" + t + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad number '" + t + "'");
    }
    return 0;
  }

  // Exactly one whitespace byte separates the header from binary data.
  void end_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("malformed header");
    ++pos_;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  const unsigned char* data() const { return bytes_.data() + pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(path_.string() + ": " + what);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  fs::path path_;
  std::size_t pos_ = 0;
};

Frame read_pnm(const fs::path& path) {
  const auto bytes = read_bytes(path);
  PnmParser p(bytes, path);
  const std::string magic = p.token();
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
    p.fail("unsupported PNM type '" + magic + "'");
  }
  const bool color = magic == "P3" || magic == "P6";
  const bool binary = magic == "P5" || magic == "P6";
  const int w = p.integer(), h = p.integer(), maxval = p.integer();
  if (w <= 0 || h <= 0) p.fail("empty image");
  if (maxval <= 0 || maxval > 65535) p.fail("bad maxval");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::size_t channels = color ? 3 : 1;
  std::vector<double> samples(n * channels);

  if (binary) {
    p.end_header();
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (p.remaining() < samples.size() * bytes_per) p.fail("truncated pixel data");
    const unsigned char* d = p.data();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = bytes_per == 1 ? d[i] : (d[2 * i] << 8) | d[2 * i + 1];
    }
  } else {
    for (auto& s : samples) s = p.integer();
  }
  const double to_255 = 255.0 / maxval;
  if (maxval != 255) {
    for (auto& s : samples) s *= to_255;
  }
  if (!color) return Frame(w, h, std::move(samples));
  RgbImage rgb{w, h, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    rgb.r[i] = samples[3 * i];
    rgb.g[i] = samples[3 * i + 1];
    rgb.b[i] = samples[3 * i + 2];
  }
  return to_grayscale(rgb);
}

// --- PNG ---------------------------------------------------------------

struct PngImageGuard {
  png_image image{};
  PngImageGuard() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImageGuard() { png_image_free(&image); }
};

Frame read_png(const fs::path& path) {
  PngImageGuard g;
  if (!png_image_begin_read_from_file(&g.image, path.c_str())) {
    throw IoError(path.string() + ": " + g.image.message);
  }
  const bool color = (g.image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  g.image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(g.image));
  if (!png_image_finish_read(&g.image, nullptr, buffer.data(), 0, nullptr)) {
    throw IoError(path.string() + ": " + g.image.message);
  }
  const int w = static_cast<int>(g.image.width), h = static_cast<int>(g.image.height);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (!color) return Frame(w, h, std::vector<double>(buffer.begin(), buffer.end()));
  RgbImage rgb{w, h, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    rgb.r[i] = buffer[3 * i];
    rgb.g[i] = buffer[3 * i + 1];
    rgb.b[i] = buffer[3 * i + 2];
  }
  return to_grayscale(rgb);
}

void write_png(const fs::path& path, const Rgb8Image& image,
               const std::vector<std::pair<std::string, std::string>>& text) {
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  std::vector<png_text> chunks(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = const_cast<char*>(text[i].first.c_str());
    chunks[i].text = const_cast<char*>(text[i].second.c_str());
  }
  if (!chunks.empty()) png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, image.pixels.data() + static_cast<std::size_t>(y) * image.width * 3);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// --- little-endian helpers ---------------------------------------------

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

constexpr char kMagic[4] = {'P', 'F', 'T', '1'};

bool has_tensor_magic(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  return in.read(magic, 4) && std::memcmp(magic, kMagic, 4) == 0;
}

TensorRecord matrix_record(const std::vector<const Eigen::MatrixXd*>& blocks) {
  TensorRecord r;
  r.n = static_cast<std::uint32_t>(blocks.size());
  r.h = static_cast<std::uint32_t>(blocks.front()->rows());
  r.w = static_cast<std::uint32_t>(blocks.front()->cols());
  for (const auto* m : blocks) {
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      for (Eigen::Index j = 0; j < m->cols(); ++j) r.data.push_back(static_cast<float>((*m)(i, j)));
    }
  }
  return r;
}

Eigen::MatrixXd block_of(const TensorRecord& r, std::uint32_t k) {
  Eigen::MatrixXd m(r.h, r.w);
  const std::size_t base = static_cast<std::size_t>(k) * r.h * r.w;
  for (std::uint32_t i = 0; i < r.h; ++i) {
    for (std::uint32_t j = 0; j < r.w; ++j) m(i, j) = r.data[base + i * r.w + j];
  }
  return m;
}

}  // namespace

Frame read_image(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("not a readable file: " + path.string());
  const std::string ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  throw IoError("unsupported image type: " + path.string());
}

void write_pgm(const fs::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  std::vector<char> bytes(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    bytes[i] = static_cast<char>(
        static_cast<unsigned char>(std::clamp(std::round(frame.values()[i]), 0.0, 255.0)));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_rgb(const fs::path& path, const Rgb8Image& image,
               const std::vector<std::pair<std::string, std::string>>& text) {
  if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw ShapeError("rgb pixel buffer does not match dimensions");
  }
  const std::string ext = lower_ext(path);
  if (ext == ".png") return write_png(path, image, text);
  if (ext != ".ppm") throw IoError("heatmaps are written as .png or .ppm: " + path.string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P6\n";
  for (const auto& [k, v] : text) out << "# " << k << '=' << v << '\n';
  out << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

Rgb8Image read_rgb(const fs::path& path) {
  Rgb8Image out;
  if (lower_ext(path) == ".png") {
    PngImageGuard g;
    if (!png_image_begin_read_from_file(&g.image, path.c_str())) {
      throw IoError(path.string() + ": " + g.image.message);
    }
    g.image.format = PNG_FORMAT_RGB;
    out.pixels.resize(PNG_IMAGE_SIZE(g.image));
    if (!png_image_finish_read(&g.image, nullptr, out.pixels.data(), 0, nullptr)) {
      throw IoError(path.string() + ": " + g.image.message);
    }
    out.width = static_cast<int>(g.image.width);
    out.height = static_cast<int>(g.image.height);
    return out;
  }
  const auto bytes = read_bytes(path);
  PnmParser p(bytes, path);
  if (p.token() != "P6") p.fail("expected binary PPM");
  out.width = p.integer();
  out.height = p.integer();
  if (p.integer() != 255) p.fail("expected 8-bit PPM");
  p.end_header();
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * 3;
  if (p.remaining() < n) p.fail("truncated pixel data");
  out.pixels.assign(p.data(), p.data() + n);
  return out;
}

void write_tensor_records(const fs::path& path, const std::vector<TensorRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const TensorRecord& r : records) {
    if (r.data.size() != static_cast<std::size_t>(r.n) * r.h * r.w) {
      throw ShapeError("tensor record payload does not match its header");
    }
    out.write(kMagic, 4);
    put_u32(out, r.n);
    put_u32(out, r.h);
    put_u32(out, r.w);
    for (float f : r.data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<TensorRecord> read_tensor_records(const fs::path& path) {
  const auto bytes = read_bytes(path);
  std::vector<TensorRecord> records;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 16 || std::memcmp(bytes.data() + pos, kMagic, 4) != 0) {
      throw IoError(path.string() + ": bad tensor header at byte " + std::to_string(pos));
    }
    TensorRecord r;
    r.n = get_u32(bytes.data() + pos + 4);
    r.h = get_u32(bytes.data() + pos + 8);
    r.w = get_u32(bytes.data() + pos + 12);
    pos += 16;
    const std::size_t count = static_cast<std::size_t>(r.n) * r.h * r.w;
    if ((bytes.size() - pos) / 4 < count) throw IoError(path.string() + ": truncated tensor data");
    r.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      r.data[i] = std::bit_cast<float>(get_u32(bytes.data() + pos + 4 * i));
    }
    pos += 4 * count;
    records.push_back(std::move(r));
  }
  if (records.empty()) throw IoError(path.string() + ": empty tensor file");
  return records;
}

void write_tensor(const fs::path& path, const FrameSequence& seq) {
  TensorRecord r;
  r.n = static_cast<std::uint32_t>(seq.size());
  r.h = static_cast<std::uint32_t>(seq.height());
  r.w = static_cast<std::uint32_t>(seq.width());
  r.data.reserve(seq.size() * seq.pixel_count());
  for (const Frame& f : seq.frames()) {
    for (double v : f.values()) r.data.push_back(static_cast<float>(v));
  }
  write_tensor_records(path, {r});
}

FrameSequence read_tensor(const fs::path& path) {
  auto records = read_tensor_records(path);
  if (records.size() != 1) throw IoError(path.string() + ": expected a single tensor record");
  const TensorRecord& r = records.front();
  if (r.h == 0 || r.w == 0) throw ShapeError(path.string() + ": empty frames");
  std::vector<Frame> frames;
  const std::size_t m = static_cast<std::size_t>(r.h) * r.w;
  for (std::uint32_t t = 0; t < r.n; ++t) {
    frames.emplace_back(static_cast<int>(r.w), static_cast<int>(r.h),
                        std::vector<double>(r.data.begin() + t * m, r.data.begin() + (t + 1) * m));
  }
  return FrameSequence(std::move(frames));
}

FrameSequence load_sequence(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw IoError("no such file or directory: " + path.string());
  if (fs::is_regular_file(path)) {
    if (!has_tensor_magic(path)) throw IoError(path.string() + ": not a tensor file");
    return read_tensor(path);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_ext(entry.path());
    if (ext == ".png" || ext == ".pgm" || ext == ".ppm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  if (files.size() < 2) {
    throw LengthError(path.string() + " holds " + std::to_string(files.size()) +
                      " frame images; at least 2 are needed");
  }
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(read_image(f));
  return FrameSequence(std::move(frames));
}

void save_weights(const fs::path& path, const qnn::QuaternionLayerWeights& w) {
  w.validate();
  write_tensor_records(path, {matrix_record({&w.w_r, &w.w_x, &w.w_y, &w.w_z})});
}

qnn::QuaternionLayerWeights load_quaternion_weights(const fs::path& path) {
  const auto records = read_tensor_records(path);
  if (records.size() != 1 || records.front().n != 4) {
    throw IoError(path.string() + ": expected one record with 4 quaternion blocks");
  }
  const auto& r = records.front();
  return {block_of(r, 0), block_of(r, 1), block_of(r, 2), block_of(r, 3)};
}

void save_weights(const fs::path& path, const qnn::LoraAdapter& adapter) {
  adapter.validate();
  const Eigen::MatrixXd scale = Eigen::MatrixXd::Constant(1, 1, adapter.scale);
  write_tensor_records(path, {matrix_record({&adapter.base}), matrix_record({&adapter.a}),
                              matrix_record({&adapter.b}), matrix_record({&scale})});
}

qnn::LoraAdapter load_lora_adapter(const fs::path& path) {
  const auto records = read_tensor_records(path);
  if (records.size() != 4 || records[3].data.size() != 1) {
    throw IoError(path.string() + ": expected base, A, B and scale records");
  }
  qnn::LoraAdapter out{block_of(records[0], 0), block_of(records[1], 0),
                       block_of(records[2], 0), records[3].data[0]};
  out.validate();
  return out;
}

}  // namespace phyfid::io
