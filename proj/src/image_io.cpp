#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include <json.hpp>

#include "parcelpick/errors.hpp"
#include "parcelpick/imaging.hpp"

namespace parcelpick {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct RawPng {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> bytes;  // rows back to back, big-endian samples
  std::size_t row_bytes = 0;
};

RawPng read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw IoError("not a PNG file: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng: cannot create read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng: cannot create info struct");
  }
  RawPng raw;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("cannot decode PNG " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  raw.width = static_cast<int>(png_get_image_width(png, info));
  raw.height = static_cast<int>(png_get_image_height(png, info));
  raw.bit_depth = png_get_bit_depth(png, info);
  raw.color_type = png_get_color_type(png, info);
  if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) png_set_interlace_handling(png);
  png_read_update_info(png, info);
  raw.row_bytes = png_get_rowbytes(png, info);
  raw.bytes.resize(raw.row_bytes * static_cast<std::size_t>(raw.height));
  rows.resize(raw.height);
  for (int y = 0; y < raw.height; ++y) rows[y] = raw.bytes.data() + raw.row_bytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return raw;
}

void write_png(const std::filesystem::path& path, int width, int height, int bit_depth, int color_type,
               const std::vector<std::uint8_t>& bytes, std::size_t row_bytes) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw IoError("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng: cannot create info struct");
  }
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = const_cast<png_bytep>(bytes.data() + row_bytes * y);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot encode PNG " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(fp.get()) != 0) throw IoError("write failed: " + path.string());
}

}  // namespace

DepthImage load_depth_png(const std::filesystem::path& path) {
  RawPng raw = read_png(path);
  if (raw.color_type != PNG_COLOR_TYPE_GRAY || raw.bit_depth != 16)
    throw IoError("depth PNG must be 16-bit single channel: " + path.string());
  std::vector<double> data(static_cast<std::size_t>(raw.width) * raw.height);
  for (int y = 0; y < raw.height; ++y) {
    const std::uint8_t* row = raw.bytes.data() + raw.row_bytes * y;
    for (int x = 0; x < raw.width; ++x) {
      const unsigned mm = (unsigned{row[2 * x]} << 8) | row[2 * x + 1];
      data[static_cast<std::size_t>(y) * raw.width + x] = mm / 1000.0;
    }
  }
  return DepthImage(raw.width, raw.height, std::move(data));
}

void save_depth_png(const DepthImage& depth, const std::filesystem::path& path) {
  const std::size_t row_bytes = 2 * static_cast<std::size_t>(depth.width());
  std::vector<std::uint8_t> bytes(row_bytes * depth.height());
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const double mm = std::round(depth.at(u, v) * 1000.0);
      const auto q = static_cast<unsigned>(std::clamp(mm, 0.0, 65535.0));
      bytes[row_bytes * v + 2 * u] = static_cast<std::uint8_t>(q >> 8);
      bytes[row_bytes * v + 2 * u + 1] = static_cast<std::uint8_t>(q & 0xff);
    }
  }
  write_png(path, depth.width(), depth.height(), 16, PNG_COLOR_TYPE_GRAY, bytes, row_bytes);
}

ColorImage load_color_png(const std::filesystem::path& path) {
  RawPng raw = read_png(path);
  if (raw.color_type != PNG_COLOR_TYPE_RGB || raw.bit_depth != 8)
    throw IoError("color PNG must be 8-bit RGB: " + path.string());
  std::vector<std::uint8_t> data(3 * static_cast<std::size_t>(raw.width) * raw.height);
  for (int y = 0; y < raw.height; ++y)
    std::copy_n(raw.bytes.data() + raw.row_bytes * y, 3 * static_cast<std::size_t>(raw.width),
                data.data() + 3 * static_cast<std::size_t>(raw.width) * y);
  return ColorImage(raw.width, raw.height, std::move(data));
}

void save_color_png(const ColorImage& color, const std::filesystem::path& path) {
  const std::size_t row_bytes = 3 * static_cast<std::size_t>(color.width());
  std::vector<std::uint8_t> bytes(color.data().begin(), color.data().end());
  write_png(path, color.width(), color.height(), 8, PNG_COLOR_TYPE_RGB, bytes, row_bytes);
}

RgbdPair load_rgbd(const std::filesystem::path& color_path, const std::filesystem::path& depth_path) {
  RgbdPair pair{load_color_png(color_path), load_depth_png(depth_path)};
  if (pair.color.width() != pair.depth.width() || pair.color.height() != pair.depth.height())
    throw RegistrationError("color is " + std::to_string(pair.color.width()) + "x" +
                            std::to_string(pair.color.height()) + " but depth is " +
                            std::to_string(pair.depth.width()) + "x" + std::to_string(pair.depth.height()));
  return pair;
}

CameraIntrinsics load_intrinsics_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CameraIntrinsics k;
  try {
    const auto j = nlohmann::json::parse(in);
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad intrinsics file " + path.string() + ": " + e.what());
  }
  k.validate();
  return k;
}

void save_intrinsics_json(const CameraIntrinsics& k, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const nlohmann::json j = {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width},
                            {"height", k.height}};
  out << j.dump(2) << '\n';
}

}  // namespace parcelpick
