#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace parcelpick {

/// Integer pixel coordinate: `u` is the column, `v` the row.
struct Pixel {
  int u = 0;
  int v = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  /// Row-major order: smaller row first, then smaller column.
  friend std::strong_ordering operator<=>(const Pixel& a, const Pixel& b) {
    if (auto c = a.v <=> b.v; c != 0) return c;
    return a.u <=> b.u;
  }
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Point in the camera frame, meters. z grows away from the camera.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Real-valued color, used for window and region means.
struct RgbF {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

inline double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

/// Per-pixel depth in meters, row-major. A value of 0 marks a missing sample.
class DepthImage {
 public:
  DepthImage() = default;
  DepthImage(int width, int height, double fill = 0.0);
  /// Throws std::invalid_argument when the size does not match or a value is
  /// negative or non-finite.
  DepthImage(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width_ && v < height_; }

  double at(int u, int v) const { return data_[index(u, v)]; }
  double at(Pixel p) const { return at(p.u, p.v); }
  void set(int u, int v, double depth);
  bool valid(int u, int v) const { return at(u, v) > 0.0; }

  std::span<const double> data() const { return data_; }

  friend bool operator==(const DepthImage&, const DepthImage&) = default;

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(u);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// 8-bit RGB, row-major, interleaved.
class ColorImage {
 public:
  ColorImage() = default;
  ColorImage(int width, int height, Rgb fill = {});
  ColorImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width_ && v < height_; }

  Rgb at(int u, int v) const {
    const std::size_t i = index(u, v);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  Rgb at(Pixel p) const { return at(p.u, p.v); }
  void set(int u, int v, Rgb c) {
    const std::size_t i = index(u, v);
    data_[i] = c.r;
    data_[i + 1] = c.g;
    data_[i + 2] = c.b;
  }

  std::span<const std::uint8_t> data() const { return data_; }

  friend bool operator==(const ColorImage&, const ColorImage&) = default;

 private:
  std::size_t index(int u, int v) const {
    return 3 * (static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(u));
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Per-pixel boolean mask over an image.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height) : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width_ && v < height_; }
  bool at(int u, int v) const { return data_[static_cast<std::size_t>(v) * width_ + u] != 0; }
  bool at(Pixel p) const { return at(p.u, p.v); }
  /// False outside the image.
  bool test(int u, int v) const { return contains(u, v) && at(u, v); }
  void set(int u, int v, bool on = true) { data_[static_cast<std::size_t>(v) * width_ + u] = on ? 1 : 0; }
  std::size_t count() const;

  std::span<const std::uint8_t> data() const { return data_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Pinhole intrinsics plus the image size they were calibrated for.
struct CameraIntrinsics {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  /// Throws ConfigError if focal lengths are not positive or the principal
  /// point falls outside the image.
  void validate() const;
};

struct RgbdPair {
  ColorImage color;
  DepthImage depth;
};

// --- file I/O -------------------------------------------------------------

/// Reads a 16-bit single-channel PNG holding millimeters.
DepthImage load_depth_png(const std::filesystem::path& path);
/// Writes meters as rounded millimeters, clamped to the 16-bit range.
void save_depth_png(const DepthImage& depth, const std::filesystem::path& path);
ColorImage load_color_png(const std::filesystem::path& path);
void save_color_png(const ColorImage& color, const std::filesystem::path& path);

/// Loads a registered pair. Mismatched dimensions raise RegistrationError;
/// unreadable files raise IoError.
RgbdPair load_rgbd(const std::filesystem::path& color_path, const std::filesystem::path& depth_path);

CameraIntrinsics load_intrinsics_json(const std::filesystem::path& path);
void save_intrinsics_json(const CameraIntrinsics& k, const std::filesystem::path& path);

// --- processing -----------------------------------------------------------

/// Fills every zero pixel with the value of its nearest valid pixel
/// (Euclidean pixel distance; ties go to the smaller row, then the smaller
/// column). Valid pixels are returned untouched. Throws EmptyDepthError when
/// no pixel is valid.
DepthImage inpaint_invalid(const DepthImage& depth);

/// Pinhole back-projection. Throws InvalidDepthError for depth <= 0.
Point3 deproject(double u, double v, double depth, const CameraIntrinsics& k);

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

/// Pinhole projection, real valued. Throws BehindCameraError for z <= 0.
PixelCoord project(const Point3& p, const CameraIntrinsics& k);

}  // namespace parcelpick
