#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "parcelpick/errors.hpp"
#include "parcelpick/imaging.hpp"
#include "parcelpick/random.hpp"

using namespace parcelpick;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("parcelpick_test_" + name);
  fs::create_directories(p);
  return p;
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Nearest valid pixel by exhaustive search; ties to the smaller row, then
// the smaller column.
double nearest_valid_bruteforce(const DepthImage& d, int u, int v) {
  long best = std::numeric_limits<long>::max();
  double value = 0;
  for (int y = 0; y < d.height(); ++y)
    for (int x = 0; x < d.width(); ++x) {
      if (!d.valid(x, y)) continue;
      const long dist = static_cast<long>(x - u) * (x - u) + static_cast<long>(y - v) * (y - v);
      if (dist < best) {
        best = dist;
        value = d.at(x, y);
      }
    }
  return value;
}

}  // namespace

TEST_CASE("depth png stores millimetres and 0 means missing") {
  const fs::path dir = temp_dir("depth_units");
  DepthImage d(640, 480, 0.0);
  d.set(10, 20, 1.0);
  d.set(11, 20, 0.0);
  save_depth_png(d, dir / "d.png");
  const DepthImage back = load_depth_png(dir / "d.png");
  CHECK(back.at(10, 20) == 1.0);
  CHECK(back.at(11, 20) == 0.0);
  CHECK_FALSE(back.valid(11, 20));
}

TEST_CASE("depth png load-save-load is bit identical") {
  const fs::path dir = temp_dir("depth_roundtrip");
  Rng rng(5);
  DepthImage d(64, 48);
  for (int v = 0; v < 48; ++v)
    for (int u = 0; u < 64; ++u) d.set(u, v, uniform_index(rng, 4) == 0 ? 0.0 : uniform(rng, 0.3, 3.0));
  save_depth_png(d, dir / "a.png");
  const DepthImage once = load_depth_png(dir / "a.png");
  save_depth_png(once, dir / "b.png");
  const DepthImage twice = load_depth_png(dir / "b.png");
  CHECK(once == twice);
  CHECK(read_bytes(dir / "a.png") == read_bytes(dir / "b.png"));
  for (int v = 0; v < 48; ++v)
    for (int u = 0; u < 64; ++u) CHECK(std::abs(once.at(u, v) - d.at(u, v)) <= 0.0005 + 1e-12);
}

TEST_CASE("color png round trip") {
  const fs::path dir = temp_dir("color_roundtrip");
  ColorImage c(7, 5);
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 7; ++u)
      c.set(u, v, {static_cast<std::uint8_t>(u * 30), static_cast<std::uint8_t>(v * 50), 7});
  save_color_png(c, dir / "c.png");
  CHECK(load_color_png(dir / "c.png") == c);
}

TEST_CASE("rgbd pair with mismatched sizes is rejected") {
  const fs::path dir = temp_dir("registration");
  save_color_png(ColorImage(640, 480), dir / "c.png");
  save_depth_png(DepthImage(320, 240, 1.0), dir / "d.png");
  CHECK_THROWS_AS(load_rgbd(dir / "c.png", dir / "d.png"), RegistrationError);
}

TEST_CASE("missing or corrupt image files raise IoError") {
  const fs::path dir = temp_dir("io_errors");
  CHECK_THROWS_AS(load_depth_png(dir / "nope.png"), IoError);
  std::ofstream(dir / "junk.png") << "not a png";
  CHECK_THROWS_AS(load_color_png(dir / "junk.png"), IoError);
}

TEST_CASE("intrinsics json round trip and validation") {
  const fs::path dir = temp_dir("intrinsics");
  CameraIntrinsics k{615.5, 612.25, 318.0, 241.5, 640, 480};
  save_intrinsics_json(k, dir / "k.json");
  const CameraIntrinsics back = load_intrinsics_json(dir / "k.json");
  CHECK(back.fx == k.fx);
  CHECK(back.fy == k.fy);
  CHECK(back.cx == k.cx);
  CHECK(back.cy == k.cy);
  CHECK(back.width == 640);
  CHECK(back.height == 480);
  CameraIntrinsics bad = k;
  bad.fx = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("inpaint leaves a fully valid image unchanged") {
  DepthImage d(5, 4, 1.25);
  d.set(2, 2, 0.8);
  CHECK(inpaint_invalid(d) == d);
}

TEST_CASE("inpaint fills a hole in a constant neighbourhood") {
  DepthImage d(5, 5, 1.0);
  d.set(2, 2, 0.0);
  CHECK(inpaint_invalid(d).at(2, 2) == 1.0);
}

TEST_CASE("inpaint ties go to the smaller row") {
  DepthImage d(3, 3, 0.0);
  d.set(1, 0, 0.9);
  d.set(1, 2, 1.1);
  CHECK(inpaint_invalid(d).at(1, 1) == 0.9);
}

TEST_CASE("inpaint ties on the same row go to the smaller column") {
  DepthImage d(3, 1, 0.0);
  d.set(0, 0, 0.7);
  d.set(2, 0, 0.6);
  CHECK(inpaint_invalid(d).at(1, 0) == 0.7);
}

TEST_CASE("inpaint of an all-invalid image throws") {
  CHECK_THROWS_AS(inpaint_invalid(DepthImage(4, 4, 0.0)), EmptyDepthError);
}

TEST_CASE("inpaint matches exhaustive nearest-neighbour search") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 5 + static_cast<int>(uniform_index(rng, 20));
    const int h = 5 + static_cast<int>(uniform_index(rng, 15));
    DepthImage d(w, h);
    const double holes = uniform(rng, 0.2, 0.97);
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u)
        if (uniform01(rng) > holes) d.set(u, v, 0.5 + 0.25 * static_cast<double>(uniform_index(rng, 5)));
    if (std::all_of(d.data().begin(), d.data().end(), [](double x) { return x == 0; })) d.set(0, 0, 1.0);
    const DepthImage f = inpaint_invalid(d);
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u) {
        if (d.valid(u, v))
          REQUIRE(f.at(u, v) == d.at(u, v));
        else
          REQUIRE(f.at(u, v) == nearest_valid_bruteforce(d, u, v));
      }
    CHECK(inpaint_invalid(f) == f);
  }
}

TEST_CASE("deproject and project examples") {
  const CameraIntrinsics k;
  const Point3 p = deproject(k.cx, k.cy, 1.0, k);
  CHECK(p.x == 0.0);
  CHECK(p.y == 0.0);
  CHECK(p.z == 1.0);
  const Point3 q = deproject(k.cx + k.fx, k.cy, 2.0, k);
  CHECK(q.x == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(q.y == 0.0);
  CHECK(q.z == 2.0);

  const PixelCoord c = project({0, 0, 1}, k);
  CHECK(c.u == k.cx);
  CHECK(c.v == k.cy);
  const PixelCoord r = project({1, 0, 1}, k);
  CHECK(r.u == 920.0);
  CHECK(r.v == k.cy);

  CHECK_THROWS_AS(deproject(1, 1, 0.0, k), InvalidDepthError);
  CHECK_THROWS_AS(project({0, 0, 0}, k), BehindCameraError);
  CHECK_THROWS_AS(project({0, 0, -1}, k), BehindCameraError);
}

TEST_CASE("projection round trips") {
  const CameraIntrinsics k{612.0, 608.0, 321.5, 239.25, 640, 480};
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double u = uniform(rng, 0, 640);
    const double v = uniform(rng, 0, 480);
    const double z = uniform(rng, 0.3, 3.0);
    const PixelCoord back = project(deproject(u, v, z, k), k);
    CHECK(std::abs(back.u - u) < 1e-6);
    CHECK(std::abs(back.v - v) < 1e-6);

    const Point3 p{uniform(rng, -1, 1), uniform(rng, -1, 1), z};
    const PixelCoord px = project(p, k);
    const Point3 again = deproject(px.u, px.v, p.z, k);
    CHECK(std::abs(again.x - p.x) < 1e-9);
    CHECK(std::abs(again.y - p.y) < 1e-9);
  }
}

TEST_CASE("depth image rejects negative or non-finite values") {
  DepthImage d(2, 2);
  CHECK_THROWS(d.set(0, 0, -1.0));
  CHECK_THROWS(d.set(0, 0, std::numeric_limits<double>::quiet_NaN()));
}
