#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "parcelpick/json_io.hpp"

using namespace parcelpick;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "parcelpick_test_cli";

// Runs the CLI with stdout and stderr captured; returns the exit status.
int cli(const std::string& args, std::string* out = nullptr) {
  fs::create_directories(kRoot);
  const fs::path log = kRoot / "stdout.txt";
  const std::string cmd = std::string(PARCELPICK_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dir(const std::string& name) {
  const fs::path p = kRoot / name;
  fs::remove_all(p);
  return p.string();
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli("") == 2);
  CHECK(cli("gen-scene") == 2);
  CHECK(cli("gen-scene --bags 1 --seed 1 -o " + dir("u") + " --bogus") == 2);
  CHECK(cli("run-pipeline --seed 1") == 2);
  CHECK(cli("--help") == 0);
}

TEST_CASE("gen-scene writes a complete bundle deterministically") {
  const std::string a = dir("gen_a"), b = dir("gen_b");
  REQUIRE(cli("gen-scene --bags 2 --envelopes 1 --seed 7 -o " + a) == 0);
  REQUIRE(cli("gen-scene --bags 2 --envelopes 1 --seed 7 -o " + b) == 0);
  for (const char* f : {"color.png", "depth.png", "scene.json", "truth.json"}) {
    REQUIRE(fs::exists(fs::path(a) / f));
    CHECK(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));
  }
  const Json scene = read_json_file(fs::path(a) / "scene.json");
  CHECK(scene["objects"].size() == 3);
}

TEST_CASE("gen-scene corpus writes a manifest") {
  const std::string c = dir("corpus");
  REQUIRE(cli("gen-scene --bags 1 --seed 2 --count 3 -o " + c) == 0);
  const Json m = read_json_file(fs::path(c) / "manifest.json");
  REQUIRE(m["scenes"].size() == 3);
  for (const Json& e : m["scenes"]) CHECK(fs::exists(fs::path(c) / e["scene"].get<std::string>()));
}

TEST_CASE("plan-grasp on a bag is deterministic") {
  const std::string in = dir("pg_in");
  REQUIRE(cli("gen-scene --bags 1 --seed 3 -o " + in) == 0);
  const std::string a = dir("pg_a"), b = dir("pg_b");
  REQUIRE(cli("plan-grasp -i " + in + " -o " + a + " --seed 5") == 0);
  REQUIRE(cli("plan-grasp -i " + in + " -o " + b + " --seed 5") == 0);
  CHECK(slurp(fs::path(a) / "plans.json") == slurp(fs::path(b) / "plans.json"));
  CHECK(fs::exists(fs::path(a) / "overlay.png"));
  const Json plans = read_json_file(fs::path(a) / "plans.json");
  CHECK(!plans["selected"].is_null());
  CHECK(plans["use_filter"] == true);
  REQUIRE(cli("plan-grasp -i " + in + " -o " + a + " --seed 5 --no-filter") == 0);
  CHECK(read_json_file(fs::path(a) / "plans.json")["use_filter"] == false);
}

TEST_CASE("plan-grasp on an empty table exits 3 with a diagnostic") {
  const std::string in = dir("flat");
  REQUIRE(cli("gen-scene --seed 1 --noise 0 -o " + in) == 0);
  std::string out;
  CHECK(cli("plan-grasp -i " + in + " --seed 1", &out) == 3);
  const Json diag = Json::parse(out);
  CHECK(diag["error"] == "no_grasp");
  CHECK(diag["candidates"] == 0);
  CHECK(diag["most_violated"].is_null());
  // Sensor noise alone yields a few spurious edge pairs, none of which pass.
  REQUIRE(cli("gen-scene --seed 1 -o " + in) == 0);
  CHECK(cli("plan-grasp -i " + in + " --seed 1", &out) == 3);
  CHECK(Json::parse(out)["most_violated"].is_string());
}

TEST_CASE("plan-suction and detect on an envelope") {
  const std::string in = dir("env");
  REQUIRE(cli("gen-scene --envelopes 1 --seed 4 -o " + in) == 0);
  REQUIRE(cli("plan-suction -i " + in + " --seed 2") == 0);
  const Json s = read_json_file(fs::path(in) / "suction.json");
  CHECK(s["bbox_source"] == "detection");
  CHECK(!s["plan"].is_null());
  REQUIRE(cli("detect -i " + in) == 0);
  const Json d = read_json_file(fs::path(in) / "detections.json");
  REQUIRE(d["detections"].size() == 1);
  CHECK(d["detections"][0]["class"] == "envelope");
  CHECK(cli("plan-suction -i " + in + " --seed 2 --bbox 1 2 3") == 2);
}

TEST_CASE("run-pipeline report is deterministic and clears the table") {
  const std::string a = dir("rp_a"), b = dir("rp_b");
  REQUIRE(cli("run-pipeline --bags 1 --envelopes 1 --scene-seed 4 --seed 4 -o " + a) == 0);
  REQUIRE(cli("run-pipeline --bags 1 --envelopes 1 --scene-seed 4 --seed 4 --no-frames -o " + b) == 0);
  CHECK(slurp(fs::path(a) / "report.json") == slurp(fs::path(b) / "report.json"));
  CHECK(fs::exists(fs::path(a) / "frames" / "frame_000.png"));
  CHECK_FALSE(fs::exists(fs::path(b) / "frames"));
  CHECK(read_json_file(fs::path(a) / "report.json")["all_placed"] == true);
}

TEST_CASE("run-pipeline exits 4 when an object is aborted") {
  const fs::path in = dir("abort");
  fs::create_directories(in);
  SceneSpec spec;
  SceneObject bag;
  bag.corner_lip_height = 0.0;
  spec.objects = {bag};
  write_json_file(to_json(spec), in / "scene.json");
  CHECK(cli("run-pipeline -i " + in.string() + " --seed 1 --no-frames") == 4);
  CHECK(read_json_file(in / "report.json")["objects"][0]["outcome"] == "aborted");
}

TEST_CASE("bad config files exit with 2") {
  const fs::path in = dir("cfg");
  REQUIRE(cli("gen-scene --bags 1 --seed 3 -o " + in.string()) == 0);
  write_json_file({{"thresholds", {{"eps9", 1}}}}, in / "bad.json");
  CHECK(cli("plan-grasp -i " + in.string() + " --seed 1 --config " + (in / "bad.json").string()) == 2);
  CHECK(cli("plan-grasp -i " + in.string() + " --seed 1 --eps5 -3") == 2);
}

TEST_CASE("compare prints its summary") {
  std::string out;
  REQUIRE(cli("compare --scenes 2 --seed 1", &out) == 0);
  CHECK(out.find("filtered grasps") != std::string::npos);
}
