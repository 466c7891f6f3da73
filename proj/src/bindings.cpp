// Python extension. Structured values cross the boundary as JSON text in the
// same formats the CLI writes; images cross as numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "parcelpick/errors.hpp"
#include "parcelpick/json_io.hpp"
#include "parcelpick/pipeline.hpp"
#include "parcelpick/random.hpp"

namespace py = pybind11;
using namespace parcelpick;

namespace {

using ColorArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using DepthArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

ColorImage color_from(const ColorArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw ConfigError("color must have shape (height, width, 3)");
  const auto* p = a.data();
  return ColorImage(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                    std::vector<std::uint8_t>(p, p + a.size()));
}

DepthImage depth_from(const DepthArray& a) {
  if (a.ndim() != 2) throw ConfigError("depth must have shape (height, width)");
  const auto* p = a.data();
  return DepthImage(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), std::vector<double>(p, p + a.size()));
}

ColorArray to_array(const ColorImage& img) {
  ColorArray a({img.height(), img.width(), 3});
  std::memcpy(a.mutable_data(), img.data().data(), img.data().size());
  return a;
}

DepthArray to_array(const DepthImage& img) {
  DepthArray a({img.height(), img.width()});
  std::memcpy(a.mutable_data(), img.data().data(), img.data().size_bytes());
  return a;
}

PipelineConfig config_from(const std::string& text) {
  PipelineConfig cfg;
  if (!text.empty()) apply_config(Json::parse(text), cfg);
  return cfg;
}

RgbF rgb_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

RegionStats stats_from(const Json& j) {
  RegionStats s;
  s.d0 = j.at("d0");
  s.d1 = j.at("d1");
  s.d2 = j.at("d2");
  s.mu_d = j.at("mu_d");
  s.sigma_d = j.at("sigma_d");
  s.d_max = j.at("d_max");
  s.d_min = j.at("d_min");
  s.sigma_c = j.at("sigma_c");
  s.c1 = rgb_from(j.at("c1"));
  s.c2 = rgb_from(j.at("c2"));
  return s;
}

std::string random_scene_json(int bags, int envelopes, std::uint64_t seed, double noise_sigma) {
  SceneSpec spec;
  spec.render.noise_sigma = noise_sigma;
  spec.render.noise_seed = derive_seed(seed, 1);
  spec.objects = random_scene(bags, envelopes, seed, spec.camera);
  return to_json(spec).dump();
}

py::tuple render_scene_json(const std::string& scene) {
  const SceneSpec spec = scene_spec_from_json(Json::parse(scene));
  const RenderedScene r = render_scene(spec.objects, spec.camera, spec.render);
  return py::make_tuple(to_array(r.color), to_array(r.depth), to_json(r.truth).dump());
}

std::string plan_grasps_json(const ColorArray& color, const DepthArray& depth, const std::string& camera,
                             const std::string& config, std::uint64_t seed) {
  PipelineConfig cfg = config_from(config);
  cfg.grasp.sampler.rng_seed = seed;
  const CameraIntrinsics k = intrinsics_from_json(Json::parse(camera));
  Json j;
  {
    py::gil_scoped_release release;
    const GraspPlanResult res = plan_grasps(color_from(color), inpaint_invalid(depth_from(depth)), k, cfg.grasp);
    j = grasp_plan_to_json(res, cfg.grasp);
  }
  j["seed"] = seed;
  return j.dump();
}

std::string plan_suction_json(const DepthArray& depth, const std::string& camera, std::array<int, 4> bbox,
                              const std::string& config, std::uint64_t seed) {
  PipelineConfig cfg = config_from(config);
  cfg.suction.rng_seed = seed;
  const BoundingBox box{{bbox[0], bbox[1]}, {bbox[2], bbox[3]}};
  return to_json(sample_suction(inpaint_invalid(depth_from(depth)), intrinsics_from_json(Json::parse(camera)), box,
                                cfg.suction))
      .dump();
}

std::string detect_json(const ColorArray& color, const DepthArray& depth, const std::string& config) {
  const PipelineConfig cfg = config_from(config);
  return detections_to_json(detect_packages(color_from(color), depth_from(depth), cfg.detector)).dump();
}

std::string run_pipeline_json(const std::string& scene, const std::string& config, std::uint64_t seed) {
  const SceneSpec spec = scene_spec_from_json(Json::parse(scene));
  PipelineConfig cfg;
  cfg.render = spec.render;
  if (!config.empty()) apply_config(Json::parse(config), cfg);
  cfg.seed = seed;
  Json j;
  {
    py::gil_scoped_release release;
    j = to_json(run_pipeline(spec.objects, spec.camera, cfg));
  }
  j["seed"] = seed;
  return j.dump();
}

std::string passes_filter_json(const std::string& stats, const std::string& config) {
  const PipelineConfig cfg = config_from(config);
  return to_json(passes_filter(stats_from(Json::parse(stats)), cfg.grasp.thresholds)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parcel picking perception and pipeline simulation";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NoGraspError>(m, "NoGraspError", base.ptr());
  py::register_exception<NoSuctionError>(m, "NoSuctionError", base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
  py::register_exception<FrustumError>(m, "FrustumError", base.ptr());
  py::register_exception<PlacementError>(m, "PlacementError", base.ptr());
  py::register_exception<BehindCameraError>(m, "BehindCameraError", base.ptr());
  py::register_exception<InvalidDepthError>(m, "InvalidDepthError", base.ptr());
  py::register_exception<OutOfBoundsError>(m, "OutOfBoundsError", base.ptr());

  m.def("random_scene", &random_scene_json, py::arg("bags"), py::arg("envelopes"), py::arg("seed"),
        py::arg("noise_sigma") = 0.0015);
  m.def("render_scene", &render_scene_json, py::arg("scene"));
  m.def("plan_grasps", &plan_grasps_json, py::arg("color"), py::arg("depth"), py::arg("camera"), py::arg("config"),
        py::arg("seed"));
  m.def("plan_suction", &plan_suction_json, py::arg("depth"), py::arg("camera"), py::arg("bbox"), py::arg("config"),
        py::arg("seed"));
  m.def("detect", &detect_json, py::arg("color"), py::arg("depth"), py::arg("config"));
  m.def("run_pipeline", &run_pipeline_json, py::arg("scene"), py::arg("config"), py::arg("seed"));
  m.def("passes_filter", &passes_filter_json, py::arg("stats"), py::arg("config"));
  m.def("default_config", [] { return to_json(PipelineConfig{}).dump(); });
  m.def("deproject", [](double u, double v, double d, const std::string& camera) {
    const Point3 p = deproject(u, v, d, intrinsics_from_json(Json::parse(camera)));
    return std::array<double, 3>{p.x, p.y, p.z};
  });
  m.def("project", [](std::array<double, 3> p, const std::string& camera) {
    const PixelCoord c = project(Point3{p[0], p[1], p[2]}, intrinsics_from_json(Json::parse(camera)));
    return std::array<double, 2>{c.u, c.v};
  });
}
