#include "parcelpick/study.hpp"

#include "parcelpick/random.hpp"

namespace parcelpick {

std::uint64_t scene_seed(std::uint64_t seed, int i) { return derive_seed(seed, static_cast<std::uint64_t>(i)); }

FilterComparison compare_filter(const StudyOptions& opts) {
  FilterComparison out;
  RandomSceneOptions ropts;
  ropts.table_depth = opts.render.table_depth;
  for (int i = 0; i < opts.scenes; ++i) {
    SceneStudy st;
    st.scene_seed = scene_seed(opts.seed, i);
    const auto objects = random_scene(opts.bags_per_scene, 0, st.scene_seed, opts.camera, ropts);
    RenderOptions render = opts.render;
    render.noise_seed = derive_seed(st.scene_seed, 1);
    const RenderedScene scene = render_scene(objects, opts.camera, render);

    GraspPlanningConfig cfg = opts.grasp;
    cfg.sampler.rng_seed = derive_seed(st.scene_seed, 2);
    cfg.use_filter = true;
    const GraspPlanResult filtered = plan_grasps(scene.color, scene.depth, opts.camera, cfg);
    st.candidates = filtered.candidates.size();
    for (const GraspCandidate& g : filtered.filter.kept) {
      ++st.filtered;
      if (scene.truth.in_corner_region(g.center.u, g.center.v)) ++st.filtered_in_corner;
      if (scene.truth.in_lump(g.center.u, g.center.v)) ++st.filtered_on_lump;
    }

    cfg.use_filter = false;
    const GraspPlanResult raw = plan_grasps(scene.color, scene.depth, opts.camera, cfg);
    for (std::size_t r = 0; r < raw.ranked.size() && static_cast<int>(r) < opts.top_k; ++r) {
      const Pixel c = raw.ranked[r].candidate.center;
      ++st.raw_top;
      if (scene.truth.in_lump(c.u, c.v)) ++st.raw_top_on_lump;
    }

    out.filtered += st.filtered;
    out.filtered_in_corner += st.filtered_in_corner;
    out.filtered_on_lump += st.filtered_on_lump;
    out.raw_top += st.raw_top;
    out.raw_top_on_lump += st.raw_top_on_lump;
    out.scenes.push_back(st);
  }
  return out;
}

}  // namespace parcelpick
