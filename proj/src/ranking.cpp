#include "parcelpick/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "parcelpick/errors.hpp"

namespace parcelpick {

void ScorerConfig::validate() const {
  if (w_antipodal < 0 || w_elevation < 0 || w_contrast < 0) throw ConfigError("scorer: weights must be >= 0");
  if (std::abs(w_antipodal + w_elevation + w_contrast - 1.0) > 1e-9) throw ConfigError("scorer: weights must sum to 1");
  if (!(elevation_saturation > 0)) throw ConfigError("scorer: elevation_saturation must be > 0");
}

AnalyticScorer::AnalyticScorer(ScorerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

GraspScore AnalyticScorer::score(const GraspCandidate& g, const RegionStats& s) const {
  return score_grasp(g, s, cfg_);
}

ScoreComponents score_components(const GraspCandidate& g, const RegionStats& s, double elevation_saturation) {
  const Vec2 axis = g.axis();
  ScoreComponents c;
  const double cos1 = std::abs(g.jaw1_normal.dot(axis));
  const double cos2 = std::abs(g.jaw2_normal.dot(axis));
  c.antipodality = std::clamp(0.5 * (cos1 + cos2), 0.0, 1.0);
  c.elevation = std::clamp((std::min(s.d1, s.d2) - s.d0) / elevation_saturation, 0.0, 1.0);
  const double range = std::max(0.0, s.d_max - s.d_min);
  c.contrast = range / (range + 0.05);
  return c;
}

GraspScore score_grasp(const GraspCandidate& g, const RegionStats& s, const ScorerConfig& cfg) {
  GraspScore out{g, 0.0, score_components(g, s, cfg.elevation_saturation)};
  out.score = cfg.w_antipodal * out.components.antipodality + cfg.w_elevation * out.components.elevation +
              cfg.w_contrast * out.components.contrast;
  out.score = std::clamp(out.score, 0.0, 1.0);
  return out;
}

bool ranks_before(const GraspScore& a, const GraspScore& b) {
  if (a.score != b.score) return a.score > b.score;
  const auto& x = a.candidate;
  const auto& y = b.candidate;
  return std::tie(x.center.v, x.center.u, x.axis_angle, x.jaw1, x.jaw2) <
         std::tie(y.center.v, y.center.u, y.axis_angle, y.jaw1, y.jaw2);
}

std::vector<GraspScore> rank_grasps(std::vector<GraspScore> scores) {
  std::sort(scores.begin(), scores.end(), ranks_before);
  return scores;
}

GraspScore select_best(const std::vector<GraspScore>& scores) {
  if (scores.empty()) throw NoGraspError("no grasp candidates to select from");
  return *std::min_element(scores.begin(), scores.end(), ranks_before);
}

}  // namespace parcelpick
