#pragma once

#include <memory>
#include <vector>

#include "parcelpick/grasp_filter.hpp"
#include "parcelpick/sampling.hpp"

namespace parcelpick {

struct ScoreComponents {
  double antipodality = 0;  // mean |cos| between jaw normals and the axis
  double elevation = 0;     // (min(d1, d2) - d0) / saturation, clamped
  double contrast = 0;      // r / (r + 0.05), r = d_max - d_min
};

struct GraspScore {
  GraspCandidate candidate;
  double score = 0;  // in [0, 1]
  ScoreComponents components;
};

struct ScorerConfig {
  double w_antipodal = 0.4;
  double w_elevation = 0.4;
  double w_contrast = 0.2;
  double elevation_saturation = 0.03;  // m

  void validate() const;
};

/// Pluggable ranking backend. Implementations must be pure.
class GraspScorer {
 public:
  virtual ~GraspScorer() = default;
  virtual GraspScore score(const GraspCandidate& g, const RegionStats& s) const = 0;
};

class AnalyticScorer final : public GraspScorer {
 public:
  explicit AnalyticScorer(ScorerConfig cfg = {});
  GraspScore score(const GraspCandidate& g, const RegionStats& s) const override;
  const ScorerConfig& config() const { return cfg_; }

 private:
  ScorerConfig cfg_;
};

ScoreComponents score_components(const GraspCandidate& g, const RegionStats& s, double elevation_saturation);
GraspScore score_grasp(const GraspCandidate& g, const RegionStats& s, const ScorerConfig& cfg);

/// Strict total order used for ranking: higher score first, then smaller
/// center row, smaller center column, smaller axis angle, then jaw pixels.
bool ranks_before(const GraspScore& a, const GraspScore& b);

/// Sorted copy, best first.
std::vector<GraspScore> rank_grasps(std::vector<GraspScore> scores);

/// Best grasp under ranks_before. Throws NoGraspError on an empty list.
GraspScore select_best(const std::vector<GraspScore>& scores);

}  // namespace parcelpick
