#pragma once

#include <optional>
#include <vector>

#include "vistrack/types.hpp"

namespace vistrack {

/// One predicted instance track of a video, the unit the metrics consume.
struct ResultTrack {
  int video_id = 0;
  int category_id = 0;
  double score = 0.0;
  std::vector<std::optional<RleMask>> segmentations;  // per frame, null = absent

  bool operator==(const ResultTrack&) const = default;
};

struct EvalConfig {
  std::vector<double> iou_thresholds;  // strictly increasing, in (0,1)
  std::vector<int> max_dets;           // per-video prediction caps
  std::optional<std::vector<int>> categories;  // restrict evaluation

  static EvalConfig defaults();
};

struct CategoryAp {
  int category_id = 0;
  double ap = 0.0;  // mean over thresholds
};

struct EvalResult {
  double map = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  double ar1 = 0.0;
  double ar10 = 0.0;
  std::vector<CategoryAp> per_category;
  std::vector<std::pair<int, double>> ar_by_max_dets;
};

/// Spatio-temporal IoU: summed per-frame intersections over summed unions.
/// Absent masks count as empty; 0 when both sums are 0.
double st_iou(const std::vector<std::optional<RleMask>>& pred,
              const std::vector<std::optional<RleMask>>& gt);

/// Challenge metric suite. Per category and threshold, predictions are
/// matched greedily in descending score order (input order on ties) to the
/// unmatched same-video same-category instance with the highest st_iou at or
/// above the threshold; AP integrates the PR curve with 101-point
/// interpolation, AR@k caps predictions at the k highest-score per video.
/// Categories without ground-truth instances are excluded from the means.
EvalResult evaluate(const std::vector<ResultTrack>& predictions,
                    const GroundTruthDataset& gt, const EvalConfig& cfg);

}  // namespace vistrack
