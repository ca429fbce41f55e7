#pragma once

#include <vector>

#include "vistrack/types.hpp"

namespace vistrack {

struct EnsembleParams {
  double cluster_iou = 0.6;        // IoU gate for joining a cluster
  bool same_category_only = true;  // restrict clusters to one category
  double mask_bin_threshold = 0.5; // binarization for averaged masks
};

/// One fused detection plus the pooled detections that produced it.
struct DetectionCluster {
  Detection fused;
  std::vector<Detection> members;
};

/// Greedy box clustering over the pooled per-model detections of one frame.
/// Detections are visited in descending score order; each joins the first
/// cluster whose running score-weighted mean box overlaps it above
/// cluster_iou, else seeds a new cluster. The fused box is the score-weighted
/// mean, the fused score the max of the members, and the category comes from
/// the highest-score member.
std::vector<DetectionCluster> greedy_ensemble_clusters(
    const std::vector<std::vector<Detection>>& per_model,
    const EnsembleParams& p);

std::vector<Detection> greedy_ensemble_boxes(
    const std::vector<std::vector<Detection>>& per_model,
    const EnsembleParams& p);

/// Replaces the proposal's mask with the thresholded per-pixel mean of the
/// given masks and its embedding with the arithmetic mean of the given
/// embeddings. Box, score, and category are untouched. Empty lists leave the
/// corresponding field unchanged.
Detection ensemble_masks_embeddings(Detection proposal,
                                    const std::vector<RleMask>& masks,
                                    const std::vector<std::vector<double>>& embeddings,
                                    const EnsembleParams& p);

/// Convenience used by the CLI: fuses a cluster's member masks and
/// embeddings into the fused detection.
Detection fuse_cluster_attachments(const DetectionCluster& cluster,
                                   const EnsembleParams& p);

}  // namespace vistrack
