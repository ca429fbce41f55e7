#pragma once

#include <random>
#include <vector>

#include "vistrack/io.hpp"
#include "vistrack/mask_ops.hpp"
#include "vistrack/types.hpp"
#include "vistrack/vis_eval.hpp"

namespace vistrack::testing {

using Rng = std::mt19937;

BinaryMask random_mask(Rng& rng, int height, int width, double density = 0.4);

/// Filled-rectangle mask from integer corner coordinates.
BinaryMask rect_mask(int height, int width, int x1, int y1, int x2, int y2);

std::vector<double> one_hot(std::size_t dim, std::size_t index);

/// Micro ground truth: up to 3 videos of 4x4 frames with boxed+masked
/// instances, built to exercise nulls, gaps, and score ties downstream.
GroundTruthDataset random_micro_gt(Rng& rng, int max_videos = 3,
                                   int max_frames = 5, int max_instances = 4,
                                   int categories = 2);

/// Random predictions against the given ground truth: GT copies, degraded
/// copies, and noise, with scores drawn from a coarse grid so ties occur.
std::vector<ResultTrack> random_predictions(Rng& rng,
                                            const GroundTruthDataset& gt);

/// Perfect detections straight from the ground truth, one-hot embedding per
/// instance, one record per annotated frame.
std::vector<io::DetectionRecord> gt_as_detections(const GroundTruthDataset& gt,
                                                  double score = 0.9);

/// Random tracklet pairs for merge testing: both directions observe the
/// same underlying objects with per-frame jitter and random frame subsets.
void random_bitrack_fixture(Rng& rng, TrackSet& forward, TrackSet& backward,
                            int max_tracklets = 6, int frames = 12);

/// One sliding object per video, one category per video, masks everywhere.
GroundTruthDataset sliding_gt(int n_videos, int length = 4);

/// Two objects in one video, each detected in every frame but confident in
/// opposite halves, so each tracking direction truncates a different one.
std::vector<io::DetectionRecord> compensation_fixture(int length = 8);

}  // namespace vistrack::testing
