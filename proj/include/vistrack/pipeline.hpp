#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vistrack/config.hpp"
#include "vistrack/io.hpp"
#include "vistrack/types.hpp"
#include "vistrack/vis_eval.hpp"

namespace vistrack {

/// One model's (or one test scale's) detections. Coordinates and masks are
/// `scale` times native resolution and get normalized at ingestion.
struct ScaledDetections {
  std::vector<io::DetectionRecord> records;
  double scale = 1.0;
};

/// Native (height, width) per video, preferring ground truth, then the
/// masks of scale-1 inputs.
std::map<int, std::pair<int, int>> native_dims_from(
    const std::optional<GroundTruthDataset>& gt,
    const std::vector<ScaledDetections>& models);

/// Divides boxes by the scale and resamples masks to native resolution.
std::vector<io::DetectionRecord> rescale_detections(
    const ScaledDetections& input,
    const std::map<int, std::pair<int, int>>& native_dims);

/// Greedy per-frame ensemble across models, with mask/embedding averaging
/// per cluster. Output is ordered by (video, frame, cluster).
std::vector<io::DetectionRecord> ensemble_models(
    const std::vector<std::vector<io::DetectionRecord>>& per_model,
    const EnsembleParams& params, int workers);

/// Tracks every video in the records, in parallel, in id order.
std::vector<TrackSet> run_track(const std::vector<io::DetectionRecord>& records,
                                const TrackerParams& params,
                                TrackDirection direction,
                                const std::map<int, int>& video_lengths,
                                int workers);

/// Track-level refinement: vote the label, calibrate entry scores with the
/// mask score, then recompute the track score as the entry mean.
void refine_tracks(TrackSet& set);

std::vector<ResultTrack> tracksets_to_results(const std::vector<TrackSet>& sets);

struct PipelineRun {
  std::vector<TrackSet> merged;
  std::vector<ResultTrack> results;
  std::optional<EvalResult> metrics;
};

/// Full post-detector pipeline: (optional) multi-model ensemble, forward and
/// backward tracking, bidirectional merge, label voting, score calibration,
/// and evaluation when ground truth is given. Deterministic for any worker
/// count. Stage failures are rethrown with the stage name.
PipelineRun run_pipeline(const std::vector<ScaledDetections>& models,
                         const std::optional<GroundTruthDataset>& gt,
                         const PipelineConfig& cfg);

}  // namespace vistrack
