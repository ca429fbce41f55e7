#pragma once

#include "vistrack/types.hpp"

namespace vistrack {

struct BiTrackParams {
  double thr = 0.5;          // mean box IoU over valid frames must exceed this
  int min_valid_frames = 1;  // minimum number of frames present in both
};

/// True when the two tracklets share at least min_valid_frames frames and
/// the mean box IoU over those frames exceeds thr.
bool is_overlap(const Tracklet& f, const Tracklet& b, const BiTrackParams& p);

/// Frame-wise union of two tracklets. On frames present in both, the
/// higher-score detection wins (ties keep the first argument's). The result
/// is tagged merged, rescored, and relabeled by voting.
Tracklet merge_tracklets(const Tracklet& f, const Tracklet& b);

/// Pairs up overlapping forward/backward tracklets and appends the
/// unmatched remainder of both sets. Candidates are visited in descending
/// track_score order and each forward tracklet merges at most once; output
/// ids are reassigned densely starting at 1.
TrackSet bitrack_merge(const TrackSet& forward, const TrackSet& backward,
                       const BiTrackParams& p);

}  // namespace vistrack
