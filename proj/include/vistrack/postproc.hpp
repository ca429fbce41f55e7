#pragma once

#include <vector>

#include "vistrack/types.hpp"

namespace vistrack {

/// Most frequent category among the tracklet's entries. Ties go to the
/// category with the higher summed score, then to the lower id.
int vote_label(const Tracklet& t);

/// Folds the predicted mask quality into the classification score:
/// score *= mask_score when a mask score is present.
Detection calibrate_score(Detection d);

/// Detections of tracklets with at least min_len entries, the "trackable"
/// subset used as detection pseudo labels.
std::vector<Detection> filter_trackable(const TrackSet& tracks, int min_len);

}  // namespace vistrack
