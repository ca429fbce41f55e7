#pragma once

#include <map>
#include <span>
#include <vector>

#include "vistrack/types.hpp"

namespace vistrack {

struct TrackerParams {
  double sim_threshold = 0.5;    // affinity gate for a match
  double init_score = 0.2;       // minimum score to start a new track
  int buffer_ttl = 10;           // frames a lost track stays matchable
  double embed_momentum = 0.8;   // weight kept on the stored embedding
  double iou_weight = 0.3;       // box IoU weight in the affinity mix
  bool require_same_category = false;
  bool optimal_assignment = false;  // Hungarian instead of greedy
};

struct TrackBufferEntry {
  Detection last;
  std::vector<double> embedding;  // EMA-smoothed appearance
  int frames_since_seen = 0;
};

/// Active and recently-lost tracks, keyed by track id. Entries older than
/// buffer_ttl are evicted after each associated frame.
struct TrackBuffer {
  std::map<int, TrackBufferEntry> tracks;
  int next_id = 1;
};

/// Cosine similarity in [-1,1]. Throws on dimension mismatch or a
/// zero-norm vector.
double embed_similarity(std::span<const double> a, std::span<const double> b);

struct FrameAssignment {
  int det_index = 0;
  int track_id = -1;  // -1 when the detection is dropped
  bool is_new = false;
};

/// Associates one frame's detections with the buffer, one-to-one. Matched
/// detections inherit the track id, unmatched ones above init_score start a
/// fresh track, the rest are dropped. The buffer is updated in place.
std::vector<FrameAssignment> associate_frame(TrackBuffer& buffer,
                                             const std::vector<Detection>& dets,
                                             const TrackerParams& p);

/// Runs association over a whole video, visiting frames in ascending
/// (forward) or descending (backward) order. `frames[i]` holds frame i's
/// detections regardless of direction.
TrackSet track_video(int video_id,
                     const std::vector<std::vector<Detection>>& frames,
                     const TrackerParams& p, TrackDirection direction);

}  // namespace vistrack
