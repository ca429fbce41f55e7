#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vistrack/types.hpp"

namespace vistrack {

/// Flip -> rotate -> shift, applied in that order. Rotation is in degrees
/// about the image center; the flip is horizontal.
struct AffineParams {
  double shift_x = 0.0;
  double shift_y = 0.0;
  double rotation_deg = 0.0;
  bool hflip = false;
};

struct Histogram {
  std::vector<double> edges;         // bins + 1 uniform edges over [0,1]
  std::vector<std::int64_t> counts;  // one per bin, top bin right-inclusive

  std::int64_t total() const;
};

enum class IouAggregation {
  video_average,  // one histogram entry per video: mean over all adjacent pairs
  per_object,     // one entry per instance: mean over its adjacent pairs
};

/// Adjacent-frame box IoU distribution: for every instance, the IoU between
/// its boxes in consecutive frames where both exist, aggregated per video
/// (default) or per object.
Histogram adjacent_iou_histogram(
    const GroundTruthDataset& gt, int bins,
    IouAggregation mode = IouAggregation::video_average);

/// The k frame indices kept when subsampling a video of the given length:
/// round(j*(L-1)/(k-1)); k = 1 keeps the middle frame; k >= L keeps all.
std::vector<int> subsample_indices(int video_length, int k);

/// Restricts every video and its annotations to the subsampled frames.
GroundTruthDataset subsample_frames(const GroundTruthDataset& gt,
                                    int frames_per_video);

struct ObjectAnnotation {
  int category_id = 0;
  BoundingBox box;
  std::optional<RleMask> mask;

  bool operator==(const ObjectAnnotation&) const = default;
};

/// Key-frame object and its transformed copy sharing one track id.
struct PairedObject {
  int track_id = 0;
  ObjectAnnotation key;
  ObjectAnnotation reference;
};

/// Builds a pseudo tracking pair from one frame's annotations: each object
/// is paired with its affine-transformed copy under a fresh shared track id.
/// Masks are resampled nearest-neighbor; the transformed box is the tight
/// bound of the transformed mask when one exists, else the transformed box
/// corners, clipped to the image. Objects whose transformed area falls below
/// one pixel are dropped from both sides.
std::vector<PairedObject> synth_pair(const std::vector<ObjectAnnotation>& objects,
                                     const AffineParams& params,
                                     int image_width, int image_height,
                                     int first_track_id = 1);

}  // namespace vistrack
