#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vistrack {

/// Axis-aligned box in continuous image coordinates, origin top-left.
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool valid() const;

  bool operator==(const BoundingBox&) const = default;
};

/// Run-length encoded binary mask. Runs are column-major and the first run
/// counts background pixels; a leading zero run means the mask starts set.
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> runs;

  std::int64_t pixel_count() const { return std::int64_t(height) * width; }
  /// Number of set pixels.
  std::int64_t area() const;
  bool empty_mask() const { return area() == 0; }

  bool operator==(const RleMask&) const = default;
};

enum class TrackDirection { forward, backward, merged };

std::string_view to_string(TrackDirection d);
TrackDirection direction_from_string(std::string_view s);

/// One object hypothesis in one frame.
struct Detection {
  int frame_index = 0;
  BoundingBox box;
  double score = 0.0;
  int category_id = 0;
  std::optional<RleMask> mask;
  std::optional<double> mask_score;
  std::vector<double> embedding;  // empty when the detector provides none

  bool has_embedding() const { return !embedding.empty(); }

  bool operator==(const Detection&) const = default;
};

/// One identity within a video: ordered frame -> detection map plus
/// aggregate score and label.
struct Tracklet {
  int track_id = 0;
  std::map<int, Detection> entries;
  TrackDirection direction = TrackDirection::forward;
  double track_score = 0.0;
  int track_category = 0;

  int size() const { return int(entries.size()); }
  int first_frame() const { return entries.begin()->first; }
  int last_frame() const { return entries.rbegin()->first; }

  bool operator==(const Tracklet&) const = default;
};

/// All tracklets of one video produced by one association pass.
struct TrackSet {
  int video_id = 0;
  int video_length = 0;
  std::vector<Tracklet> tracklets;

  bool operator==(const TrackSet&) const = default;
};

struct VideoInfo {
  int id = 0;
  int width = 0;
  int height = 0;
  int length = 0;
  std::vector<std::string> file_names;

  bool operator==(const VideoInfo&) const = default;
};

struct CategoryInfo {
  int id = 0;
  std::string name;

  bool operator==(const CategoryInfo&) const = default;
};

/// One annotated instance: a category plus per-frame masks/boxes, each list
/// aligned with the owning video's frames (null = not present in that frame).
struct GtInstance {
  int id = 0;
  int video_id = 0;
  int category_id = 0;
  std::vector<std::optional<RleMask>> segmentations;
  std::vector<std::optional<BoundingBox>> bboxes;

  bool operator==(const GtInstance&) const = default;
};

struct GroundTruthDataset {
  std::vector<VideoInfo> videos;
  std::vector<CategoryInfo> categories;
  std::vector<GtInstance> instances;

  const VideoInfo* find_video(int id) const;
  const CategoryInfo* find_category(int id) const;

  bool operator==(const GroundTruthDataset&) const = default;
};

/// A broken dataset invariant. Violations are data, not faults: validation
/// never throws, it reports.
struct Violation {
  std::string entity;  // e.g. "annotation 7", "video 2"
  std::string rule;

  std::string message() const { return entity + ": " + rule; }
};

std::vector<Violation> validate_dataset(const GroundTruthDataset& ds);

}  // namespace vistrack
