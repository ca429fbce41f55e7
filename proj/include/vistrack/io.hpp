#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vistrack/types.hpp"
#include "vistrack/vis_eval.hpp"

namespace vistrack::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(line > 0
                               ? source + ":" + std::to_string(line) + ": " + what
                               : source + ": " + what) {}
};

/// One line of a detections file: the detection plus where it came from.
struct DetectionRecord {
  int video_id = 0;
  Detection det;
  int line = 0;

  bool operator==(const DetectionRecord&) const = default;
};

// JSON converters for the core types. RLE masks serialize as
// {"size":[h,w],"counts":[ints]}, boxes as [x1,y1,x2,y2] except in ground
// truth files, which store [x,y,w,h].
nlohmann::json rle_to_json(const RleMask& m);
RleMask rle_from_json(const nlohmann::json& j);
nlohmann::json detection_to_json(const DetectionRecord& r);
DetectionRecord detection_from_json(const nlohmann::json& j, int line = 0);

// Detections: JSON lines, one record per line.
std::vector<DetectionRecord> parse_detections(const std::string& path);
std::vector<DetectionRecord> parse_detections(std::istream& in,
                                              const std::string& source);
void write_detections(const std::string& path,
                      const std::vector<DetectionRecord>& records);
/// Pseudo-label export: boxes, labels, and scores only.
void write_detections_boxes_only(const std::string& path,
                                 const std::vector<DetectionRecord>& records);

// Ground truth: one JSON object with videos[], annotations[], categories[].
GroundTruthDataset parse_gt(const std::string& path);
GroundTruthDataset gt_from_json(const nlohmann::json& j,
                                const std::string& source);
nlohmann::json gt_to_json(const GroundTruthDataset& ds);
void write_gt(const std::string& path, const GroundTruthDataset& ds);

// Results: JSON array of per-track records.
std::vector<ResultTrack> parse_results(const std::string& path);
nlohmann::json results_to_json(const std::vector<ResultTrack>& results);
void write_results(const std::string& path,
                   const std::vector<ResultTrack>& results);

// Track sets: JSON array, one entry per video.
std::vector<TrackSet> parse_tracksets(const std::string& path);
nlohmann::json tracksets_to_json(const std::vector<TrackSet>& sets);
void write_tracksets(const std::string& path, const std::vector<TrackSet>& sets);

nlohmann::json eval_result_to_json(const EvalResult& r);
std::string format_eval_report(const EvalResult& r);

void write_histogram_csv(const std::string& path,
                         const std::vector<double>& edges,
                         const std::vector<std::int64_t>& counts);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Groups detection records into per-video frame lists. Video length comes
/// from the lengths map when present, else from the highest frame index.
std::map<int, std::vector<std::vector<Detection>>> group_by_video(
    const std::vector<DetectionRecord>& records,
    const std::map<int, int>& video_lengths = {});

}  // namespace vistrack::io
