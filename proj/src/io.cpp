#include "vistrack/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "vistrack/mask_ops.hpp"

namespace vistrack::io {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end())
    throw std::invalid_argument(what + ": missing field '" + key + "'");
  return *it;
}

BoundingBox box_from_xyxy(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw std::invalid_argument("bbox must be [x1,y1,x2,y2]");
  BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                j[3].get<double>()};
  if (!b.valid()) throw std::invalid_argument("invalid bbox (x1<=x2, y1<=y2, finite)");
  return b;
}

json box_to_xyxy(const BoundingBox& b) {
  return json::array({b.x1, b.y1, b.x2, b.y2});
}

BoundingBox box_from_xywh(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw std::invalid_argument("bbox must be [x,y,w,h]");
  double x = j[0].get<double>(), y = j[1].get<double>();
  double w = j[2].get<double>(), h = j[3].get<double>();
  BoundingBox b{x, y, x + w, y + h};
  if (!b.valid()) throw std::invalid_argument("invalid bbox (w,h >= 0, finite)");
  return b;
}

json box_to_xywh(const BoundingBox& b) {
  return json::array({b.x1, b.y1, b.width(), b.height()});
}

double score_in_unit_range(const json& j, const char* what) {
  double s = j.get<double>();
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument(std::string(what) + " " + std::to_string(s) +
                                " outside [0,1]");
  return s;
}

}  // namespace

json rle_to_json(const RleMask& m) {
  return {{"size", {m.height, m.width}}, {"counts", m.runs}};
}

RleMask rle_from_json(const json& j) {
  const auto& size = require(j, "size", "RLE");
  if (!size.is_array() || size.size() != 2)
    throw std::invalid_argument("RLE size must be [height,width]");
  const auto& counts = require(j, "counts", "RLE");
  if (!counts.is_array()) throw std::invalid_argument("RLE counts must be an array");
  std::vector<std::uint32_t> runs;
  runs.reserve(counts.size());
  for (const auto& c : counts) {
    auto v = c.get<std::int64_t>();
    if (v < 0) throw std::invalid_argument("negative RLE run");
    runs.push_back(std::uint32_t(v));
  }
  return rle_from_counts(size[0].get<int>(), size[1].get<int>(), runs);
}

json detection_to_json(const DetectionRecord& r) {
  json j;
  j["video_id"] = r.video_id;
  j["frame"] = r.det.frame_index;
  j["bbox"] = box_to_xyxy(r.det.box);
  j["score"] = r.det.score;
  j["category_id"] = r.det.category_id;
  j["mask"] = r.det.mask ? rle_to_json(*r.det.mask) : json(nullptr);
  j["mask_score"] = r.det.mask_score ? json(*r.det.mask_score) : json(nullptr);
  if (r.det.has_embedding()) j["embedding"] = r.det.embedding;
  return j;
}

DetectionRecord detection_from_json(const json& j, int line) {
  DetectionRecord r;
  r.line = line;
  r.video_id = require(j, "video_id", "detection").get<int>();
  r.det.frame_index = require(j, "frame", "detection").get<int>();
  if (r.det.frame_index < 0)
    throw std::invalid_argument("negative frame index");
  r.det.box = box_from_xyxy(require(j, "bbox", "detection"));
  r.det.score = score_in_unit_range(require(j, "score", "detection"), "score");
  r.det.category_id = require(j, "category_id", "detection").get<int>();
  if (r.det.category_id < 1)
    throw std::invalid_argument("category_id must be positive");
  if (j.contains("mask") && !j["mask"].is_null())
    r.det.mask = rle_from_json(j["mask"]);
  if (j.contains("mask_score") && !j["mask_score"].is_null())
    r.det.mask_score = score_in_unit_range(j["mask_score"], "mask_score");
  if (j.contains("embedding") && !j["embedding"].is_null())
    r.det.embedding = j["embedding"].get<std::vector<double>>();
  return r;
}

std::vector<DetectionRecord> parse_detections(std::istream& in,
                                              const std::string& source) {
  std::vector<DetectionRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      records.push_back(detection_from_json(json::parse(line), lineno));
    } catch (const std::exception& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return records;
}

std::vector<DetectionRecord> parse_detections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_detections(in, path);
}

void write_detections(const std::string& path,
                      const std::vector<DetectionRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) out << detection_to_json(r).dump() << "\n";
  write_file(path, out.str());
}

void write_detections_boxes_only(const std::string& path,
                                 const std::vector<DetectionRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    json j;
    j["video_id"] = r.video_id;
    j["frame"] = r.det.frame_index;
    j["bbox"] = box_to_xyxy(r.det.box);
    j["score"] = r.det.score;
    j["category_id"] = r.det.category_id;
    j["mask"] = nullptr;
    j["mask_score"] = nullptr;
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

GroundTruthDataset gt_from_json(const json& j, const std::string& source) {
  try {
    GroundTruthDataset ds;
    for (const auto& vj : require(j, "videos", "ground truth")) {
      VideoInfo v;
      v.id = require(vj, "id", "video").get<int>();
      v.width = require(vj, "width", "video").get<int>();
      v.height = require(vj, "height", "video").get<int>();
      v.length = require(vj, "length", "video").get<int>();
      if (vj.contains("file_names"))
        v.file_names = vj["file_names"].get<std::vector<std::string>>();
      ds.videos.push_back(std::move(v));
    }
    for (const auto& cj : require(j, "categories", "ground truth")) {
      CategoryInfo c;
      c.id = require(cj, "id", "category").get<int>();
      c.name = require(cj, "name", "category").get<std::string>();
      ds.categories.push_back(std::move(c));
    }
    for (const auto& aj : require(j, "annotations", "ground truth")) {
      GtInstance inst;
      inst.id = require(aj, "id", "annotation").get<int>();
      inst.video_id = require(aj, "video_id", "annotation").get<int>();
      inst.category_id = require(aj, "category_id", "annotation").get<int>();
      for (const auto& sj : require(aj, "segmentations", "annotation")) {
        if (sj.is_null())
          inst.segmentations.push_back(std::nullopt);
        else
          inst.segmentations.push_back(rle_from_json(sj));
      }
      for (const auto& bj : require(aj, "bboxes", "annotation")) {
        if (bj.is_null())
          inst.bboxes.push_back(std::nullopt);
        else
          inst.bboxes.push_back(box_from_xywh(bj));
      }
      ds.instances.push_back(std::move(inst));
    }
    return ds;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(source, 0, e.what());
  }
}

GroundTruthDataset parse_gt(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const std::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  return gt_from_json(j, path);
}

json gt_to_json(const GroundTruthDataset& ds) {
  json j;
  j["videos"] = json::array();
  for (const auto& v : ds.videos) {
    json vj{{"id", v.id}, {"width", v.width}, {"height", v.height},
            {"length", v.length}};
    if (!v.file_names.empty()) vj["file_names"] = v.file_names;
    j["videos"].push_back(std::move(vj));
  }
  j["categories"] = json::array();
  for (const auto& c : ds.categories)
    j["categories"].push_back({{"id", c.id}, {"name", c.name}});
  j["annotations"] = json::array();
  for (const auto& inst : ds.instances) {
    json aj{{"id", inst.id},
            {"video_id", inst.video_id},
            {"category_id", inst.category_id}};
    aj["segmentations"] = json::array();
    for (const auto& seg : inst.segmentations)
      aj["segmentations"].push_back(seg ? rle_to_json(*seg) : json(nullptr));
    aj["bboxes"] = json::array();
    for (const auto& box : inst.bboxes)
      aj["bboxes"].push_back(box ? box_to_xywh(*box) : json(nullptr));
    j["annotations"].push_back(std::move(aj));
  }
  return j;
}

void write_gt(const std::string& path, const GroundTruthDataset& ds) {
  write_file(path, gt_to_json(ds).dump(2) + "\n");
}

std::vector<ResultTrack> parse_results(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
    if (!j.is_array()) throw std::invalid_argument("results file must be a JSON array");
    std::vector<ResultTrack> out;
    for (const auto& rj : j) {
      ResultTrack r;
      r.video_id = require(rj, "video_id", "result").get<int>();
      r.category_id = require(rj, "category_id", "result").get<int>();
      r.score = score_in_unit_range(require(rj, "score", "result"), "score");
      for (const auto& sj : require(rj, "segmentations", "result")) {
        if (sj.is_null())
          r.segmentations.push_back(std::nullopt);
        else
          r.segmentations.push_back(rle_from_json(sj));
      }
      out.push_back(std::move(r));
    }
    return out;
  } catch (const std::exception& e) {
    throw ParseError(path, 0, e.what());
  }
}

json results_to_json(const std::vector<ResultTrack>& results) {
  json j = json::array();
  for (const auto& r : results) {
    json rj{{"video_id", r.video_id},
            {"category_id", r.category_id},
            {"score", r.score}};
    rj["segmentations"] = json::array();
    for (const auto& seg : r.segmentations)
      rj["segmentations"].push_back(seg ? rle_to_json(*seg) : json(nullptr));
    j.push_back(std::move(rj));
  }
  return j;
}

void write_results(const std::string& path,
                   const std::vector<ResultTrack>& results) {
  write_file(path, results_to_json(results).dump(2) + "\n");
}

namespace {

json tracklet_to_json(const Tracklet& t) {
  json tj{{"track_id", t.track_id},
          {"direction", std::string(to_string(t.direction))},
          {"track_score", t.track_score},
          {"track_category", t.track_category}};
  tj["entries"] = json::array();
  for (const auto& [frame, det] : t.entries) {
    json ej;
    ej["frame"] = frame;
    ej["bbox"] = box_to_xyxy(det.box);
    ej["score"] = det.score;
    ej["category_id"] = det.category_id;
    ej["mask"] = det.mask ? rle_to_json(*det.mask) : json(nullptr);
    ej["mask_score"] = det.mask_score ? json(*det.mask_score) : json(nullptr);
    if (det.has_embedding()) ej["embedding"] = det.embedding;
    tj["entries"].push_back(std::move(ej));
  }
  return tj;
}

Tracklet tracklet_from_json(const json& tj) {
  Tracklet t;
  t.track_id = require(tj, "track_id", "tracklet").get<int>();
  t.direction = direction_from_string(
      require(tj, "direction", "tracklet").get<std::string>());
  t.track_score = score_in_unit_range(require(tj, "track_score", "tracklet"),
                                      "track_score");
  t.track_category = require(tj, "track_category", "tracklet").get<int>();
  for (const auto& ej : require(tj, "entries", "tracklet")) {
    Detection det;
    int frame = require(ej, "frame", "entry").get<int>();
    det.frame_index = frame;
    det.box = box_from_xyxy(require(ej, "bbox", "entry"));
    det.score = score_in_unit_range(require(ej, "score", "entry"), "score");
    det.category_id = require(ej, "category_id", "entry").get<int>();
    if (ej.contains("mask") && !ej["mask"].is_null())
      det.mask = rle_from_json(ej["mask"]);
    if (ej.contains("mask_score") && !ej["mask_score"].is_null())
      det.mask_score = score_in_unit_range(ej["mask_score"], "mask_score");
    if (ej.contains("embedding") && !ej["embedding"].is_null())
      det.embedding = ej["embedding"].get<std::vector<double>>();
    if (t.entries.count(frame))
      throw std::invalid_argument("tracklet has two entries for frame " +
                                  std::to_string(frame));
    t.entries[frame] = std::move(det);
  }
  if (t.entries.empty()) throw std::invalid_argument("tracklet without entries");
  return t;
}

}  // namespace

std::vector<TrackSet> parse_tracksets(const std::string& path) {
  try {
    json j = json::parse(read_file(path));
    if (!j.is_array())
      throw std::invalid_argument("trackset file must be a JSON array");
    std::vector<TrackSet> out;
    for (const auto& sj : j) {
      TrackSet set;
      set.video_id = require(sj, "video_id", "trackset").get<int>();
      set.video_length = require(sj, "video_length", "trackset").get<int>();
      for (const auto& tj : require(sj, "tracklets", "trackset"))
        set.tracklets.push_back(tracklet_from_json(tj));
      out.push_back(std::move(set));
    }
    return out;
  } catch (const std::exception& e) {
    throw ParseError(path, 0, e.what());
  }
}

json tracksets_to_json(const std::vector<TrackSet>& sets) {
  json j = json::array();
  for (const auto& set : sets) {
    json sj{{"video_id", set.video_id}, {"video_length", set.video_length}};
    sj["tracklets"] = json::array();
    for (const auto& t : set.tracklets)
      sj["tracklets"].push_back(tracklet_to_json(t));
    j.push_back(std::move(sj));
  }
  return j;
}

void write_tracksets(const std::string& path, const std::vector<TrackSet>& sets) {
  write_file(path, tracksets_to_json(sets).dump(2) + "\n");
}

json eval_result_to_json(const EvalResult& r) {
  json j{{"mAP", r.map},   {"AP50", r.ap50}, {"AP75", r.ap75},
         {"AR1", r.ar1},   {"AR10", r.ar10}};
  j["per_category"] = json::array();
  for (const auto& c : r.per_category)
    j["per_category"].push_back({{"category_id", c.category_id}, {"ap", c.ap}});
  j["ar_by_max_dets"] = json::array();
  for (const auto& [k, ar] : r.ar_by_max_dets)
    j["ar_by_max_dets"].push_back({{"max_dets", k}, {"ar", ar}});
  return j;
}

std::string format_eval_report(const EvalResult& r) {
  std::ostringstream out;
  auto row = [&](const char* name, double value) {
    out << "  " << name;
    for (std::size_t i = std::string(name).size(); i < 6; ++i) out << ' ';
    out << " = ";
    if (std::isnan(value))
      out << "n/a";
    else
      out << std::fixed << std::setprecision(4) << value;
    out << "\n";
  };
  out << "metrics (st-IoU " << std::fixed << std::setprecision(2) << 0.50
      << ":" << 0.95 << ")\n";
  row("mAP", r.map);
  row("AP50", r.ap50);
  row("AP75", r.ap75);
  row("AR1", r.ar1);
  row("AR10", r.ar10);
  if (!r.per_category.empty()) {
    out << "per-category AP\n";
    for (const auto& c : r.per_category)
      out << "  category " << c.category_id << " = " << std::fixed
          << std::setprecision(4) << c.ap << "\n";
  }
  return out.str();
}

void write_histogram_csv(const std::string& path,
                         const std::vector<double>& edges,
                         const std::vector<std::int64_t>& counts) {
  std::ostringstream out;
  out << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i)
    out << edges[i] << "," << edges[i + 1] << "," << counts[i] << "\n";
  write_file(path, out.str());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

std::map<int, std::vector<std::vector<Detection>>> group_by_video(
    const std::vector<DetectionRecord>& records,
    const std::map<int, int>& video_lengths) {
  std::map<int, std::vector<std::vector<Detection>>> out;
  std::map<int, std::size_t> embed_dim;
  for (const auto& r : records) {
    auto& frames = out[r.video_id];
    auto lit = video_lengths.find(r.video_id);
    if (lit != video_lengths.end()) {
      if (r.det.frame_index >= lit->second)
        throw std::invalid_argument(
            "detection at line " + std::to_string(r.line) + ": frame " +
            std::to_string(r.det.frame_index) + " beyond video length " +
            std::to_string(lit->second));
      frames.resize(lit->second);
    } else if (int(frames.size()) <= r.det.frame_index) {
      frames.resize(r.det.frame_index + 1);
    }
    if (r.det.has_embedding()) {
      auto [it, inserted] = embed_dim.emplace(r.video_id, r.det.embedding.size());
      if (!inserted && it->second != r.det.embedding.size())
        throw std::invalid_argument(
            "detection at line " + std::to_string(r.line) +
            ": embedding dimension " + std::to_string(r.det.embedding.size()) +
            " differs from the video's " + std::to_string(it->second));
    }
    frames[r.det.frame_index].push_back(r.det);
  }
  // Videos named in the lengths map but absent from the records still get
  // empty frame lists.
  for (const auto& [vid, length] : video_lengths) {
    auto& frames = out[vid];
    if (int(frames.size()) < length) frames.resize(length);
  }
  return out;
}

}  // namespace vistrack::io
