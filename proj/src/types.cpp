#include "vistrack/types.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace vistrack {

bool BoundingBox::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x1 <= x2 && y1 <= y2;
}

std::int64_t RleMask::area() const {
  std::int64_t a = 0;
  for (std::size_t i = 1; i < runs.size(); i += 2) a += runs[i];
  return a;
}

std::string_view to_string(TrackDirection d) {
  switch (d) {
    case TrackDirection::forward: return "forward";
    case TrackDirection::backward: return "backward";
    case TrackDirection::merged: return "merged";
  }
  return "forward";
}

TrackDirection direction_from_string(std::string_view s) {
  if (s == "forward") return TrackDirection::forward;
  if (s == "backward") return TrackDirection::backward;
  if (s == "merged") return TrackDirection::merged;
  throw std::invalid_argument("unknown track direction: " + std::string(s));
}

const VideoInfo* GroundTruthDataset::find_video(int id) const {
  for (const auto& v : videos)
    if (v.id == id) return &v;
  return nullptr;
}

const CategoryInfo* GroundTruthDataset::find_category(int id) const {
  for (const auto& c : categories)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {

std::string entity_name(const char* kind, int id) {
  return std::string(kind) + " " + std::to_string(id);
}

bool rle_well_formed(const RleMask& m, std::string* why) {
  std::int64_t sum = 0;
  for (auto r : m.runs) sum += r;
  if (sum != m.pixel_count()) {
    *why = "RLE run sum " + std::to_string(sum) + " != " +
           std::to_string(m.pixel_count()) + " pixels";
    return false;
  }
  for (std::size_t i = 1; i < m.runs.size(); ++i) {
    if (m.runs[i] == 0) {
      *why = "RLE has an internal zero run at index " + std::to_string(i);
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Violation> validate_dataset(const GroundTruthDataset& ds) {
  std::vector<Violation> out;
  auto add = [&](std::string entity, std::string rule) {
    out.push_back({std::move(entity), std::move(rule)});
  };

  std::set<int> video_ids, category_ids, instance_ids;
  for (const auto& v : ds.videos) {
    auto name = entity_name("video", v.id);
    if (!video_ids.insert(v.id).second) add(name, "duplicate video id");
    if (v.width <= 0 || v.height <= 0)
      add(name, "non-positive dimensions");
    if (v.length <= 0) add(name, "non-positive length");
    if (!v.file_names.empty() && int(v.file_names.size()) != v.length)
      add(name, "file_names length " + std::to_string(v.file_names.size()) +
                    " != video length " + std::to_string(v.length));
  }
  for (const auto& c : ds.categories) {
    if (!category_ids.insert(c.id).second)
      add(entity_name("category", c.id), "duplicate category id");
  }

  for (const auto& inst : ds.instances) {
    auto name = entity_name("annotation", inst.id);
    if (!instance_ids.insert(inst.id).second) add(name, "duplicate annotation id");
    if (!category_ids.count(inst.category_id))
      add(name, "unknown category_id " + std::to_string(inst.category_id));
    const VideoInfo* video = ds.find_video(inst.video_id);
    if (!video) {
      add(name, "unknown video_id " + std::to_string(inst.video_id));
      continue;
    }
    if (int(inst.segmentations.size()) != video->length)
      add(name, "segmentations length " +
                    std::to_string(inst.segmentations.size()) +
                    " != video length " + std::to_string(video->length));
    if (int(inst.bboxes.size()) != video->length)
      add(name, "bboxes length " + std::to_string(inst.bboxes.size()) +
                    " != video length " + std::to_string(video->length));
    for (std::size_t t = 0; t < inst.segmentations.size(); ++t) {
      const auto& seg = inst.segmentations[t];
      if (!seg) continue;
      auto frame_name = name + " frame " + std::to_string(t);
      if (seg->height != video->height || seg->width != video->width)
        add(frame_name, "mask size " + std::to_string(seg->height) + "x" +
                            std::to_string(seg->width) + " != video size " +
                            std::to_string(video->height) + "x" +
                            std::to_string(video->width));
      std::string why;
      if (!rle_well_formed(*seg, &why)) add(frame_name, why);
    }
    for (std::size_t t = 0; t < inst.bboxes.size(); ++t) {
      if (inst.bboxes[t] && !inst.bboxes[t]->valid())
        add(name + " frame " + std::to_string(t), "invalid bounding box");
    }
  }
  return out;
}

}  // namespace vistrack
