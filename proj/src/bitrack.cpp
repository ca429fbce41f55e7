#include "vistrack/bitrack.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "vistrack/mask_ops.hpp"
#include "vistrack/postproc.hpp"

namespace vistrack {

bool is_overlap(const Tracklet& f, const Tracklet& b, const BiTrackParams& p) {
  int valid = 0;
  double iou_sum = 0.0;
  for (const auto& [frame, det] : f.entries) {
    auto it = b.entries.find(frame);
    if (it == b.entries.end()) continue;
    ++valid;
    iou_sum += box_iou(det.box, it->second.box);
  }
  if (valid < std::max(1, p.min_valid_frames)) return false;
  return iou_sum / double(valid) > p.thr;
}

Tracklet merge_tracklets(const Tracklet& f, const Tracklet& b) {
  Tracklet m;
  m.track_id = f.track_id;
  m.direction = TrackDirection::merged;
  m.entries = f.entries;
  for (const auto& [frame, det] : b.entries) {
    auto it = m.entries.find(frame);
    if (it == m.entries.end())
      m.entries[frame] = det;
    else if (det.score > it->second.score)
      it->second = det;
  }
  double sum = 0.0;
  for (const auto& [frame, det] : m.entries) sum += det.score;
  m.track_score = sum / double(m.entries.size());
  m.track_category = vote_label(m);
  return m;
}

namespace {

// Descending track_score, stable on ties.
std::vector<const Tracklet*> sorted_by_score(const TrackSet& set) {
  std::vector<const Tracklet*> out;
  out.reserve(set.tracklets.size());
  for (const auto& t : set.tracklets) out.push_back(&t);
  std::stable_sort(out.begin(), out.end(), [](const Tracklet* a, const Tracklet* b) {
    return a->track_score > b->track_score;
  });
  return out;
}

}  // namespace

TrackSet bitrack_merge(const TrackSet& forward, const TrackSet& backward,
                       const BiTrackParams& p) {
  if (forward.video_id != backward.video_id)
    throw std::invalid_argument("bitrack_merge across different videos");

  auto fs = sorted_by_score(forward);
  auto bs = sorted_by_score(backward);
  std::vector<char> f_matched(fs.size(), 0), b_matched(bs.size(), 0);

  TrackSet out;
  out.video_id = forward.video_id;
  out.video_length = std::max(forward.video_length, backward.video_length);

  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = 0; j < bs.size(); ++j) {
      if (b_matched[j] || !is_overlap(*fs[i], *bs[j], p)) continue;
      out.tracklets.push_back(merge_tracklets(*fs[i], *bs[j]));
      f_matched[i] = 1;
      b_matched[j] = 1;
      break;  // one merge per forward tracklet
    }
  }
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (!f_matched[i]) out.tracklets.push_back(*fs[i]);
  for (std::size_t j = 0; j < bs.size(); ++j)
    if (!b_matched[j]) out.tracklets.push_back(*bs[j]);

  int next_id = 1;
  for (auto& t : out.tracklets) t.track_id = next_id++;
  return out;
}

}  // namespace vistrack
