#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace vistrack::testing {

Grid oracle_decode(const RleMask& m) {
  Grid g(m.height, std::vector<int>(m.width, 0));
  std::int64_t pos = 0;
  int value = 0;
  for (auto run : m.runs) {
    for (std::uint32_t i = 0; i < run; ++i) {
      // column-major positions: pos = col * height + row
      int row = int(pos % m.height);
      int col = int(pos / m.height);
      g[row][col] = value;
      ++pos;
    }
    value = 1 - value;
  }
  return g;
}

double oracle_mask_iou(const Grid& a, const Grid& b) {
  std::int64_t inter = 0, uni = 0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    for (std::size_t c = 0; c < a[r].size(); ++c) {
      if (a[r][c] && b[r][c]) ++inter;
      if (a[r][c] || b[r][c]) ++uni;
    }
  }
  return uni > 0 ? double(inter) / double(uni) : 0.0;
}

std::optional<BoundingBox> oracle_mask_bounds(const Grid& g) {
  int min_r = -1, max_r = -1, min_c = -1, max_c = -1;
  for (int r = 0; r < int(g.size()); ++r) {
    for (int c = 0; c < int(g[r].size()); ++c) {
      if (!g[r][c]) continue;
      if (min_r < 0 || r < min_r) min_r = r;
      if (max_r < 0 || r > max_r) max_r = r;
      if (min_c < 0 || c < min_c) min_c = c;
      if (max_c < 0 || c > max_c) max_c = c;
    }
  }
  if (min_r < 0) return std::nullopt;
  return BoundingBox{double(min_c), double(min_r), double(max_c + 1),
                     double(max_r + 1)};
}

double oracle_box_iou_integer(const BoundingBox& a, const BoundingBox& b) {
  int lo_x = int(std::min(a.x1, b.x1)), hi_x = int(std::max(a.x2, b.x2));
  int lo_y = int(std::min(a.y1, b.y1)), hi_y = int(std::max(a.y2, b.y2));
  std::int64_t inter = 0, uni = 0;
  for (int y = lo_y; y < hi_y; ++y) {
    for (int x = lo_x; x < hi_x; ++x) {
      bool in_a = x >= a.x1 && x < a.x2 && y >= a.y1 && y < a.y2;
      bool in_b = x >= b.x1 && x < b.x2 && y >= b.y1 && y < b.y2;
      if (in_a && in_b) ++inter;
      if (in_a || in_b) ++uni;
    }
  }
  return uni > 0 ? double(inter) / double(uni) : 0.0;
}

namespace {

void enumerate_assignments(const std::vector<std::vector<double>>& affinity,
                           double gate, std::size_t det,
                           std::vector<char>& track_used,
                           std::vector<int>& current, int count, double total,
                           int& best_count, double& best_total,
                           std::vector<int>& best) {
  if (det == affinity.size()) {
    if (count > best_count ||
        (count == best_count && total > best_total)) {
      best_count = count;
      best_total = total;
      best = current;
    }
    return;
  }
  current[det] = -1;
  enumerate_assignments(affinity, gate, det + 1, track_used, current, count,
                        total, best_count, best_total, best);
  for (std::size_t t = 0; t < affinity[det].size(); ++t) {
    if (track_used[t] || !(affinity[det][t] > gate)) continue;
    track_used[t] = 1;
    current[det] = int(t);
    enumerate_assignments(affinity, gate, det + 1, track_used, current,
                          count + 1, total + affinity[det][t], best_count,
                          best_total, best);
    track_used[t] = 0;
  }
  current[det] = -1;
}

}  // namespace

std::vector<int> oracle_best_assignment(
    const std::vector<std::vector<double>>& affinity, double gate) {
  std::vector<int> best(affinity.size(), -1), current(affinity.size(), -1);
  if (affinity.empty()) return best;
  std::vector<char> track_used(affinity.front().size(), 0);
  int best_count = -1;
  double best_total = 0.0;
  enumerate_assignments(affinity, gate, 0, track_used, current, 0, 0.0,
                        best_count, best_total, best);
  return best;
}

namespace {

double simple_box_iou(const BoundingBox& a, const BoundingBox& b) {
  double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0 || h <= 0) return 0.0;
  double inter = w * h;
  double area_a = (a.x2 - a.x1) * (a.y2 - a.y1);
  double area_b = (b.x2 - b.x1) * (b.y2 - b.y1);
  return inter / (area_a + area_b - inter);
}

bool sim_overlap(const Tracklet& f, const Tracklet& b, const BiTrackParams& p) {
  std::vector<double> ious;
  for (const auto& [frame, det] : f.entries) {
    auto it = b.entries.find(frame);
    if (it != b.entries.end())
      ious.push_back(simple_box_iou(det.box, it->second.box));
  }
  if (int(ious.size()) < std::max(1, p.min_valid_frames)) return false;
  double sum = 0;
  for (double v : ious) sum += v;
  return sum / double(ious.size()) > p.thr;
}

int sim_vote(const Tracklet& t) {
  std::map<int, std::pair<int, double>> freq;  // category -> (count, score sum)
  for (const auto& [frame, det] : t.entries) {
    freq[det.category_id].first += 1;
    freq[det.category_id].second += det.score;
  }
  int best_cat = 0;
  std::pair<int, double> best{-1, 0.0};
  for (const auto& [cat, tally] : freq) {
    if (tally.first > best.first ||
        (tally.first == best.first && tally.second > best.second)) {
      best = tally;
      best_cat = cat;
    }
  }
  return best_cat;
}

Tracklet sim_merge(const Tracklet& f, const Tracklet& b) {
  Tracklet m = f;
  m.direction = TrackDirection::merged;
  for (const auto& [frame, det] : b.entries) {
    auto it = m.entries.find(frame);
    if (it == m.entries.end() || det.score > it->second.score)
      m.entries[frame] = det;
  }
  double sum = 0;
  for (const auto& [frame, det] : m.entries) sum += det.score;
  m.track_score = sum / double(m.entries.size());
  m.track_category = sim_vote(m);
  return m;
}

}  // namespace

TrackSet oracle_bitrack_merge(const TrackSet& forward, const TrackSet& backward,
                              const BiTrackParams& params) {
  std::vector<Tracklet> f_sorted = forward.tracklets;
  std::vector<Tracklet> b_sorted = backward.tracklets;
  std::stable_sort(f_sorted.begin(), f_sorted.end(),
                   [](const Tracklet& a, const Tracklet& b) {
                     return a.track_score > b.track_score;
                   });
  std::stable_sort(b_sorted.begin(), b_sorted.end(),
                   [](const Tracklet& a, const Tracklet& b) {
                     return a.track_score > b.track_score;
                   });

  std::vector<char> f_hat(f_sorted.size(), 0), b_hat(b_sorted.size(), 0);
  TrackSet merged;
  merged.video_id = forward.video_id;
  merged.video_length = std::max(forward.video_length, backward.video_length);
  for (std::size_t i = 0; i < f_sorted.size(); ++i) {
    for (std::size_t j = 0; j < b_sorted.size(); ++j) {
      if (b_hat[j]) continue;
      if (sim_overlap(f_sorted[i], b_sorted[j], params)) {
        merged.tracklets.push_back(sim_merge(f_sorted[i], b_sorted[j]));
        b_hat[j] = 1;
        f_hat[i] = 1;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < f_sorted.size(); ++i)
    if (!f_hat[i]) merged.tracklets.push_back(f_sorted[i]);
  for (std::size_t j = 0; j < b_sorted.size(); ++j)
    if (!b_hat[j]) merged.tracklets.push_back(b_sorted[j]);
  int id = 1;
  for (auto& t : merged.tracklets) t.track_id = id++;
  return merged;
}

std::optional<int> oracle_fuse_row(const std::vector<double>& probs, int label,
                                   int target_classes, int auxiliary_classes) {
  if (label != target_classes + 1) return label;
  int arg = 1;
  for (int i = 1; i < int(probs.size()); ++i)
    if (probs[i] > probs[arg - 1]) arg = i + 1;
  if (arg > target_classes && arg <= target_classes + auxiliary_classes)
    return arg;
  return std::nullopt;  // random branch
}

Grid oracle_transform_mask(const Grid& g, bool hflip, double rotation_deg,
                           double shift_x, double shift_y) {
  const int h = int(g.size());
  const int w = h > 0 ? int(g[0].size()) : 0;
  Grid out(h, std::vector<int>(w, 0));
  const double rad = rotation_deg * std::numbers::pi / 180.0;
  const double cx = w / 2.0, cy = h / 2.0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!g[r][c]) continue;
      double x = c + 0.5, y = r + 0.5;
      if (hflip) x = w - x;
      double rx = std::cos(rad) * (x - cx) - std::sin(rad) * (y - cy) + cx;
      double ry = std::sin(rad) * (x - cx) + std::cos(rad) * (y - cy) + cy;
      rx += shift_x;
      ry += shift_y;
      int oc = int(std::floor(rx));
      int orow = int(std::floor(ry));
      if (oc >= 0 && oc < w && orow >= 0 && orow < h) out[orow][oc] = 1;
    }
  }
  return out;
}

}  // namespace vistrack::testing
