#include "vistrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vistrack/mask_ops.hpp"
#include "vistrack/postproc.hpp"

namespace vistrack {

double embed_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("embedding dimension mismatch: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  if (a.empty()) throw std::invalid_argument("empty embedding");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("zero-norm embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

double affinity(const TrackBufferEntry& track, const Detection& det,
                const TrackerParams& p) {
  double sim = embed_similarity(track.embedding, det.embedding);
  double sim01 = (sim + 1.0) / 2.0;
  return p.iou_weight * box_iou(track.last.box, det.box) +
         (1.0 - p.iou_weight) * sim01;
}

// Min-cost assignment over a rectangular matrix (rows <= cols) via the
// standard potentials method.
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
  const int n = int(cost.size());
  const int m = n > 0 ? int(cost[0].size()) : 0;
  const double kInf = 1e30;
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

constexpr double kForbidden = 1e6;

// det index -> matched track id, -1 if unmatched. Pairs must pass the
// affinity gate; the optimal variant maximizes cardinality then affinity.
std::vector<int> solve_matches(const std::vector<Detection>& dets,
                               const std::vector<int>& track_ids,
                               const std::vector<std::vector<double>>& aff,
                               const std::vector<std::vector<char>>& admissible,
                               const TrackerParams& p) {
  const int nd = int(dets.size()), nt = int(track_ids.size());
  std::vector<int> det_track(nd, -1);
  if (nd == 0 || nt == 0) return det_track;

  if (!p.optimal_assignment) {
    struct Candidate {
      double a;
      int det, track;
    };
    std::vector<Candidate> cands;
    for (int d = 0; d < nd; ++d)
      for (int t = 0; t < nt; ++t)
        if (admissible[d][t]) cands.push_back({aff[d][t], d, t});
    std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
      if (x.a != y.a) return x.a > y.a;
      if (x.det != y.det) return x.det < y.det;
      return x.track < y.track;
    });
    std::vector<char> det_used(nd, 0), track_used(nt, 0);
    for (const auto& c : cands) {
      if (det_used[c.det] || track_used[c.track]) continue;
      det_used[c.det] = 1;
      track_used[c.track] = 1;
      det_track[c.det] = track_ids[c.track];
    }
    return det_track;
  }

  // Optimal: Hungarian over cost = -affinity, forbidden pairs priced out.
  bool transposed = nd > nt;
  const int rows = transposed ? nt : nd;
  const int cols = transposed ? nd : nt;
  std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      int d = transposed ? c : r, t = transposed ? r : c;
      cost[r][c] = admissible[d][t] ? -aff[d][t] : kForbidden;
    }
  auto row_to_col = hungarian_min(cost);
  for (int r = 0; r < rows; ++r) {
    int c = row_to_col[r];
    if (c < 0 || cost[r][c] >= kForbidden / 2) continue;
    int d = transposed ? c : r, t = transposed ? r : c;
    det_track[d] = track_ids[t];
  }
  return det_track;
}

}  // namespace

std::vector<FrameAssignment> associate_frame(TrackBuffer& buffer,
                                             const std::vector<Detection>& dets,
                                             const TrackerParams& p) {
  for (const auto& d : dets) {
    if (d.frame_index != dets.front().frame_index)
      throw std::invalid_argument("mixed frame indices in one association");
    if (!d.has_embedding())
      throw std::invalid_argument("detection without embedding");
  }

  std::vector<int> track_ids;
  track_ids.reserve(buffer.tracks.size());
  for (const auto& [id, entry] : buffer.tracks) track_ids.push_back(id);

  const int nd = int(dets.size()), nt = int(track_ids.size());
  std::vector<std::vector<double>> aff(nd, std::vector<double>(nt, 0.0));
  std::vector<std::vector<char>> admissible(nd, std::vector<char>(nt, 0));
  for (int d = 0; d < nd; ++d) {
    for (int t = 0; t < nt; ++t) {
      const auto& entry = buffer.tracks.at(track_ids[t]);
      if (p.require_same_category &&
          entry.last.category_id != dets[d].category_id)
        continue;
      aff[d][t] = affinity(entry, dets[d], p);
      admissible[d][t] = aff[d][t] > p.sim_threshold;
    }
  }

  auto det_track = solve_matches(dets, track_ids, aff, admissible, p);

  std::vector<FrameAssignment> out;
  out.reserve(dets.size());
  std::vector<char> track_matched(nt, 0);
  for (int d = 0; d < nd; ++d) {
    if (det_track[d] >= 0) {
      auto& entry = buffer.tracks.at(det_track[d]);
      const double beta = p.embed_momentum;
      for (std::size_t i = 0; i < entry.embedding.size(); ++i)
        entry.embedding[i] =
            beta * entry.embedding[i] + (1.0 - beta) * dets[d].embedding[i];
      entry.last = dets[d];
      entry.frames_since_seen = 0;
      out.push_back({d, det_track[d], false});
      auto it = std::find(track_ids.begin(), track_ids.end(), det_track[d]);
      track_matched[it - track_ids.begin()] = 1;
    } else if (dets[d].score >= p.init_score) {
      int id = buffer.next_id++;
      buffer.tracks[id] = {dets[d], dets[d].embedding, 0};
      out.push_back({d, id, true});
    } else {
      out.push_back({d, -1, false});
    }
  }

  // Age unmatched tracks and evict the expired ones.
  for (int t = 0; t < nt; ++t) {
    if (track_matched[t]) continue;
    auto it = buffer.tracks.find(track_ids[t]);
    it->second.frames_since_seen += 1;
    if (it->second.frames_since_seen > p.buffer_ttl) buffer.tracks.erase(it);
  }
  return out;
}

TrackSet track_video(int video_id,
                     const std::vector<std::vector<Detection>>& frames,
                     const TrackerParams& p, TrackDirection direction) {
  if (direction == TrackDirection::merged)
    throw std::invalid_argument("track_video direction must be forward or backward");
  const int length = int(frames.size());
  std::vector<int> order(length);
  for (int i = 0; i < length; ++i)
    order[i] = direction == TrackDirection::forward ? i : length - 1 - i;

  TrackBuffer buffer;
  std::map<int, Tracklet> tracklets;
  for (int frame : order) {
    for (const auto& d : frames[frame])
      if (d.frame_index != frame)
        throw std::invalid_argument("detection frame_index " +
                                    std::to_string(d.frame_index) +
                                    " stored under frame " +
                                    std::to_string(frame));
    auto assignments = associate_frame(buffer, frames[frame], p);
    for (const auto& a : assignments) {
      if (a.track_id < 0) continue;
      auto& t = tracklets[a.track_id];
      t.track_id = a.track_id;
      t.direction = direction;
      t.entries[frame] = frames[frame][a.det_index];
    }
  }

  TrackSet set;
  set.video_id = video_id;
  set.video_length = length;
  for (auto& [id, t] : tracklets) {
    double sum = 0.0;
    for (const auto& [frame, det] : t.entries) sum += det.score;
    t.track_score = sum / double(t.entries.size());
    t.track_category = vote_label(t);
    set.tracklets.push_back(std::move(t));
  }
  return set;
}

}  // namespace vistrack
