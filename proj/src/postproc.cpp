#include "vistrack/postproc.hpp"

#include <map>
#include <stdexcept>

namespace vistrack {

int vote_label(const Tracklet& t) {
  if (t.entries.empty())
    throw std::invalid_argument("vote_label on an empty tracklet");
  struct Tally {
    int count = 0;
    double score_sum = 0.0;
  };
  std::map<int, Tally> tallies;
  for (const auto& [frame, det] : t.entries) {
    auto& tally = tallies[det.category_id];
    tally.count += 1;
    tally.score_sum += det.score;
  }
  int best = tallies.begin()->first;
  Tally best_tally = tallies.begin()->second;
  for (const auto& [category, tally] : tallies) {
    if (tally.count > best_tally.count ||
        (tally.count == best_tally.count &&
         tally.score_sum > best_tally.score_sum)) {
      best = category;
      best_tally = tally;
    }
  }
  return best;
}

Detection calibrate_score(Detection d) {
  if (d.mask_score) d.score *= *d.mask_score;
  return d;
}

std::vector<Detection> filter_trackable(const TrackSet& tracks, int min_len) {
  if (min_len < 1) throw std::invalid_argument("min_len must be positive");
  std::vector<Detection> out;
  for (const auto& t : tracks.tracklets) {
    if (t.size() < min_len) continue;
    for (const auto& [frame, det] : t.entries) out.push_back(det);
  }
  return out;
}

}  // namespace vistrack
