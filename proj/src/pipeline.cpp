#include "vistrack/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vistrack/bitrack.hpp"
#include "vistrack/ensemble.hpp"
#include "vistrack/mask_ops.hpp"
#include "vistrack/parallel.hpp"
#include "vistrack/postproc.hpp"
#include "vistrack/tracker.hpp"

namespace vistrack {

std::map<int, std::pair<int, int>> native_dims_from(
    const std::optional<GroundTruthDataset>& gt,
    const std::vector<ScaledDetections>& models) {
  std::map<int, std::pair<int, int>> dims;
  if (gt)
    for (const auto& v : gt->videos) dims[v.id] = {v.height, v.width};
  for (const auto& model : models) {
    if (model.scale != 1.0) continue;
    for (const auto& r : model.records)
      if (r.det.mask && !dims.count(r.video_id))
        dims[r.video_id] = {r.det.mask->height, r.det.mask->width};
  }
  return dims;
}

std::vector<io::DetectionRecord> rescale_detections(
    const ScaledDetections& input,
    const std::map<int, std::pair<int, int>>& native_dims) {
  if (input.scale == 1.0) return input.records;
  if (!(input.scale > 0.0))
    throw std::invalid_argument("detection scale must be positive");
  std::vector<io::DetectionRecord> out = input.records;
  for (auto& r : out) {
    r.det.box.x1 /= input.scale;
    r.det.box.y1 /= input.scale;
    r.det.box.x2 /= input.scale;
    r.det.box.y2 /= input.scale;
    if (r.det.mask) {
      auto it = native_dims.find(r.video_id);
      int h = it != native_dims.end()
                  ? it->second.first
                  : int(std::lround(r.det.mask->height / input.scale));
      int w = it != native_dims.end()
                  ? it->second.second
                  : int(std::lround(r.det.mask->width / input.scale));
      r.det.mask = resize_mask(*r.det.mask, h, w);
    }
  }
  return out;
}

std::vector<io::DetectionRecord> ensemble_models(
    const std::vector<std::vector<io::DetectionRecord>>& per_model,
    const EnsembleParams& params, int workers) {
  // Pool per (video, frame), keeping each model's detections separate.
  std::map<std::pair<int, int>, std::vector<std::vector<Detection>>> groups;
  for (std::size_t m = 0; m < per_model.size(); ++m) {
    for (const auto& r : per_model[m]) {
      auto& slot = groups[{r.video_id, r.det.frame_index}];
      slot.resize(per_model.size());
      slot[m].push_back(r.det);
    }
  }
  std::vector<std::pair<int, int>> keys;
  keys.reserve(groups.size());
  for (const auto& [key, slot] : groups) keys.push_back(key);

  std::vector<std::vector<io::DetectionRecord>> fused(keys.size());
  parallel_for(keys.size(), workers, [&](std::size_t i) {
    const auto& slot = groups.at(keys[i]);
    for (const auto& cluster : greedy_ensemble_clusters(slot, params)) {
      io::DetectionRecord r;
      r.video_id = keys[i].first;
      r.det = fuse_cluster_attachments(cluster, params);
      fused[i].push_back(std::move(r));
    }
  });

  std::vector<io::DetectionRecord> out;
  for (auto& group : fused)
    out.insert(out.end(), std::make_move_iterator(group.begin()),
               std::make_move_iterator(group.end()));
  return out;
}

std::vector<TrackSet> run_track(const std::vector<io::DetectionRecord>& records,
                                const TrackerParams& params,
                                TrackDirection direction,
                                const std::map<int, int>& video_lengths,
                                int workers) {
  auto grouped = io::group_by_video(records, video_lengths);
  std::vector<int> video_ids;
  video_ids.reserve(grouped.size());
  for (const auto& [vid, frames] : grouped) video_ids.push_back(vid);

  std::vector<TrackSet> sets(video_ids.size());
  parallel_for(video_ids.size(), workers, [&](std::size_t i) {
    sets[i] = track_video(video_ids[i], grouped.at(video_ids[i]), params,
                          direction);
  });
  return sets;
}

void refine_tracks(TrackSet& set) {
  for (auto& t : set.tracklets) {
    t.track_category = vote_label(t);
    double sum = 0.0;
    for (auto& [frame, det] : t.entries) {
      det = calibrate_score(det);
      sum += det.score;
    }
    t.track_score = sum / double(t.entries.size());
  }
}

std::vector<ResultTrack> tracksets_to_results(const std::vector<TrackSet>& sets) {
  std::vector<ResultTrack> out;
  for (const auto& set : sets) {
    for (const auto& t : set.tracklets) {
      ResultTrack r;
      r.video_id = set.video_id;
      r.category_id = t.track_category;
      r.score = t.track_score;
      r.segmentations.assign(set.video_length, std::nullopt);
      for (const auto& [frame, det] : t.entries)
        if (det.mask) r.segmentations[frame] = det.mask;
      out.push_back(std::move(r));
    }
  }
  return out;
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error("stage " + std::string(name) + ": " + e.what());
  }
}

}  // namespace

PipelineRun run_pipeline(const std::vector<ScaledDetections>& models,
                         const std::optional<GroundTruthDataset>& gt,
                         const PipelineConfig& cfg) {
  if (models.empty()) throw std::invalid_argument("no detection inputs");

  auto native = native_dims_from(gt, models);
  std::vector<std::vector<io::DetectionRecord>> normalized;
  normalized.reserve(models.size());
  for (const auto& model : models)
    normalized.push_back(
        stage("ingest", [&] { return rescale_detections(model, native); }));

  std::vector<io::DetectionRecord> records =
      normalized.size() == 1
          ? std::move(normalized.front())
          : stage("ensemble", [&] {
              return ensemble_models(normalized, cfg.ensemble, cfg.workers);
            });

  std::map<int, int> lengths;
  if (gt)
    for (const auto& v : gt->videos) lengths[v.id] = v.length;

  auto forward = stage("forward-track", [&] {
    return run_track(records, cfg.tracker, TrackDirection::forward, lengths,
                     cfg.workers);
  });

  PipelineRun run;
  if (cfg.bitrack_enabled) {
    auto backward = stage("backward-track", [&] {
      return run_track(records, cfg.tracker, TrackDirection::backward, lengths,
                       cfg.workers);
    });
    run.merged.resize(forward.size());
    stage("bitrack", [&] {
      parallel_for(forward.size(), cfg.workers, [&](std::size_t i) {
        run.merged[i] = bitrack_merge(forward[i], backward[i], cfg.bitrack);
      });
      return 0;
    });
  } else {
    run.merged = std::move(forward);
  }

  stage("postprocess", [&] {
    for (auto& set : run.merged) refine_tracks(set);
    return 0;
  });

  run.results = tracksets_to_results(run.merged);
  if (gt)
    run.metrics =
        stage("evaluate", [&] { return evaluate(run.results, *gt, cfg.eval); });
  return run;
}

}  // namespace vistrack
