#include "support/fixtures.hpp"

#include <algorithm>

namespace vistrack::testing {

BinaryMask random_mask(Rng& rng, int height, int width, double density) {
  std::bernoulli_distribution bit(density);
  BinaryMask m(height, width);
  for (auto& v : m.data) v = bit(rng) ? 1 : 0;
  return m;
}

BinaryMask rect_mask(int height, int width, int x1, int y1, int x2, int y2) {
  BinaryMask m(height, width);
  for (int r = y1; r < y2; ++r)
    for (int c = x1; c < x2; ++c) m.at(r, c) = 1;
  return m;
}

std::vector<double> one_hot(std::size_t dim, std::size_t index) {
  std::vector<double> v(dim, 0.0);
  v[index % dim] = 1.0;
  return v;
}

GroundTruthDataset random_micro_gt(Rng& rng, int max_videos, int max_frames,
                                   int max_instances, int categories) {
  GroundTruthDataset ds;
  std::uniform_int_distribution<int> n_videos(1, max_videos);
  std::uniform_int_distribution<int> n_frames(1, max_frames);
  std::uniform_int_distribution<int> n_instances(0, max_instances);
  std::uniform_int_distribution<int> category(1, categories);
  std::bernoulli_distribution present(0.8);

  for (int c = 1; c <= categories; ++c)
    ds.categories.push_back({c, "cat" + std::to_string(c)});

  int instance_id = 1;
  const int vids = n_videos(rng);
  for (int v = 1; v <= vids; ++v) {
    VideoInfo video{v, 4, 4, n_frames(rng), {}};
    ds.videos.push_back(video);
    const int instances = n_instances(rng);
    for (int i = 0; i < instances; ++i) {
      GtInstance inst;
      inst.id = instance_id++;
      inst.video_id = v;
      inst.category_id = category(rng);
      bool any = false;
      for (int t = 0; t < video.length; ++t) {
        if (!present(rng)) {
          inst.segmentations.push_back(std::nullopt);
          inst.bboxes.push_back(std::nullopt);
          continue;
        }
        BinaryMask m = random_mask(rng, 4, 4, 0.5);
        RleMask rle = rle_encode(m);
        if (rle.empty_mask()) {
          inst.segmentations.push_back(std::nullopt);
          inst.bboxes.push_back(std::nullopt);
          continue;
        }
        inst.bboxes.push_back(mask_to_box(rle));
        inst.segmentations.push_back(std::move(rle));
        any = true;
      }
      if (any) ds.instances.push_back(std::move(inst));
    }
  }
  return ds;
}

std::vector<ResultTrack> random_predictions(Rng& rng,
                                            const GroundTruthDataset& gt) {
  std::vector<ResultTrack> preds;
  std::uniform_int_distribution<int> score_step(1, 19);  // 0.05 .. 0.95
  std::uniform_int_distribution<int> kind(0, 2);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> category(1, int(gt.categories.size()));

  auto grid_score = [&] { return score_step(rng) * 0.05; };

  for (const auto& inst : gt.instances) {
    const VideoInfo* video = gt.find_video(inst.video_id);
    int copies = kind(rng);
    for (int k = 0; k < copies; ++k) {
      ResultTrack r;
      r.video_id = inst.video_id;
      r.category_id = coin(rng) ? inst.category_id : category(rng);
      r.score = grid_score();
      for (int t = 0; t < video->length; ++t) {
        const auto& seg = inst.segmentations[t];
        if (!seg || coin(rng) == false) {
          r.segmentations.push_back(std::nullopt);
          continue;
        }
        BinaryMask m = rle_decode(*seg);
        // occasionally flip a pixel to vary the overlap
        if (coin(rng)) {
          std::uniform_int_distribution<int> pick(0, int(m.data.size()) - 1);
          int p = pick(rng);
          m.data[p] = m.data[p] ? 0 : 1;
        }
        RleMask rle = rle_encode(m);
        if (rle.empty_mask())
          r.segmentations.push_back(std::nullopt);
        else
          r.segmentations.push_back(std::move(rle));
      }
      preds.push_back(std::move(r));
    }
  }
  // plus pure-noise predictions
  for (const auto& video : gt.videos) {
    if (!coin(rng)) continue;
    ResultTrack r;
    r.video_id = video.id;
    r.category_id = category(rng);
    r.score = grid_score();
    for (int t = 0; t < video.length; ++t) {
      RleMask rle = rle_encode(random_mask(rng, 4, 4, 0.4));
      if (rle.empty_mask())
        r.segmentations.push_back(std::nullopt);
      else
        r.segmentations.push_back(std::move(rle));
    }
    preds.push_back(std::move(r));
  }
  return preds;
}

std::vector<io::DetectionRecord> gt_as_detections(const GroundTruthDataset& gt,
                                                  double score) {
  std::vector<io::DetectionRecord> records;
  int line = 1;
  for (std::size_t i = 0; i < gt.instances.size(); ++i) {
    const auto& inst = gt.instances[i];
    for (std::size_t t = 0; t < inst.segmentations.size(); ++t) {
      if (!inst.segmentations[t] && !inst.bboxes[t]) continue;
      Detection det;
      det.frame_index = int(t);
      det.category_id = inst.category_id;
      det.score = score;
      det.mask = inst.segmentations[t];
      det.box = inst.bboxes[t] ? *inst.bboxes[t] : mask_to_box(*det.mask);
      det.embedding = one_hot(std::max<std::size_t>(gt.instances.size(), 1), i);
      records.push_back({inst.video_id, std::move(det), line++});
    }
  }
  return records;
}

void random_bitrack_fixture(Rng& rng, TrackSet& forward, TrackSet& backward,
                            int max_tracklets, int frames) {
  std::uniform_int_distribution<int> n_tracks(1, max_tracklets);
  std::uniform_real_distribution<double> pos(0.0, 40.0);
  std::uniform_real_distribution<double> size(4.0, 12.0);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  std::uniform_int_distribution<int> score_step(1, 19);
  std::bernoulli_distribution present(0.6);
  std::bernoulli_distribution side_has_object(0.85);
  std::bernoulli_distribution noisy_object(0.3);
  std::uniform_int_distribution<int> category(1, 3);

  forward = TrackSet{1, frames, {}};
  backward = TrackSet{1, frames, {}};

  // Underlying objects both passes observe, each a box random-walking a
  // little per frame. Noisy objects drift far enough between sides that
  // their pairs often fail the overlap gate.
  const int objects = n_tracks(rng);
  std::vector<std::vector<BoundingBox>> paths(objects);
  std::vector<double> noise(objects);
  for (int o = 0; o < objects; ++o) {
    double x = pos(rng), y = pos(rng), w = size(rng), h = size(rng);
    noise[o] = noisy_object(rng) ? 3.0 : 0.25;
    for (int t = 0; t < frames; ++t) {
      paths[o].push_back({x, y, x + w, y + h});
      x += jitter(rng);
      y += jitter(rng);
    }
  }

  auto sample_side = [&](TrackSet& side, TrackDirection direction) {
    int id = 1;
    for (int o = 0; o < objects; ++o) {
      if (!side_has_object(rng)) continue;  // one-sided tracklets stay unmatched
      Tracklet t;
      t.track_id = id++;
      t.direction = direction;
      int cat = category(rng);
      for (int f = 0; f < frames; ++f) {
        if (!present(rng)) continue;
        Detection d;
        d.frame_index = f;
        d.box = paths[o][f];
        d.box.x1 += jitter(rng) * noise[o];
        d.box.y1 += jitter(rng) * noise[o];
        d.box.x2 += jitter(rng) * noise[o];
        d.box.y2 += jitter(rng) * noise[o];
        if (d.box.x2 < d.box.x1) std::swap(d.box.x1, d.box.x2);
        if (d.box.y2 < d.box.y1) std::swap(d.box.y1, d.box.y2);
        d.score = score_step(rng) * 0.05;
        d.category_id = cat;
        t.entries[f] = std::move(d);
      }
      if (t.entries.empty()) continue;
      double sum = 0;
      for (const auto& [f, d] : t.entries) sum += d.score;
      t.track_score = sum / double(t.entries.size());
      t.track_category = cat;
      side.tracklets.push_back(std::move(t));
    }
  };
  sample_side(forward, TrackDirection::forward);
  sample_side(backward, TrackDirection::backward);
}

GroundTruthDataset sliding_gt(int n_videos, int length) {
  GroundTruthDataset gt;
  for (int v = 1; v <= n_videos; ++v) {
    gt.videos.push_back({v, 8, 8, length, {}});
    gt.categories.push_back({v, "cat" + std::to_string(v)});
    GtInstance inst;
    inst.id = v;
    inst.video_id = v;
    inst.category_id = v;
    for (int t = 0; t < length; ++t) {
      RleMask m = rle_encode(rect_mask(8, 8, t % 5, 2, t % 5 + 3, 5));
      inst.bboxes.push_back(mask_to_box(m));
      inst.segmentations.push_back(std::move(m));
    }
    gt.instances.push_back(std::move(inst));
  }
  return gt;
}

std::vector<io::DetectionRecord> compensation_fixture(int length) {
  std::vector<io::DetectionRecord> records;
  int line = 1;
  for (int t = 0; t < length; ++t) {
    Detection x;
    x.frame_index = t;
    x.box = {0, 0, 10, 10};
    x.category_id = 1;
    x.score = t < length / 2 ? 0.1 : 0.9;  // confident late
    x.embedding = {1, 0};
    records.push_back({1, x, line++});
    Detection y;
    y.frame_index = t;
    y.box = {30, 30, 40, 40};
    y.category_id = 2;
    y.score = t < length / 2 ? 0.9 : 0.1;  // confident early
    y.embedding = {0, 1};
    records.push_back({1, y, line++});
  }
  return records;
}

}  // namespace vistrack::testing
