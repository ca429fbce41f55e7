#include "vistrack/data_tools.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "vistrack/mask_ops.hpp"

namespace vistrack {

std::int64_t Histogram::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

namespace {

Histogram make_histogram(const std::vector<double>& values, int bins) {
  if (bins < 1) throw std::invalid_argument("bins must be positive");
  Histogram h;
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = double(i) / bins;
  h.counts.assign(bins, 0);
  for (double v : values) {
    int bin = std::min(int(v * bins), bins - 1);
    h.counts[std::max(0, bin)] += 1;
  }
  return h;
}

}  // namespace

Histogram adjacent_iou_histogram(const GroundTruthDataset& gt, int bins,
                                 IouAggregation mode) {
  std::vector<double> values;
  for (const auto& video : gt.videos) {
    double video_sum = 0.0;
    int video_pairs = 0;
    for (const auto& inst : gt.instances) {
      if (inst.video_id != video.id) continue;
      double inst_sum = 0.0;
      int inst_pairs = 0;
      for (std::size_t t = 0; t + 1 < inst.bboxes.size(); ++t) {
        if (!inst.bboxes[t] || !inst.bboxes[t + 1]) continue;
        inst_sum += box_iou(*inst.bboxes[t], *inst.bboxes[t + 1]);
        inst_pairs += 1;
      }
      if (mode == IouAggregation::per_object && inst_pairs > 0)
        values.push_back(inst_sum / inst_pairs);
      video_sum += inst_sum;
      video_pairs += inst_pairs;
    }
    if (mode == IouAggregation::video_average && video_pairs > 0)
      values.push_back(video_sum / video_pairs);
  }
  return make_histogram(values, bins);
}

std::vector<int> subsample_indices(int video_length, int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  std::vector<int> idx;
  if (k >= video_length) {
    idx.resize(video_length);
    for (int i = 0; i < video_length; ++i) idx[i] = i;
    return idx;
  }
  if (k == 1) {
    idx.push_back(int(std::lround((video_length - 1) / 2.0)));
    return idx;
  }
  for (int j = 0; j < k; ++j)
    idx.push_back(int(std::lround(double(j) * (video_length - 1) / (k - 1))));
  return idx;
}

GroundTruthDataset subsample_frames(const GroundTruthDataset& gt,
                                    int frames_per_video) {
  GroundTruthDataset out;
  out.categories = gt.categories;
  std::map<int, std::vector<int>> kept;  // video id -> frame indices
  for (const auto& video : gt.videos) {
    auto idx = subsample_indices(video.length, frames_per_video);
    VideoInfo v = video;
    v.length = int(idx.size());
    if (!video.file_names.empty()) {
      v.file_names.clear();
      for (int i : idx) v.file_names.push_back(video.file_names[i]);
    }
    kept[video.id] = idx;
    out.videos.push_back(std::move(v));
  }
  for (const auto& inst : gt.instances) {
    auto it = kept.find(inst.video_id);
    if (it == kept.end()) continue;
    GtInstance sub = inst;
    sub.segmentations.clear();
    sub.bboxes.clear();
    for (int i : it->second) {
      sub.segmentations.push_back(inst.segmentations[i]);
      sub.bboxes.push_back(inst.bboxes[i]);
    }
    out.instances.push_back(std::move(sub));
  }
  return out;
}

namespace {

struct Affine {
  // x' = a*x + b*y + tx ; y' = c*x + d*y + ty
  double a = 1, b = 0, c = 0, d = 1, tx = 0, ty = 0;

  std::pair<double, double> apply(double x, double y) const {
    return {a * x + b * y + tx, c * x + d * y + ty};
  }

  Affine then(const Affine& next) const {  // next ∘ this
    Affine r;
    r.a = next.a * a + next.b * c;
    r.b = next.a * b + next.b * d;
    r.c = next.c * a + next.d * c;
    r.d = next.c * b + next.d * d;
    r.tx = next.a * tx + next.b * ty + next.tx;
    r.ty = next.c * tx + next.d * ty + next.ty;
    return r;
  }

  Affine inverse() const {
    double det = a * d - b * c;
    Affine r;
    r.a = d / det;
    r.b = -b / det;
    r.c = -c / det;
    r.d = a / det;
    r.tx = -(r.a * tx + r.b * ty);
    r.ty = -(r.c * tx + r.d * ty);
    return r;
  }
};

Affine build_transform(const AffineParams& p, int width, int height) {
  Affine flip;
  if (p.hflip) {
    flip.a = -1;
    flip.tx = width;
  }
  double rad = p.rotation_deg * std::numbers::pi / 180.0;
  double cx = width / 2.0, cy = height / 2.0;
  Affine rot;
  rot.a = std::cos(rad);
  rot.b = -std::sin(rad);
  rot.c = std::sin(rad);
  rot.d = std::cos(rad);
  rot.tx = cx - rot.a * cx - rot.b * cy;
  rot.ty = cy - rot.c * cx - rot.d * cy;
  Affine shift;
  shift.tx = p.shift_x;
  shift.ty = p.shift_y;
  return flip.then(rot).then(shift);
}

RleMask transform_mask(const RleMask& mask, const Affine& fwd) {
  BinaryMask in = rle_decode(mask);
  BinaryMask out(mask.height, mask.width);
  Affine inv = fwd.inverse();
  for (int c = 0; c < mask.width; ++c) {
    for (int r = 0; r < mask.height; ++r) {
      auto [x, y] = inv.apply(c + 0.5, r + 0.5);
      int sc = int(std::floor(x));
      int sr = int(std::floor(y));
      if (sc < 0 || sc >= mask.width || sr < 0 || sr >= mask.height) continue;
      out.at(r, c) = in.at(sr, sc);
    }
  }
  return rle_encode(out);
}

BoundingBox transform_box(const BoundingBox& box, const Affine& fwd) {
  double xs[4] = {box.x1, box.x2, box.x1, box.x2};
  double ys[4] = {box.y1, box.y1, box.y2, box.y2};
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (int i = 0; i < 4; ++i) {
    auto [x, y] = fwd.apply(xs[i], ys[i]);
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
  return {min_x, min_y, max_x, max_y};
}

BoundingBox clip_box(const BoundingBox& box, int width, int height) {
  BoundingBox r;
  r.x1 = std::clamp(box.x1, 0.0, double(width));
  r.y1 = std::clamp(box.y1, 0.0, double(height));
  r.x2 = std::clamp(box.x2, r.x1, double(width));
  r.y2 = std::clamp(box.y2, r.y1, double(height));
  return r;
}

}  // namespace

std::vector<PairedObject> synth_pair(const std::vector<ObjectAnnotation>& objects,
                                     const AffineParams& params,
                                     int image_width, int image_height,
                                     int first_track_id) {
  if (image_width <= 0 || image_height <= 0)
    throw std::invalid_argument("image size must be positive");
  if (!(params.rotation_deg >= -180.0 && params.rotation_deg <= 180.0))
    throw std::invalid_argument("rotation must lie in [-180, 180] degrees");
  Affine fwd = build_transform(params, image_width, image_height);

  std::vector<PairedObject> pairs;
  int next_id = first_track_id;
  for (const auto& obj : objects) {
    ObjectAnnotation moved;
    moved.category_id = obj.category_id;
    if (obj.mask) {
      moved.mask = transform_mask(*obj.mask, fwd);
      if (moved.mask->empty_mask()) continue;  // fell off the image
      moved.box = mask_to_box(*moved.mask);
    } else {
      moved.box = clip_box(transform_box(obj.box, fwd), image_width, image_height);
      if (moved.box.area() < 1.0) continue;
    }
    pairs.push_back({next_id++, obj, std::move(moved)});
  }
  return pairs;
}

}  // namespace vistrack
