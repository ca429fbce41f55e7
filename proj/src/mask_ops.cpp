#include "vistrack/mask_ops.hpp"

#include <algorithm>
#include <stdexcept>

namespace vistrack {

namespace {

void require_same_dims(const RleMask& a, const RleMask& b) {
  if (a.height != b.height || a.width != b.width)
    throw std::invalid_argument("mask dimension mismatch: " +
                                std::to_string(a.height) + "x" +
                                std::to_string(a.width) + " vs " +
                                std::to_string(b.height) + "x" +
                                std::to_string(b.width));
}

void check_run_sum(const RleMask& m) {
  std::int64_t sum = 0;
  for (auto r : m.runs) sum += r;
  if (sum != m.pixel_count())
    throw std::invalid_argument("RLE run sum " + std::to_string(sum) +
                                " does not cover " +
                                std::to_string(m.pixel_count()) + " pixels");
}

}  // namespace

RleMask rle_encode(const BinaryMask& grid) {
  if (grid.height <= 0 || grid.width <= 0)
    throw std::invalid_argument("cannot encode an empty grid");
  RleMask m;
  m.height = grid.height;
  m.width = grid.width;
  std::uint32_t run = 0;
  std::uint8_t current = 0;
  for (std::uint8_t v : grid.data) {
    std::uint8_t bit = v ? 1 : 0;
    if (bit != current) {
      m.runs.push_back(run);
      run = 0;
      current = bit;
    }
    ++run;
  }
  m.runs.push_back(run);
  return m;
}

BinaryMask rle_decode(const RleMask& m) {
  if (m.height <= 0 || m.width <= 0)
    throw std::invalid_argument("cannot decode a mask with empty dimensions");
  check_run_sum(m);
  BinaryMask grid(m.height, m.width);
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (auto run : m.runs) {
    if (value) std::fill_n(grid.data.begin() + pos, run, std::uint8_t(1));
    pos += run;
    value = !value;
  }
  return grid;
}

RleMask rle_from_counts(int height, int width,
                        const std::vector<std::uint32_t>& counts) {
  if (height <= 0 || width <= 0)
    throw std::invalid_argument("mask dimensions must be positive");
  // Canonicalize: drop zero runs (they join their neighbors) and keep the
  // background/foreground alternation, with a leading zero only when the
  // mask starts set.
  std::vector<std::pair<bool, std::uint64_t>> segments;
  bool v = false;
  for (auto run : counts) {
    if (run > 0) {
      if (!segments.empty() && segments.back().first == v)
        segments.back().second += run;
      else
        segments.push_back({v, run});
    }
    v = !v;
  }
  RleMask m;
  m.height = height;
  m.width = width;
  if (segments.empty() || segments.front().first) m.runs.push_back(0);
  for (const auto& [value, run] : segments)
    m.runs.push_back(std::uint32_t(run));
  check_run_sum(m);
  return m;
}

double box_iou(const BoundingBox& a, const BoundingBox& b) {
  double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  double inter = iw * ih;
  double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::pair<std::int64_t, std::int64_t> mask_intersection_union(
    const RleMask& a, const RleMask& b) {
  require_same_dims(a, b);
  check_run_sum(a);
  check_run_sum(b);
  std::int64_t inter = 0, uni = 0;
  std::size_t ia = 0, ib = 0;
  std::int64_t ra = ia < a.runs.size() ? a.runs[ia] : 0;
  std::int64_t rb = ib < b.runs.size() ? b.runs[ib] : 0;
  bool va = false, vb = false;
  std::int64_t remaining = a.pixel_count();
  while (remaining > 0) {
    while (ra == 0 && ia + 1 < a.runs.size()) {
      ra = a.runs[++ia];
      va = !va;
    }
    while (rb == 0 && ib + 1 < b.runs.size()) {
      rb = b.runs[++ib];
      vb = !vb;
    }
    std::int64_t step = std::min(ra, rb);
    if (va || vb) {
      uni += step;
      if (va && vb) inter += step;
    }
    ra -= step;
    rb -= step;
    remaining -= step;
  }
  return {inter, uni};
}

double mask_iou(const RleMask& a, const RleMask& b) {
  auto [inter, uni] = mask_intersection_union(a, b);
  return uni > 0 ? double(inter) / double(uni) : 0.0;
}

namespace {

RleMask binarize_mean(const std::vector<double>& acc, std::size_t n, int height,
                      int width, double threshold) {
  BinaryMask grid(height, width);
  for (std::size_t i = 0; i < acc.size(); ++i)
    grid.data[i] = acc[i] / double(n) > threshold ? 1 : 0;
  return rle_encode(grid);
}

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("binarization threshold must be in (0,1)");
}

}  // namespace

RleMask average_masks(const std::vector<SoftMask>& masks, double threshold) {
  check_threshold(threshold);
  if (masks.empty()) throw std::invalid_argument("no masks to average");
  const int h = masks.front().height, w = masks.front().width;
  std::vector<double> acc(std::size_t(h) * w, 0.0);
  for (const auto& m : masks) {
    if (m.height != h || m.width != w)
      throw std::invalid_argument("mask dimension mismatch in average_masks");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += m.values[i];
  }
  return binarize_mean(acc, masks.size(), h, w, threshold);
}

RleMask average_masks(const std::vector<RleMask>& masks, double threshold) {
  check_threshold(threshold);
  if (masks.empty()) throw std::invalid_argument("no masks to average");
  const int h = masks.front().height, w = masks.front().width;
  std::vector<double> acc(std::size_t(h) * std::size_t(w), 0.0);
  for (const auto& m : masks) {
    require_same_dims(m, masks.front());
    check_run_sum(m);
    std::size_t pos = 0;
    bool value = false;
    for (auto run : m.runs) {
      if (value)
        for (std::size_t i = pos; i < pos + run; ++i) acc[i] += 1.0;
      pos += run;
      value = !value;
    }
  }
  return binarize_mean(acc, masks.size(), h, w, threshold);
}

BoundingBox mask_to_box(const RleMask& m) {
  check_run_sum(m);
  const std::int64_t h = m.height;
  std::int64_t min_row = h, max_row = -1, min_col = m.width, max_col = -1;
  std::int64_t pos = 0;
  bool value = false;
  for (auto run : m.runs) {
    if (value && run > 0) {
      std::int64_t first = pos, last = pos + run - 1;
      min_col = std::min(min_col, first / h);
      max_col = std::max(max_col, last / h);
      if (run >= h) {
        min_row = 0;
        max_row = h - 1;
      } else {
        std::int64_t ra = first % h, rb = last % h;
        if (ra <= rb) {
          min_row = std::min(min_row, ra);
          max_row = std::max(max_row, rb);
        } else {  // run wraps a column boundary
          min_row = 0;
          max_row = h - 1;
        }
      }
    }
    pos += run;
    value = !value;
  }
  if (max_col < 0) throw std::invalid_argument("mask_to_box on an empty mask");
  return {double(min_col), double(min_row), double(max_col + 1),
          double(max_row + 1)};
}

RleMask resize_mask(const RleMask& m, int out_height, int out_width) {
  if (out_height <= 0 || out_width <= 0)
    throw std::invalid_argument("resize target must be positive");
  BinaryMask in = rle_decode(m);
  BinaryMask out(out_height, out_width);
  for (int c = 0; c < out_width; ++c) {
    int sc = std::min(int((c + 0.5) * m.width / out_width), m.width - 1);
    for (int r = 0; r < out_height; ++r) {
      int sr = std::min(int((r + 0.5) * m.height / out_height), m.height - 1);
      out.at(r, c) = in.at(sr, sc);
    }
  }
  return rle_encode(out);
}

}  // namespace vistrack
