#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vistrack/types.hpp"

namespace vistrack {

/// Dense binary mask. Storage is column-major (index = col * height + row)
/// so encode/decode are linear scans.
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int h, int w)
      : height(h), width(w), data(std::size_t(h) * std::size_t(w), 0) {}

  std::uint8_t& at(int row, int col) {
    return data[std::size_t(col) * height + row];
  }
  std::uint8_t at(int row, int col) const {
    return data[std::size_t(col) * height + row];
  }

  bool operator==(const BinaryMask&) const = default;
};

/// Per-pixel real-valued mask in [0,1], same column-major layout.
struct SoftMask {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  SoftMask() = default;
  SoftMask(int h, int w)
      : height(h), width(w), values(std::size_t(h) * std::size_t(w), 0.0) {}

  double& at(int row, int col) {
    return values[std::size_t(col) * height + row];
  }
  double at(int row, int col) const {
    return values[std::size_t(col) * height + row];
  }
};

RleMask rle_encode(const BinaryMask& grid);
BinaryMask rle_decode(const RleMask& m);

/// Builds a mask from raw counts, validating the run sum and merging any
/// internal zero runs into canonical form.
RleMask rle_from_counts(int height, int width,
                        const std::vector<std::uint32_t>& counts);

double box_iou(const BoundingBox& a, const BoundingBox& b);

/// Intersection and union pixel counts, computed directly on the run lists.
std::pair<std::int64_t, std::int64_t> mask_intersection_union(const RleMask& a,
                                                              const RleMask& b);
double mask_iou(const RleMask& a, const RleMask& b);

/// Per-pixel mean of the inputs, binarized with a strict > comparison.
RleMask average_masks(const std::vector<SoftMask>& masks, double threshold);
RleMask average_masks(const std::vector<RleMask>& masks, double threshold);

/// Tight bounds of the set pixels; throws on an empty mask.
BoundingBox mask_to_box(const RleMask& m);

/// Nearest-neighbor resample to a new grid size.
RleMask resize_mask(const RleMask& m, int out_height, int out_width);

}  // namespace vistrack
