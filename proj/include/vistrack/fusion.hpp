#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "vistrack/types.hpp"

namespace vistrack {

struct FusionConfig {
  int target_classes = 0;     // C: classes of the target taxonomy
  int auxiliary_classes = 0;  // K: catch-all classes appended after C
  std::uint64_t seed = 0;
};

/// Relabels a batch of auxiliary-class samples. Labels in [1,C] pass
/// through; label C+1 becomes the predicted auxiliary index when the row's
/// argmax already falls in (C, C+K], otherwise a uniform draw from
/// {C+1..C+K}. Class indices are 1-based; argmax ties resolve to the lowest
/// index. Row i draws from a stream derived from (seed, i), so the output
/// is deterministic and independent of processing order.
std::vector<int> fuse_labels(const std::vector<std::vector<double>>& probs,
                             const std::vector<int>& labels,
                             const FusionConfig& cfg);

/// Maps every source category id to a target id: shared names keep their
/// target id in [1,C], everything else collapses to the sentinel C+1.
/// Throws on duplicate target names or target ids outside [1,C].
std::map<int, int> map_auxiliary(const std::vector<CategoryInfo>& source,
                                 const std::vector<CategoryInfo>& target,
                                 int target_classes);

}  // namespace vistrack
