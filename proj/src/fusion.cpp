#include "vistrack/fusion.hpp"

#include <stdexcept>
#include <string>
#include <unordered_map>

#include "vistrack/rng.hpp"

namespace vistrack {

namespace {

// 1-based argmax, lowest index on ties.
int argmax_1based(const std::vector<double>& row) {
  int best = 0;
  for (int i = 1; i < int(row.size()); ++i)
    if (row[i] > row[best]) best = i;
  return best + 1;
}

}  // namespace

std::vector<int> fuse_labels(const std::vector<std::vector<double>>& probs,
                             const std::vector<int>& labels,
                             const FusionConfig& cfg) {
  const int c = cfg.target_classes, k = cfg.auxiliary_classes;
  if (c < 1 || k < 1)
    throw std::invalid_argument("fusion needs target_classes >= 1 and auxiliary_classes >= 1");
  if (probs.size() != labels.size())
    throw std::invalid_argument("probs and labels row counts differ");

  std::vector<int> out(labels.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > c + 1)
      throw std::invalid_argument("row " + std::to_string(i) + ": label " +
                                  std::to_string(labels[i]) +
                                  " outside [1, C+1]");
    if (int(probs[i].size()) != c + k)
      throw std::invalid_argument("row " + std::to_string(i) + ": expected " +
                                  std::to_string(c + k) + " scores, got " +
                                  std::to_string(probs[i].size()));
    if (labels[i] <= c) {
      out[i] = labels[i];
      continue;
    }
    int predicted = argmax_1based(probs[i]);
    if (predicted > c && predicted <= c + k) {
      out[i] = predicted;
    } else {
      StreamRng rng(cfg.seed, i);
      out[i] = c + 1 + int(rng.next_below(std::uint64_t(k)));
    }
  }
  return out;
}

std::map<int, int> map_auxiliary(const std::vector<CategoryInfo>& source,
                                 const std::vector<CategoryInfo>& target,
                                 int target_classes) {
  std::unordered_map<std::string, int> by_name;
  for (const auto& cat : target) {
    if (cat.id < 1 || cat.id > target_classes)
      throw std::invalid_argument("target category '" + cat.name + "' id " +
                                  std::to_string(cat.id) +
                                  " outside [1, C]");
    if (!by_name.emplace(cat.name, cat.id).second)
      throw std::invalid_argument("duplicate target category name '" +
                                  cat.name + "'");
  }
  std::map<int, int> mapping;
  for (const auto& cat : source) {
    auto it = by_name.find(cat.name);
    mapping[cat.id] = it != by_name.end() ? it->second : target_classes + 1;
  }
  return mapping;
}

}  // namespace vistrack
