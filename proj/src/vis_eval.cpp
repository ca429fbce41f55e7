#include "vistrack/vis_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "vistrack/mask_ops.hpp"

namespace vistrack {

EvalConfig EvalConfig::defaults() {
  EvalConfig cfg;
  for (int i = 0; i < 10; ++i) cfg.iou_thresholds.push_back(0.50 + 0.05 * i);
  cfg.max_dets = {1, 10, 100};
  return cfg;
}

double st_iou(const std::vector<std::optional<RleMask>>& pred,
              const std::vector<std::optional<RleMask>>& gt) {
  std::int64_t inter = 0, uni = 0;
  const std::size_t frames = std::max(pred.size(), gt.size());
  for (std::size_t t = 0; t < frames; ++t) {
    const auto* p = t < pred.size() && pred[t] ? &*pred[t] : nullptr;
    const auto* g = t < gt.size() && gt[t] ? &*gt[t] : nullptr;
    if (p && g) {
      auto [i, u] = mask_intersection_union(*p, *g);
      inter += i;
      uni += u;
    } else if (p) {
      uni += p->area();
    } else if (g) {
      uni += g->area();
    }
  }
  return uni > 0 ? double(inter) / double(uni) : 0.0;
}

namespace {

struct Block {
  std::vector<int> preds;  // sorted by (score desc, input order)
  std::vector<int> gts;    // input order
  std::vector<std::vector<double>> iou;  // [pred position][gt position]
};

void check_config(const EvalConfig& cfg) {
  if (cfg.iou_thresholds.empty())
    throw std::invalid_argument("no IoU thresholds configured");
  for (std::size_t i = 0; i < cfg.iou_thresholds.size(); ++i) {
    double t = cfg.iou_thresholds[i];
    if (!(t > 0.0 && t < 1.0))
      throw std::invalid_argument("IoU thresholds must lie in (0,1)");
    if (i > 0 && t <= cfg.iou_thresholds[i - 1])
      throw std::invalid_argument("IoU thresholds must be strictly increasing");
  }
  if (cfg.max_dets.empty())
    throw std::invalid_argument("no max_dets configured");
  for (std::size_t i = 0; i < cfg.max_dets.size(); ++i) {
    if (cfg.max_dets[i] < 1)
      throw std::invalid_argument("max_dets entries must be positive");
    if (i > 0 && cfg.max_dets[i] <= cfg.max_dets[i - 1])
      throw std::invalid_argument("max_dets must be strictly increasing");
  }
}

double ap_101_point(const std::vector<double>& precision,
                    const std::vector<double>& recall) {
  double sum = 0.0;
  for (int j = 0; j <= 100; ++j) {
    double level = j / 100.0;
    double best = 0.0;
    for (std::size_t i = 0; i < recall.size(); ++i)
      if (recall[i] >= level) best = std::max(best, precision[i]);
    sum += best;
  }
  return sum / 101.0;
}

}  // namespace

EvalResult evaluate(const std::vector<ResultTrack>& predictions,
                    const GroundTruthDataset& gt, const EvalConfig& cfg) {
  check_config(cfg);

  std::map<int, const VideoInfo*> videos;
  for (const auto& v : gt.videos) videos[v.id] = &v;
  std::set<int> known_categories;
  for (const auto& c : gt.categories) known_categories.insert(c.id);

  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    auto vit = videos.find(p.video_id);
    if (vit == videos.end())
      throw std::invalid_argument("prediction " + std::to_string(i) +
                                  " references unknown video " +
                                  std::to_string(p.video_id));
    if (!known_categories.count(p.category_id))
      throw std::invalid_argument("prediction " + std::to_string(i) +
                                  " references unknown category " +
                                  std::to_string(p.category_id));
    for (const auto& seg : p.segmentations)
      if (seg && (seg->height != vit->second->height ||
                  seg->width != vit->second->width))
        throw std::invalid_argument("prediction " + std::to_string(i) +
                                    " mask size does not match video " +
                                    std::to_string(p.video_id));
  }

  // Group ground truth and predictions per (video, category).
  std::map<std::pair<int, int>, Block> blocks;
  std::map<int, int> npos;
  for (std::size_t g = 0; g < gt.instances.size(); ++g) {
    const auto& inst = gt.instances[g];
    blocks[{inst.video_id, inst.category_id}].gts.push_back(int(g));
    npos[inst.category_id] += 1;
  }
  for (std::size_t i = 0; i < predictions.size(); ++i)
    blocks[{predictions[i].video_id, predictions[i].category_id}].preds.push_back(int(i));

  auto score_order = [&](int a, int b) {
    if (predictions[a].score != predictions[b].score)
      return predictions[a].score > predictions[b].score;
    return a < b;
  };
  for (auto& [key, block] : blocks) {
    std::sort(block.preds.begin(), block.preds.end(), score_order);
    block.iou.assign(block.preds.size(),
                     std::vector<double>(block.gts.size(), 0.0));
    for (std::size_t pi = 0; pi < block.preds.size(); ++pi)
      for (std::size_t gi = 0; gi < block.gts.size(); ++gi)
        block.iou[pi][gi] =
            st_iou(predictions[block.preds[pi]].segmentations,
                   gt.instances[block.gts[gi]].segmentations);
  }

  // Per-video rank of every prediction (score desc, input order): AR@k keeps
  // the k best-ranked predictions of each video.
  std::map<int, std::vector<int>> preds_by_video;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    preds_by_video[predictions[i].video_id].push_back(int(i));
  std::vector<int> rank_in_video(predictions.size(), 0);
  for (auto& [vid, idxs] : preds_by_video) {
    std::sort(idxs.begin(), idxs.end(), score_order);
    for (std::size_t r = 0; r < idxs.size(); ++r) rank_in_video[idxs[r]] = int(r);
  }

  std::vector<int> eval_categories;
  for (const auto& [cat, count] : npos) {
    if (count == 0) continue;
    if (cfg.categories &&
        std::find(cfg.categories->begin(), cfg.categories->end(), cat) ==
            cfg.categories->end())
      continue;
    eval_categories.push_back(cat);
  }

  const int k_ap = *std::max_element(cfg.max_dets.begin(), cfg.max_dets.end());

  // Greedy matching of one (category, threshold, cap) cell. Returns the
  // selected predictions in match order with their TP flags.
  struct MatchOutcome {
    int matched = 0;
    std::vector<std::pair<int, char>> selected;  // (pred index, is TP)
  };
  auto match_cell = [&](int category, double threshold, int cap) {
    MatchOutcome outcome;
    for (auto& [key, block] : blocks) {
      if (key.second != category || block.preds.empty()) continue;
      std::vector<char> gt_matched(block.gts.size(), 0);
      for (std::size_t pi = 0; pi < block.preds.size(); ++pi) {
        int pred_idx = block.preds[pi];
        if (rank_in_video[pred_idx] >= cap) continue;
        int best_gi = -1;
        double best_iou = -1.0;
        for (std::size_t gi = 0; gi < block.gts.size(); ++gi) {
          if (gt_matched[gi]) continue;
          double iou = block.iou[pi][gi];
          if (iou >= threshold && iou > best_iou) {
            best_iou = iou;
            best_gi = int(gi);
          }
        }
        if (best_gi >= 0) {
          gt_matched[best_gi] = 1;
          outcome.matched += 1;
        }
        outcome.selected.push_back({pred_idx, char(best_gi >= 0)});
      }
    }
    return outcome;
  };

  const std::size_t n_thresholds = cfg.iou_thresholds.size();
  std::map<int, std::vector<double>> ap_table;  // category -> per-threshold AP
  std::map<int, double> ar_sums;                // cap -> Σ recall
  for (int category : eval_categories) {
    auto& aps = ap_table[category];
    aps.assign(n_thresholds, 0.0);
    for (std::size_t ti = 0; ti < n_thresholds; ++ti) {
      const double threshold = cfg.iou_thresholds[ti];
      for (int cap : cfg.max_dets) {
        auto outcome = match_cell(category, threshold, cap);
        ar_sums[cap] += npos[category] > 0
                            ? double(outcome.matched) / npos[category]
                            : 0.0;
      }
      auto outcome = match_cell(category, threshold, k_ap);
      std::sort(outcome.selected.begin(), outcome.selected.end(),
                [&](const auto& a, const auto& b) {
                  return score_order(a.first, b.first);
                });
      std::vector<double> precision, recall;
      int tp = 0;
      for (std::size_t i = 0; i < outcome.selected.size(); ++i) {
        tp += outcome.selected[i].second ? 1 : 0;
        precision.push_back(double(tp) / double(i + 1));
        recall.push_back(double(tp) / double(npos[category]));
      }
      aps[ti] = ap_101_point(precision, recall);
    }
  }

  EvalResult result;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::size_t n_cells = eval_categories.size() * n_thresholds;
  double map_sum = 0.0;
  std::vector<double> threshold_sums(n_thresholds, 0.0);
  for (int category : eval_categories) {
    double cat_sum = 0.0;
    for (std::size_t ti = 0; ti < n_thresholds; ++ti) {
      map_sum += ap_table[category][ti];
      threshold_sums[ti] += ap_table[category][ti];
      cat_sum += ap_table[category][ti];
    }
    result.per_category.push_back(
        {category, cat_sum / double(n_thresholds)});
  }
  result.map = n_cells > 0 ? map_sum / double(n_cells) : 0.0;

  auto ap_at = [&](double threshold) {
    for (std::size_t ti = 0; ti < n_thresholds; ++ti)
      if (std::abs(cfg.iou_thresholds[ti] - threshold) < 1e-9)
        return eval_categories.empty()
                   ? 0.0
                   : threshold_sums[ti] / double(eval_categories.size());
    return nan;
  };
  result.ap50 = ap_at(0.50);
  result.ap75 = ap_at(0.75);

  result.ar1 = nan;
  result.ar10 = nan;
  for (int cap : cfg.max_dets) {
    double ar = n_cells > 0 ? ar_sums[cap] / double(n_cells) : 0.0;
    result.ar_by_max_dets.push_back({cap, ar});
    if (cap == 1) result.ar1 = ar;
    if (cap == 10) result.ar10 = ar;
  }
  return result;
}

}  // namespace vistrack
