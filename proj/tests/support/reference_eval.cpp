#include "support/reference_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "support/oracles.hpp"

namespace vistrack::testing {

namespace {

std::int64_t grid_area(const Grid& g) {
  std::int64_t a = 0;
  for (const auto& row : g)
    for (int v : row) a += v;
  return a;
}

// Spatio-temporal IoU over aligned frame lists of decoded grids.
double ref_st_iou(const std::vector<std::optional<Grid>>& pred,
                  const std::vector<std::optional<Grid>>& gt) {
  std::int64_t inter = 0, uni = 0;
  std::size_t frames = std::max(pred.size(), gt.size());
  for (std::size_t t = 0; t < frames; ++t) {
    const Grid* p = t < pred.size() && pred[t] ? &*pred[t] : nullptr;
    const Grid* g = t < gt.size() && gt[t] ? &*gt[t] : nullptr;
    if (p && g) {
      for (std::size_t r = 0; r < p->size(); ++r)
        for (std::size_t c = 0; c < (*p)[r].size(); ++c) {
          if ((*p)[r][c] && (*g)[r][c]) ++inter;
          if ((*p)[r][c] || (*g)[r][c]) ++uni;
        }
    } else if (p) {
      uni += grid_area(*p);
    } else if (g) {
      uni += grid_area(*g);
    }
  }
  return uni > 0 ? double(inter) / double(uni) : 0.0;
}

std::vector<std::optional<Grid>> decode_all(
    const std::vector<std::optional<RleMask>>& masks) {
  std::vector<std::optional<Grid>> out;
  for (const auto& m : masks) {
    if (m)
      out.push_back(oracle_decode(*m));
    else
      out.push_back(std::nullopt);
  }
  return out;
}

}  // namespace

RefMetrics reference_evaluate(const std::vector<ResultTrack>& predictions,
                              const GroundTruthDataset& gt,
                              const std::vector<double>& thresholds,
                              const std::vector<int>& max_dets) {
  const int n_preds = int(predictions.size());

  std::vector<std::vector<std::optional<Grid>>> pred_grids, gt_grids;
  for (const auto& p : predictions) pred_grids.push_back(decode_all(p.segmentations));
  for (const auto& g : gt.instances) gt_grids.push_back(decode_all(g.segmentations));

  // All pairwise st-IoUs, computed up front.
  std::vector<std::vector<double>> stiou(n_preds,
                                         std::vector<double>(gt.instances.size(), 0.0));
  for (int p = 0; p < n_preds; ++p)
    for (int g = 0; g < int(gt.instances.size()); ++g)
      if (predictions[p].video_id == gt.instances[g].video_id &&
          predictions[p].category_id == gt.instances[g].category_id)
        stiou[p][g] = ref_st_iou(pred_grids[p], gt_grids[g]);

  // Rank of each prediction within its video, score descending, earlier
  // input first on ties.
  std::vector<int> rank(n_preds, 0);
  for (int p = 0; p < n_preds; ++p) {
    int r = 0;
    for (int q = 0; q < n_preds; ++q) {
      if (q == p || predictions[q].video_id != predictions[p].video_id) continue;
      if (predictions[q].score > predictions[p].score ||
          (predictions[q].score == predictions[p].score && q < p))
        ++r;
    }
    rank[p] = r;
  }

  std::set<int> category_set;
  for (const auto& inst : gt.instances) category_set.insert(inst.category_id);
  std::vector<int> categories(category_set.begin(), category_set.end());
  std::set<int> video_set;
  for (const auto& v : gt.videos) video_set.insert(v.id);

  // Greedy matching of one (category, threshold, cap) cell; returns the
  // per-prediction TP flags (only for selected predictions) and match count.
  auto match = [&](int category, double threshold, int cap,
                   std::vector<char>& tp, std::vector<char>& selected) {
    tp.assign(n_preds, 0);
    selected.assign(n_preds, 0);
    int matched = 0;
    for (int video : video_set) {
      std::vector<int> order;
      for (int p = 0; p < n_preds; ++p)
        if (predictions[p].video_id == video &&
            predictions[p].category_id == category && rank[p] < cap)
          order.push_back(p);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (predictions[a].score != predictions[b].score)
          return predictions[a].score > predictions[b].score;
        return a < b;
      });
      std::vector<char> gt_used(gt.instances.size(), 0);
      for (int p : order) {
        selected[p] = 1;
        int best_g = -1;
        double best = -1.0;
        for (int g = 0; g < int(gt.instances.size()); ++g) {
          if (gt.instances[g].video_id != video ||
              gt.instances[g].category_id != category || gt_used[g])
            continue;
          if (stiou[p][g] >= threshold && stiou[p][g] > best) {
            best = stiou[p][g];
            best_g = g;
          }
        }
        if (best_g >= 0) {
          gt_used[best_g] = 1;
          tp[p] = 1;
          ++matched;
        }
      }
    }
    return matched;
  };

  const int cap_ap = *std::max_element(max_dets.begin(), max_dets.end());
  RefMetrics out;
  double map_sum = 0.0;
  std::map<double, double> ap_at_threshold;  // threshold -> Σ over categories
  std::map<int, double> ar_sum;
  for (int category : categories) {
    int npos = 0;
    for (const auto& inst : gt.instances)
      if (inst.category_id == category) ++npos;
    for (double threshold : thresholds) {
      std::vector<char> tp, selected;
      for (int cap : max_dets) {
        int matched = match(category, threshold, cap, tp, selected);
        ar_sum[cap] += double(matched) / double(npos);
      }
      match(category, threshold, cap_ap, tp, selected);
      std::vector<int> order;
      for (int p = 0; p < n_preds; ++p)
        if (selected[p]) order.push_back(p);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (predictions[a].score != predictions[b].score)
          return predictions[a].score > predictions[b].score;
        return a < b;
      });
      std::vector<double> precision, recall;
      int hits = 0;
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (tp[order[i]]) ++hits;
        precision.push_back(double(hits) / double(i + 1));
        recall.push_back(double(hits) / double(npos));
      }
      double ap = 0.0;
      for (int j = 0; j <= 100; ++j) {
        double level = j / 100.0;
        double best = 0.0;
        for (std::size_t i = 0; i < recall.size(); ++i)
          if (recall[i] >= level && precision[i] > best) best = precision[i];
        ap += best;
      }
      ap /= 101.0;
      map_sum += ap;
      ap_at_threshold[threshold] += ap;
    }
  }

  const std::size_t cells = categories.size() * thresholds.size();
  out.map = cells > 0 ? map_sum / double(cells) : 0.0;
  auto mean_at = [&](double threshold) {
    if (categories.empty()) return 0.0;
    for (const auto& [t, sum] : ap_at_threshold)
      if (std::abs(t - threshold) < 1e-9) return sum / double(categories.size());
    return std::numeric_limits<double>::quiet_NaN();
  };
  out.ap50 = mean_at(0.50);
  out.ap75 = mean_at(0.75);
  for (int cap : max_dets)
    out.ar.push_back({cap, cells > 0 ? ar_sum[cap] / double(cells) : 0.0});
  return out;
}

}  // namespace vistrack::testing
