#include "vistrack/ensemble.hpp"

#include <algorithm>
#include <stdexcept>

#include "vistrack/mask_ops.hpp"

namespace vistrack {

namespace {

struct Cluster {
  std::vector<Detection> members;
  BoundingBox mean_box;    // score-weighted running mean
  double weight_sum = 0.0;
  double max_score = 0.0;

  void add(const Detection& d) {
    members.push_back(d);
    max_score = std::max(max_score, d.score);
    if (members.size() == 1) {
      mean_box = d.box;
      weight_sum = d.score;
      return;
    }
    double total = weight_sum + d.score;
    if (total <= 0.0) return;  // all zero scores so far: keep the seed box
    // Delta form keeps identical boxes bit-identical through the mean.
    double f = d.score / total;
    mean_box.x1 += f * (d.box.x1 - mean_box.x1);
    mean_box.y1 += f * (d.box.y1 - mean_box.y1);
    mean_box.x2 += f * (d.box.x2 - mean_box.x2);
    mean_box.y2 += f * (d.box.y2 - mean_box.y2);
    weight_sum = total;
  }
};

}  // namespace

std::vector<DetectionCluster> greedy_ensemble_clusters(
    const std::vector<std::vector<Detection>>& per_model,
    const EnsembleParams& p) {
  std::vector<Detection> pooled;
  for (const auto& model : per_model)
    pooled.insert(pooled.end(), model.begin(), model.end());
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.score > b.score;
                   });

  std::vector<Cluster> clusters;
  for (const auto& det : pooled) {
    Cluster* home = nullptr;
    for (auto& cluster : clusters) {
      if (p.same_category_only &&
          cluster.members.front().category_id != det.category_id)
        continue;
      if (box_iou(det.box, cluster.mean_box) > p.cluster_iou) {
        home = &cluster;
        break;
      }
    }
    if (!home) {
      clusters.emplace_back();
      home = &clusters.back();
    }
    home->add(det);
  }

  std::vector<DetectionCluster> out;
  out.reserve(clusters.size());
  for (auto& cluster : clusters) {
    Detection fused = cluster.members.front();  // highest-score member
    fused.box = cluster.mean_box;
    fused.score = cluster.max_score;
    out.push_back({std::move(fused), std::move(cluster.members)});
  }
  return out;
}

std::vector<Detection> greedy_ensemble_boxes(
    const std::vector<std::vector<Detection>>& per_model,
    const EnsembleParams& p) {
  std::vector<Detection> out;
  for (auto& cluster : greedy_ensemble_clusters(per_model, p))
    out.push_back(std::move(cluster.fused));
  return out;
}

Detection ensemble_masks_embeddings(Detection proposal,
                                    const std::vector<RleMask>& masks,
                                    const std::vector<std::vector<double>>& embeddings,
                                    const EnsembleParams& p) {
  if (!masks.empty()) proposal.mask = average_masks(masks, p.mask_bin_threshold);
  if (!embeddings.empty()) {
    const std::size_t dim = embeddings.front().size();
    std::vector<double> mean(dim, 0.0);
    for (const auto& e : embeddings) {
      if (e.size() != dim)
        throw std::invalid_argument("embedding dimension mismatch in ensemble");
      for (std::size_t i = 0; i < dim; ++i) mean[i] += e[i];
    }
    for (auto& v : mean) v /= double(embeddings.size());
    proposal.embedding = std::move(mean);
  }
  return proposal;
}

Detection fuse_cluster_attachments(const DetectionCluster& cluster,
                                   const EnsembleParams& p) {
  std::vector<RleMask> masks;
  std::vector<std::vector<double>> embeddings;
  for (const auto& m : cluster.members) {
    if (m.mask) masks.push_back(*m.mask);
    if (m.has_embedding()) embeddings.push_back(m.embedding);
  }
  return ensemble_masks_embeddings(cluster.fused, masks, embeddings, p);
}

}  // namespace vistrack
