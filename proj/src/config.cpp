#include "vistrack/config.hpp"

#include <cstdlib>
#include <stdexcept>

#include "vistrack/io.hpp"

namespace vistrack {

using nlohmann::json;

namespace {

template <typename T>
void load(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
  PipelineConfig cfg;
  if (j.contains("tracker")) {
    const auto& t = j.at("tracker");
    load(t, "sim_threshold", cfg.tracker.sim_threshold);
    load(t, "init_score", cfg.tracker.init_score);
    load(t, "buffer_ttl", cfg.tracker.buffer_ttl);
    load(t, "embed_momentum", cfg.tracker.embed_momentum);
    load(t, "iou_weight", cfg.tracker.iou_weight);
    load(t, "require_same_category", cfg.tracker.require_same_category);
    load(t, "optimal_assignment", cfg.tracker.optimal_assignment);
  }
  if (j.contains("bitrack")) {
    const auto& b = j.at("bitrack");
    load(b, "enabled", cfg.bitrack_enabled);
    load(b, "thr", cfg.bitrack.thr);
    load(b, "min_valid_frames", cfg.bitrack.min_valid_frames);
  }
  if (j.contains("ensemble")) {
    const auto& e = j.at("ensemble");
    load(e, "cluster_iou", cfg.ensemble.cluster_iou);
    load(e, "same_category_only", cfg.ensemble.same_category_only);
    load(e, "mask_bin_threshold", cfg.ensemble.mask_bin_threshold);
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    load(e, "iou_thresholds", cfg.eval.iou_thresholds);
    load(e, "max_dets", cfg.eval.max_dets);
    if (e.contains("categories") && !e.at("categories").is_null())
      cfg.eval.categories = e.at("categories").get<std::vector<int>>();
  }
  if (j.contains("fusion")) {
    const auto& f = j.at("fusion");
    load(f, "target_classes", cfg.fusion.target_classes);
    load(f, "auxiliary_classes", cfg.fusion.auxiliary_classes);
  }
  if (j.contains("postproc")) {
    const auto& p = j.at("postproc");
    load(p, "min_track_len", cfg.postproc.min_track_len);
  }
  load(j, "workers", cfg.workers);
  if (cfg.workers < 1)
    throw std::invalid_argument("workers must be at least 1");
  if (j.contains("seed") && !j.at("seed").is_null())
    cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

json config_to_json(const PipelineConfig& cfg) {
  json j;
  j["tracker"] = {{"sim_threshold", cfg.tracker.sim_threshold},
                  {"init_score", cfg.tracker.init_score},
                  {"buffer_ttl", cfg.tracker.buffer_ttl},
                  {"embed_momentum", cfg.tracker.embed_momentum},
                  {"iou_weight", cfg.tracker.iou_weight},
                  {"require_same_category", cfg.tracker.require_same_category},
                  {"optimal_assignment", cfg.tracker.optimal_assignment}};
  j["bitrack"] = {{"enabled", cfg.bitrack_enabled},
                  {"thr", cfg.bitrack.thr},
                  {"min_valid_frames", cfg.bitrack.min_valid_frames}};
  j["ensemble"] = {{"cluster_iou", cfg.ensemble.cluster_iou},
                   {"same_category_only", cfg.ensemble.same_category_only},
                   {"mask_bin_threshold", cfg.ensemble.mask_bin_threshold}};
  j["eval"] = {{"iou_thresholds", cfg.eval.iou_thresholds},
               {"max_dets", cfg.eval.max_dets}};
  if (cfg.eval.categories) j["eval"]["categories"] = *cfg.eval.categories;
  j["fusion"] = {{"target_classes", cfg.fusion.target_classes},
                 {"auxiliary_classes", cfg.fusion.auxiliary_classes}};
  j["postproc"] = {{"min_track_len", cfg.postproc.min_track_len}};
  j["workers"] = cfg.workers;
  if (cfg.seed) j["seed"] = *cfg.seed;
  return j;
}

namespace {

// "tracker.sim_threshold=0.4" -> nested JSON assignment. The value is
// parsed as JSON when possible, else taken as a string.
void apply_override(json& doc, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override must look like section.key=value: " +
                                assignment);
  std::string path = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    auto dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos
                                             ? std::string::npos
                                             : dot - start);
    if (key.empty())
      throw std::invalid_argument("bad override path: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = parsed;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace

PipelineConfig load_config(const std::optional<std::string>& path,
                           const std::vector<std::string>& overrides) {
  json doc = json::object();
  if (path) {
    try {
      doc = json::parse(io::read_file(*path));
    } catch (const std::exception& e) {
      throw io::ParseError(*path, 0, e.what());
    }
  }
  for (const auto& assignment : overrides) apply_override(doc, assignment);
  PipelineConfig cfg = config_from_json(doc);
  if (const char* env = std::getenv("VISTRACK_WORKERS")) {
    int workers = std::atoi(env);
    if (workers >= 1) cfg.workers = workers;
  }
  return cfg;
}

}  // namespace vistrack
