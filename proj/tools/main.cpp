#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vistrack/bitrack.hpp"
#include "vistrack/config.hpp"
#include "vistrack/data_tools.hpp"
#include "vistrack/fusion.hpp"
#include "vistrack/io.hpp"
#include "vistrack/mask_ops.hpp"
#include "vistrack/pipeline.hpp"
#include "vistrack/postproc.hpp"
#include "vistrack/vis_eval.hpp"

namespace {

using namespace vistrack;

struct CommonOpts {
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "pipeline config file (JSON)");
    cmd->add_option("--set", overrides,
                    "override a config value, e.g. --set tracker.iou_weight=0.4");
  }

  PipelineConfig load() const { return load_config(config_path, overrides); }
};

// "path" or "path:0.7"
ScaledDetections load_scaled(const std::string& spec) {
  ScaledDetections out;
  std::string path = spec;
  auto colon = spec.rfind(':');
  if (colon != std::string::npos && colon + 1 < spec.size()) {
    try {
      std::size_t used = 0;
      double scale = std::stod(spec.substr(colon + 1), &used);
      if (used == spec.size() - colon - 1 && scale > 0.0) {
        out.scale = scale;
        path = spec.substr(0, colon);
      }
    } catch (const std::exception&) {
      // no scale suffix, the whole spec is the path
    }
  }
  out.records = io::parse_detections(path);
  return out;
}

void require_embeddings(const std::vector<io::DetectionRecord>& records,
                        const std::string& source) {
  for (const auto& r : records)
    if (!r.det.has_embedding())
      throw io::ParseError(source, r.line, "missing embedding");
}

GroundTruthDataset load_valid_gt(const std::string& path) {
  auto gt = io::parse_gt(path);
  auto violations = validate_dataset(gt);
  if (!violations.empty()) {
    std::string msg = "invalid ground truth (" +
                      std::to_string(violations.size()) + " violations)";
    for (const auto& v : violations) msg += "\n  " + v.message();
    throw std::runtime_error(msg);
  }
  return gt;
}

std::map<int, int> gt_lengths(const GroundTruthDataset& gt) {
  std::map<int, int> lengths;
  for (const auto& v : gt.videos) lengths[v.id] = v.length;
  return lengths;
}

int cmd_track(const std::string& dets_path, const std::string& direction,
              const std::optional<std::string>& gt_path,
              const std::string& out_path, const CommonOpts& common) {
  auto cfg = common.load();
  auto records = io::parse_detections(dets_path);
  require_embeddings(records, dets_path);
  std::map<int, int> lengths;
  if (gt_path) lengths = gt_lengths(load_valid_gt(*gt_path));
  auto sets = run_track(records, cfg.tracker, direction_from_string(direction),
                        lengths, cfg.workers);
  io::write_tracksets(out_path, sets);
  std::size_t tracks = 0;
  for (const auto& s : sets) tracks += s.tracklets.size();
  std::cout << "tracked " << sets.size() << " video(s), " << tracks
            << " tracklet(s) -> " << out_path << "\n";
  return 0;
}

int cmd_bitrack(const std::string& fwd_path, const std::string& bwd_path,
                const std::string& out_path, const CommonOpts& common) {
  auto cfg = common.load();
  auto fwd = io::parse_tracksets(fwd_path);
  auto bwd = io::parse_tracksets(bwd_path);
  std::map<int, TrackSet> fwd_by_id, bwd_by_id;
  for (auto& s : fwd) fwd_by_id[s.video_id] = std::move(s);
  for (auto& s : bwd) bwd_by_id[s.video_id] = std::move(s);
  for (const auto& [vid, s] : bwd_by_id)
    if (!fwd_by_id.count(vid)) fwd_by_id[vid] = TrackSet{vid, s.video_length, {}};

  std::vector<TrackSet> merged;
  for (const auto& [vid, f] : fwd_by_id) {
    auto it = bwd_by_id.find(vid);
    TrackSet b = it != bwd_by_id.end() ? it->second
                                       : TrackSet{vid, f.video_length, {}};
    merged.push_back(bitrack_merge(f, b, cfg.bitrack));
  }
  io::write_tracksets(out_path, merged);
  std::cout << "merged " << merged.size() << " video(s) -> " << out_path << "\n";
  return 0;
}

int cmd_postprocess(const std::string& tracks_path, const std::string& out_path,
                    const CommonOpts& common) {
  common.load();  // surfaces config errors even though no keys apply here
  auto sets = io::parse_tracksets(tracks_path);
  for (auto& s : sets) refine_tracks(s);
  io::write_tracksets(out_path, sets);
  std::cout << "postprocessed " << sets.size() << " video(s) -> " << out_path
            << "\n";
  return 0;
}

int cmd_ensemble(const std::vector<std::string>& inputs,
                 const std::optional<std::string>& gt_path,
                 const std::string& out_path, const CommonOpts& common) {
  auto cfg = common.load();
  std::vector<ScaledDetections> models;
  for (const auto& spec : inputs) models.push_back(load_scaled(spec));
  std::optional<GroundTruthDataset> gt;
  if (gt_path) gt = load_valid_gt(*gt_path);
  auto native = native_dims_from(gt, models);
  std::vector<std::vector<io::DetectionRecord>> normalized;
  for (const auto& m : models)
    normalized.push_back(rescale_detections(m, native));
  auto fused = ensemble_models(normalized, cfg.ensemble, cfg.workers);
  io::write_detections(out_path, fused);
  std::cout << "ensembled " << inputs.size() << " input(s) into "
            << fused.size() << " detection(s) -> " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& results_path, const std::string& gt_path,
             const std::optional<std::string>& out_path,
             const CommonOpts& common) {
  auto cfg = common.load();
  auto gt = load_valid_gt(gt_path);
  auto results = io::parse_results(results_path);
  auto metrics = evaluate(results, gt, cfg.eval);
  std::cout << io::format_eval_report(metrics);
  if (out_path)
    io::write_file(*out_path, io::eval_result_to_json(metrics).dump(2) + "\n");
  return 0;
}

int cmd_analyze(const std::string& gt_path, int bins, bool per_object,
                const std::string& out_path) {
  auto gt = load_valid_gt(gt_path);
  auto hist = adjacent_iou_histogram(gt, bins,
                                     per_object ? IouAggregation::per_object
                                                : IouAggregation::video_average);
  io::write_histogram_csv(out_path, hist.edges, hist.counts);
  std::cout << "histogram over " << hist.total() << " value(s) -> " << out_path
            << "\n";
  return 0;
}

int cmd_subsample(const std::string& gt_path, int k,
                  const std::string& out_path) {
  auto gt = load_valid_gt(gt_path);
  auto sub = subsample_frames(gt, k);
  io::write_gt(out_path, sub);
  std::int64_t before = 0, after = 0;
  for (const auto& v : gt.videos) before += v.length;
  for (const auto& v : sub.videos) after += v.length;
  std::printf("kept %lld of %lld frames (%.1f%%) -> %s\n",
              (long long)after, (long long)before,
              before > 0 ? 100.0 * double(after) / double(before) : 0.0,
              out_path.c_str());
  return 0;
}

int cmd_synth_pairs(const std::string& gt_path, double dx, double dy,
                    double rotate, bool flip, const std::string& out_path) {
  auto gt = load_valid_gt(gt_path);
  AffineParams params{dx, dy, rotate, flip};
  nlohmann::json out = nlohmann::json::array();
  int next_track_id = 1;
  auto object_json = [](const ObjectAnnotation& o) {
    nlohmann::json j;
    j["bbox"] = {o.box.x1, o.box.y1, o.box.x2, o.box.y2};
    j["mask"] = o.mask ? io::rle_to_json(*o.mask) : nlohmann::json(nullptr);
    return j;
  };
  for (const auto& video : gt.videos) {
    for (int frame = 0; frame < video.length; ++frame) {
      std::vector<ObjectAnnotation> objects;
      for (const auto& inst : gt.instances) {
        if (inst.video_id != video.id) continue;
        const auto& mask = inst.segmentations[frame];
        const auto& box = inst.bboxes[frame];
        if (!mask && !box) continue;
        ObjectAnnotation obj;
        obj.category_id = inst.category_id;
        obj.mask = mask;
        obj.box = box ? *box : mask_to_box(*mask);
        objects.push_back(std::move(obj));
      }
      if (objects.empty()) continue;
      auto pairs =
          synth_pair(objects, params, video.width, video.height, next_track_id);
      if (pairs.empty()) continue;
      next_track_id = pairs.back().track_id + 1;
      nlohmann::json fj{{"video_id", video.id}, {"frame", frame}};
      fj["objects"] = nlohmann::json::array();
      for (const auto& p : pairs) {
        nlohmann::json pj{{"track_id", p.track_id},
                          {"category_id", p.key.category_id}};
        pj["key"] = object_json(p.key);
        pj["reference"] = object_json(p.reference);
        fj["objects"].push_back(std::move(pj));
      }
      out.push_back(std::move(fj));
    }
  }
  io::write_file(out_path, out.dump(2) + "\n");
  std::cout << "wrote " << out.size() << " frame pair(s) -> " << out_path
            << "\n";
  return 0;
}

int cmd_fuse_labels(const std::string& table_path,
                    const std::optional<std::uint64_t> seed_flag,
                    const std::string& out_path, const CommonOpts& common) {
  auto cfg = common.load();
  if (seed_flag) cfg.seed = seed_flag;
  if (!cfg.seed)
    throw std::runtime_error(
        "fuse-labels draws random labels; a seed is required (--seed or "
        "config 'seed')");
  if (cfg.fusion.auxiliary_classes < 1)
    throw std::runtime_error(
        "fusion.auxiliary_classes (K) must be configured to at least 1");
  FusionConfig fusion = cfg.fusion;
  fusion.seed = *cfg.seed;

  std::vector<std::vector<double>> probs;
  std::vector<int> labels;
  const int columns = fusion.target_classes + fusion.auxiliary_classes;
  std::string contents = io::read_file(table_path);
  std::size_t start = 0;
  int lineno = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    std::string line = contents.substr(
        start, end == std::string::npos ? std::string::npos : end - start);
    start = end == std::string::npos ? contents.size() : end + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    try {
      while (pos < line.size()) {
        std::size_t used = 0;
        row.push_back(std::stod(line.substr(pos), &used));
        pos += used;
        if (pos < line.size() && line[pos] == ',') ++pos;
      }
    } catch (const std::exception&) {
      throw io::ParseError(table_path, lineno, "malformed number");
    }
    if (int(row.size()) != columns + 1)
      throw io::ParseError(table_path, lineno,
                           "expected " + std::to_string(columns) +
                               " scores + 1 label, got " +
                               std::to_string(row.size()) + " fields");
    labels.push_back(int(row.back()));
    row.pop_back();
    probs.push_back(std::move(row));
  }
  auto fused = fuse_labels(probs, labels, fusion);
  std::string out;
  for (int label : fused) out += std::to_string(label) + "\n";
  io::write_file(out_path, out);
  std::cout << "fused " << fused.size() << " label(s) -> " << out_path << "\n";
  return 0;
}

int cmd_pseudo_filter(const std::string& tracks_path, std::optional<int> min_len,
                      const std::string& out_path, const CommonOpts& common) {
  auto cfg = common.load();
  int cutoff = min_len.value_or(cfg.postproc.min_track_len);
  auto sets = io::parse_tracksets(tracks_path);
  std::vector<io::DetectionRecord> records;
  for (const auto& set : sets)
    for (const auto& det : filter_trackable(set, cutoff))
      records.push_back({set.video_id, det, 0});
  io::write_detections_boxes_only(out_path, records);
  std::cout << "kept " << records.size() << " trackable detection(s) -> "
            << out_path << "\n";
  return 0;
}

int cmd_pipeline(const std::vector<std::string>& det_specs,
                 const std::optional<std::string>& gt_path,
                 const std::string& out_dir, bool no_bitrack,
                 const CommonOpts& common) {
  auto cfg = common.load();
  if (no_bitrack) cfg.bitrack_enabled = false;
  std::vector<ScaledDetections> models;
  for (const auto& spec : det_specs) {
    models.push_back(load_scaled(spec));
    require_embeddings(models.back().records, spec);
  }
  std::optional<GroundTruthDataset> gt;
  if (gt_path) gt = load_valid_gt(*gt_path);

  auto run = run_pipeline(models, gt, cfg);

  std::string results_path = out_dir + "/results.json";
  io::write_results(results_path, run.results);
  std::cout << "wrote " << run.results.size() << " result track(s) -> "
            << results_path << "\n";
  if (run.metrics) {
    io::write_file(out_dir + "/metrics.json",
                   io::eval_result_to_json(*run.metrics).dump(2) + "\n");
    std::cout << io::format_eval_report(*run.metrics);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vistrack: video instance segmentation post-detection toolkit"};
  app.require_subcommand(1);

  auto* track = app.add_subcommand("track", "associate detections into tracklets");
  std::string track_dets, track_direction = "forward", track_out;
  std::optional<std::string> track_gt;
  CommonOpts track_common;
  track->add_option("--dets", track_dets, "detections file (JSON lines)")->required();
  track->add_option("--direction", track_direction, "forward or backward")
      ->check(CLI::IsMember({"forward", "backward"}));
  track->add_option("--gt", track_gt, "ground truth file (for video lengths)");
  track->add_option("--out", track_out, "output trackset file")->required();
  track_common.attach(track);

  auto* bitrack = app.add_subcommand("bitrack", "merge forward and backward tracklets");
  std::string bi_fwd, bi_bwd, bi_out;
  CommonOpts bi_common;
  bitrack->add_option("--forward", bi_fwd, "forward trackset file")->required();
  bitrack->add_option("--backward", bi_bwd, "backward trackset file")->required();
  bitrack->add_option("--out", bi_out, "output trackset file")->required();
  bi_common.attach(bitrack);

  auto* postprocess = app.add_subcommand(
      "postprocess", "vote labels and calibrate scores on tracksets");
  std::string pp_tracks, pp_out;
  CommonOpts pp_common;
  postprocess->add_option("--tracks", pp_tracks, "trackset file")->required();
  postprocess->add_option("--out", pp_out, "output trackset file")->required();
  pp_common.attach(postprocess);

  auto* ensemble = app.add_subcommand("ensemble", "merge detections of several models");
  std::vector<std::string> en_inputs;
  std::optional<std::string> en_gt;
  std::string en_out;
  CommonOpts en_common;
  ensemble->add_option("--input", en_inputs,
                       "detections file, optionally path:scale")->required();
  ensemble->add_option("--gt", en_gt, "ground truth (native mask sizes)");
  ensemble->add_option("--out", en_out, "output detections file")->required();
  en_common.attach(ensemble);

  auto* eval_cmd = app.add_subcommand("eval", "compute the metric suite");
  std::string ev_results, ev_gt;
  std::optional<std::string> ev_out;
  CommonOpts ev_common;
  eval_cmd->add_option("--results", ev_results, "results file")->required();
  eval_cmd->add_option("--gt", ev_gt, "ground truth file")->required();
  eval_cmd->add_option("--out", ev_out, "metrics JSON output");
  ev_common.attach(eval_cmd);

  auto* analyze = app.add_subcommand("analyze-redundancy",
                                     "adjacent-frame IoU histogram");
  std::string an_gt, an_out;
  int an_bins = 20;
  bool an_per_object = false;
  analyze->add_option("--gt", an_gt, "ground truth file")->required();
  analyze->add_option("--bins", an_bins, "histogram bins over [0,1]");
  analyze->add_flag("--per-object", an_per_object,
                    "one histogram entry per instance instead of per video");
  analyze->add_option("--out", an_out, "CSV output")->required();

  auto* subsample = app.add_subcommand("subsample", "keep k frames per video");
  std::string ss_gt, ss_out;
  int ss_k = 0;
  subsample->add_option("--gt", ss_gt, "ground truth file")->required();
  subsample->add_option("-k,--frames", ss_k, "frames to keep per video")
      ->required()->check(CLI::PositiveNumber);
  subsample->add_option("--out", ss_out, "output ground truth file")->required();

  auto* synth = app.add_subcommand("synth-pairs",
                                   "pseudo tracking pairs via affine transforms");
  std::string sp_gt, sp_out;
  double sp_dx = 0, sp_dy = 0, sp_rot = 0;
  bool sp_flip = false;
  synth->add_option("--gt", sp_gt, "ground truth file")->required();
  synth->add_option("--dx", sp_dx, "horizontal shift in pixels");
  synth->add_option("--dy", sp_dy, "vertical shift in pixels");
  synth->add_option("--rotate", sp_rot, "rotation in degrees about the center");
  synth->add_flag("--flip", sp_flip, "horizontal flip");
  synth->add_option("--out", sp_out, "output pairs file")->required();

  auto* fuse = app.add_subcommand("fuse-labels",
                                  "relabel auxiliary-class samples");
  std::string fl_table, fl_out;
  std::optional<std::uint64_t> fl_seed;
  CommonOpts fl_common;
  fuse->add_option("--table", fl_table,
                   "CSV with C+K scores and a trailing label per row")->required();
  fuse->add_option("--seed", fl_seed, "RNG seed (required here or in config)");
  fuse->add_option("--out", fl_out, "output label file")->required();
  fl_common.attach(fuse);

  auto* pseudo = app.add_subcommand("pseudo-filter",
                                    "keep detections of long-enough tracklets");
  std::string pf_tracks, pf_out;
  std::optional<int> pf_min_len;
  CommonOpts pf_common;
  pseudo->add_option("--tracks", pf_tracks, "trackset file")->required();
  pseudo->add_option("--min-len", pf_min_len, "minimum tracklet length");
  pseudo->add_option("--out", pf_out, "output detections file")->required();
  pf_common.attach(pseudo);

  auto* pipeline = app.add_subcommand(
      "pipeline", "ensemble + track + bitrack + postprocess + eval");
  std::vector<std::string> pl_dets;
  std::optional<std::string> pl_gt;
  std::string pl_out_dir;
  bool pl_no_bitrack = false;
  CommonOpts pl_common;
  pipeline->add_option("--dets", pl_dets,
                       "detections file, optionally path:scale (repeatable)")
      ->required();
  pipeline->add_option("--gt", pl_gt, "ground truth file (enables evaluation)");
  pipeline->add_option("--out-dir", pl_out_dir, "output directory")->required();
  pipeline->add_flag("--no-bitrack", pl_no_bitrack,
                     "forward tracking only, skip the bidirectional merge");
  pl_common.attach(pipeline);

  CLI11_PARSE(app, argc, argv);

  try {
    if (track->parsed())
      return cmd_track(track_dets, track_direction, track_gt, track_out,
                       track_common);
    if (bitrack->parsed()) return cmd_bitrack(bi_fwd, bi_bwd, bi_out, bi_common);
    if (postprocess->parsed())
      return cmd_postprocess(pp_tracks, pp_out, pp_common);
    if (ensemble->parsed())
      return cmd_ensemble(en_inputs, en_gt, en_out, en_common);
    if (eval_cmd->parsed()) return cmd_eval(ev_results, ev_gt, ev_out, ev_common);
    if (analyze->parsed())
      return cmd_analyze(an_gt, an_bins, an_per_object, an_out);
    if (subsample->parsed()) return cmd_subsample(ss_gt, ss_k, ss_out);
    if (synth->parsed())
      return cmd_synth_pairs(sp_gt, sp_dx, sp_dy, sp_rot, sp_flip, sp_out);
    if (fuse->parsed())
      return cmd_fuse_labels(fl_table, fl_seed, fl_out, fl_common);
    if (pseudo->parsed())
      return cmd_pseudo_filter(pf_tracks, pf_min_len, pf_out, pf_common);
    if (pipeline->parsed())
      return cmd_pipeline(pl_dets, pl_gt, pl_out_dir, pl_no_bitrack, pl_common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
