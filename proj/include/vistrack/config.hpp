#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vistrack/bitrack.hpp"
#include "vistrack/ensemble.hpp"
#include "vistrack/fusion.hpp"
#include "vistrack/tracker.hpp"
#include "vistrack/vis_eval.hpp"

namespace vistrack {

struct PostprocConfig {
  int min_track_len = 2;  // trackability cutoff for pseudo labels
};

/// Everything the pipeline stages need, grouped per module. Loaded from a
/// JSON file; any field can be overridden with `section.key=value` strings.
struct PipelineConfig {
  TrackerParams tracker;
  BiTrackParams bitrack;
  bool bitrack_enabled = true;
  EnsembleParams ensemble;
  EvalConfig eval = EvalConfig::defaults();
  FusionConfig fusion{40, 0, 0};  // auxiliary_classes must be configured
  PostprocConfig postproc;
  int workers = 1;
  std::optional<std::uint64_t> seed;
};

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& cfg);

/// Loads the config file, layers --set overrides on top, then applies the
/// worker-count environment override (VISTRACK_WORKERS).
PipelineConfig load_config(const std::optional<std::string>& path,
                           const std::vector<std::string>& overrides);

}  // namespace vistrack
