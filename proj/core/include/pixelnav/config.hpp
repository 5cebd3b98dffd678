// config.hpp - one flat configuration covering every module, loadable from a
// JSON file with dotted-key overrides. Serves as the reproducible manifest
// behind the CLI commands.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pixelnav/episode.hpp"
#include "pixelnav/simworld.hpp"

namespace pixelnav {

struct RunConfig {
  std::uint64_t seed = 0;
  double world_scale = 1.7;  // recording-frame scale factor (shared by record + episode)

  // Camera defaults; a world file's camera section takes precedence.
  CameraModel camera;

  GraphBuildParams graph_build;
  double traversability_threshold = 0.95;  // applied by learned estimators at the seam
  int n_per_contour = 32;
  RayTraceParams ray;
  double sigma_alpha = 0.0;
  double sigma_pos = 0.0;
  MppiConfig mppi;
  RecorderParams record;

  // Episode settings (file paths come from the episode section or flags).
  std::string world_file;
  std::string graph_file;
  int goal_node = -1;
  int max_steps = 2000;
  int reloc_period = 10;
  int l_sg = 2;
  double v_freeze = 0.02;
  int t_freeze = 15;
  double d_goal = 0.5;
  double d_lost = 5.0;
  std::optional<Obstacle> perturbation;

  int trials_per_setting = 3;
  std::vector<Obstacle> suite_perturbations;

  /// Throws ConfigError with a dotted-path message for the first violated
  /// invariant.
  void validate() const;

  /// Episode view of this config, with the given perturbation (if any).
  EpisodeConfig episode_config() const;
};

/// JSON round trip: load_config(dump_config(c)) reproduces c exactly.
std::string dump_config(const RunConfig& cfg);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);  // ConfigError on parse/file errors

/// Applies a dotted-key override such as "mppi.lambda=2.0". Values parse as
/// JSON when possible and as strings otherwise. Throws ConfigError for
/// unknown keys or malformed values.
void apply_override(RunConfig& cfg, const std::string& key_value);

}  // namespace pixelnav
