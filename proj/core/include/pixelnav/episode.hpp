// episode.hpp - closed-loop runner: relocalize on a fixed cadence, render
// oracle perception, pick the subgoal pixel, plan with MPPI, step the true
// pose, and account collisions / freezes / goal progress per the evaluation
// protocol.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pixelnav/controller.hpp"
#include "pixelnav/simworld.hpp"
#include "pixelnav/subgoal.hpp"
#include "pixelnav/topograph.hpp"

namespace pixelnav {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySuite : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EpisodeConfig {
  std::string world_file;
  std::string graph_file;
  int goal_node = -1;  // -1 selects the last node
  int max_steps = 2000;
  int reloc_period = 10;  // relocalization cadence, control steps
  int l_sg = 2;           // subgoal node offset along the path
  double v_freeze = 0.02; // freeze speed threshold, m/s
  int t_freeze = 15;      // freeze window, consecutive steps
  double d_goal = 0.5;    // goal tolerance around the goal node, meters
  double d_lost = 5.0;    // lost threshold to the nearest node, meters
  double world_scale = 1.7;  // recording-frame scale; node poses divide by it
                             // for the metric goal/lost checks
  double sigma_pos = 0.0;    // oracle localization noise
  double sigma_alpha = 0.0;  // oracle yaw noise
  int n_per_contour = 32;    // obstacle points sampled per contour
  std::uint64_t seed = 0;
  std::optional<Obstacle> perturbation;  // target obstacle injected into the world
  RayTraceParams ray;
  MppiConfig mppi;

  void validate() const;  // throws ConfigError
};

struct TrajectoryPoint {
  int t = 0;
  Pose2 pose;            // true world pose after applying the control
  ControlInput control;
  std::string event;     // "", dc:<id>, ic:<id>, freeze, goal, lost
  double expected_cost = 0.0;
};

struct EpisodeMetrics {
  int dc_count = 0;
  int ic_count = 0;
  int target_dc_count = 0;  // direct collisions with the target obstacle
  int freeze_count = 0;
  bool goal_reached = false;
  int steps = 0;
  std::vector<TrajectoryPoint> trajectory;
};

struct SuiteMetrics {
  double adc = 0.0;   // average direct collisions per run
  double aic = 0.0;   // average indirect collisions per run
  double af = 0.0;    // average freezes per run
  double tdcr = 0.0;  // fraction of perturbation runs with a target hit
  double grr = 0.0;   // goal reaching rate
};

/// Runs one episode against in-memory world and graph. The perturbation
/// obstacle, when configured, is appended to the world (flagged as target).
EpisodeMetrics run_episode(const WorldModel& world, const TopoGraph& graph,
                           const EpisodeConfig& cfg);

/// File-loading variant; wraps load failures in ConfigError.
EpisodeMetrics run_episode(const EpisodeConfig& cfg);

/// Aggregates per-run metrics; perturbation_flags marks which runs had the
/// target obstacle injected. TDCR counts perturbation runs with at least one
/// target hit, over perturbation runs only (0 when there are none).
SuiteMetrics compute_suite_metrics(const std::vector<EpisodeMetrics>& runs,
                                   const std::vector<bool>& perturbation_flags);

// --- log formats -----------------------------------------------------------

/// CSV with header t,x,y,theta,v,w,event; numbers in shortest round-trip
/// decimal form, so identical runs serialize byte-identically.
std::string trajectory_to_csv(const EpisodeMetrics& metrics);
void save_trajectory_csv(const EpisodeMetrics& metrics, const std::string& path);

/// Per-step planner cost trace: CSV with header t,expected_cost,v,w.
std::string costs_to_csv(const EpisodeMetrics& metrics);

/// Single-run summary (JSON).
std::string metrics_to_json(const EpisodeMetrics& metrics);

/// Suite summary (JSON): the five aggregate metrics plus a per-run breakdown.
std::string suite_summary_json(const SuiteMetrics& suite, const std::vector<EpisodeMetrics>& runs,
                               const std::vector<bool>& perturbation_flags,
                               const std::vector<std::uint64_t>& seeds);

}  // namespace pixelnav
