// fixtures.hpp - canonical worlds and configs shared by the unit and
// acceptance suites.

#pragma once

#include "pixelnav/config.hpp"
#include "pixelnav/episode.hpp"
#include "pixelnav/simworld.hpp"
#include "pixelnav/topograph.hpp"

namespace pixelnav::fixtures {

inline CameraModel test_camera() {
  CameraModel cam;
  cam.fx = 100.0;
  cam.fy = 100.0;
  cam.cx = 160.0;
  cam.cy = 120.0;
  cam.h_cam = 0.35;  // fy * h_cam = 35: the bottom image row sits at ~0.29 m
  cam.width = 320;
  cam.height = 240;
  return cam;
}

/// Open hall with a straight 9 m expert path down the middle. Wide enough
/// that the controller can detour around a mid-path target obstacle.
inline WorldModel hall_world() {
  WorldModel w;
  w.bounds = {{-1.5, -3.0}, {11.0, 3.0}};
  w.robot_radius = 0.35;
  w.fov_range = 12.0;
  w.camera = test_camera();
  w.start_pose = {0.0, 0.0, 0.0};
  w.goal_region = {{9.0, 0.0}, 0.5};
  w.expert_waypoints = {{0.0, 0.0}, {9.0, 0.0}};
  return w;
}

/// The perturbation used against hall_world: a tall marker dropped onto the
/// expert line.
inline Obstacle hall_target_obstacle() {
  Obstacle obs;
  obs.shape = CircleShape{{4.5, 0.0}, 0.35};
  obs.is_target = true;
  return obs;
}

/// Narrow dead-end corridor; the matching perturbation below walls off
/// everything in front of the start pose.
inline WorldModel blocked_corridor_world() {
  WorldModel w;
  w.bounds = {{-1.0, -1.0}, {6.0, 1.0}};
  w.robot_radius = 0.2;
  w.fov_range = 12.0;
  w.camera = test_camera();
  w.start_pose = {0.0, 0.0, 0.0};
  w.goal_region = {{5.0, 0.0}, 0.5};
  w.expert_waypoints = {{0.0, 0.0}, {5.0, 0.0}};
  return w;
}

/// Slab covering the corridor from just outside the camera's nearest ground
/// row (0.29 m at the test camera) to the far wall: nothing traversable
/// remains in view, so the planner has no escape by construction.
inline Obstacle blocking_slab() {
  Obstacle obs;
  obs.shape = PolygonShape{{{0.28, -1.0}, {6.0, -1.0}, {6.0, 1.0}, {0.28, 1.0}}};
  obs.is_target = true;
  return obs;
}

/// Records the world's expert waypoints and builds the graph in the
/// scale-free frame (positions multiplied by `scale`).
inline TopoGraph make_expert_graph(const WorldModel& world, double scale,
                                   int downsample_stride = 6) {
  RecorderParams rec;
  const std::vector<Pose2> poses = record_expert_path(world, world.expert_waypoints, rec);
  std::vector<Vec2> positions;
  positions.reserve(poses.size());
  for (const Pose2& p : poses) positions.push_back({p.x * scale, p.y * scale});
  GraphBuildParams params;
  params.downsample_stride = downsample_stride;
  return build_graph(positions, params);
}

/// Episode defaults for the fixture worlds.
inline EpisodeConfig hall_episode_config(std::uint64_t seed) {
  EpisodeConfig cfg;
  cfg.seed = seed;
  cfg.max_steps = 2000;
  cfg.d_goal = 1.2;  // hall-scale goal tolerance: r_safe keeps detours wide
  cfg.d_lost = 5.0;
  return cfg;
}

inline EpisodeConfig blocked_episode_config(std::uint64_t seed) {
  EpisodeConfig cfg;
  cfg.seed = seed;
  cfg.max_steps = 120;
  cfg.perturbation = blocking_slab();
  return cfg;
}

}  // namespace pixelnav::fixtures
