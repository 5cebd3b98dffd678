// simworld.hpp - deterministic 2D synthetic environment: oracle perception
// (ground-truth masks, yaw, localization), collision checking, obstacle
// visibility classification, and a scripted expert recorder.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "pixelnav/geometry.hpp"
#include "pixelnav/subgoal.hpp"
#include "pixelnav/topograph.hpp"
#include "pixelnav/traversability.hpp"

namespace pixelnav {

struct InfeasibleWaypoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CircleShape {
  Vec2 center;
  double radius = 0.0;
};

struct PolygonShape {
  std::vector<Vec2> vertices;  // convex, counterclockwise
};

struct Obstacle {
  std::variant<CircleShape, PolygonShape> shape;
  bool is_target = false;  // perturbation obstacle

  bool contains(const Vec2& p) const;      // closed footprint test
  double distance_to(const Vec2& p) const; // 0 inside, Euclidean outside
};

struct AxisRect {
  Vec2 min;
  Vec2 max;

  bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

struct GoalRegion {
  Vec2 center;
  double radius = 0.5;
};

struct WorldModel {
  AxisRect bounds;
  std::vector<Obstacle> obstacles;
  double robot_radius = 0.3;
  double fov_range = 10.0;  // max visibility range, meters
  CameraModel camera;
  Pose2 start_pose;
  GoalRegion goal_region;
  std::vector<Vec2> expert_waypoints;

  void validate() const;  // throws std::invalid_argument
};

struct SimRobot {
  Pose2 pose;  // world frame
  CameraModel cam;
};

/// Collision report: obstacle index, or -1 for a bounds exit.
struct Collision {
  int obstacle_id = -1;
};

/// Renders the ground-truth traversability mask seen from the robot. Every
/// pixel strictly below the horizon margin is backprojected to the ground,
/// transformed to the world frame, and marked traversable iff it lies inside
/// the bounds and outside every obstacle footprint. Pixels at/above the
/// horizon are non-traversable. Purely deterministic.
TraversabilityMask render_traversability_mask(const WorldModel& world, const SimRobot& robot);

/// Robot disk vs obstacles and bounds, closed conditions (touching counts).
/// A bounds exit reports id -1; obstacle ties resolve to the lowest id, and
/// a simultaneous bounds exit wins (-1 is the lowest id).
std::optional<Collision> check_collision(const WorldModel& world, const Vec2& robot_position);

/// True iff some boundary point of the obstacle lies inside the camera's
/// horizontal FOV cone (half-angle atan(width / (2 fx))) and within
/// fov_range of the robot; both conditions closed. Occlusion by other
/// obstacles is ignored. The boundary is probed at the analytically nearest
/// point plus a dense deterministic sampling.
bool is_obstacle_visible(const WorldModel& world, const SimRobot& robot, int obstacle_id);

/// Nearest graph node to the robot position after adding Gaussian position
/// noise (sigma_pos = 0 draws nothing); ties resolve to the smallest id.
int oracle_localize(const WorldModel& world, const SimRobot& robot, const TopoGraph& graph,
                    double sigma_pos, std::mt19937_64& rng);

/// Simulator-backed TraversabilityEstimator.
class SimTraversabilityOracle : public TraversabilityEstimator {
 public:
  SimTraversabilityOracle(const WorldModel& world, const CameraModel& cam)
      : world_(&world), cam_(cam) {}
  TraversabilityMask estimate(const Pose2& observed_from) override {
    return render_traversability_mask(*world_, {observed_from, cam_});
  }

 private:
  const WorldModel* world_;
  CameraModel cam_;
};

/// Simulator-backed YawEstimator.
class SimYawOracle : public YawEstimator {
 public:
  SimYawOracle(double sigma_alpha, std::uint64_t seed);
  YawEstimate estimate(const Pose2& observed_from, const TopoNode& subgoal_node) override;

 private:
  double sigma_alpha_;
  std::mt19937_64 rng_;
};

// --- expert recording ----------------------------------------------------

struct RecorderParams {
  double speed = 0.8;       // m/s
  double dt = 0.1;          // s per recorded pose
  double lookahead = 0.6;   // pure-pursuit lookahead, m
  double goal_tol = 0.2;    // stop radius around the final waypoint, m
  int max_steps = 20000;

  void validate() const;
};

/// Drives a pure-pursuit follower along the waypoint polyline and records
/// its pose at every step, starting at the first waypoint facing the second.
/// Throws InfeasibleWaypoints when a waypoint lies outside the bounds or
/// inside an obstacle, when the follower collides, or when it fails to reach
/// the final waypoint within max_steps.
std::vector<Pose2> record_expert_path(const WorldModel& world, const std::vector<Vec2>& waypoints,
                                      const RecorderParams& params);

// --- world file format (JSON) ---------------------------------------------

std::string world_to_json(const WorldModel& world);
WorldModel world_from_json(const std::string& text);
void save_world(const WorldModel& world, const std::string& path);
WorldModel load_world(const std::string& path);

}  // namespace pixelnav
