#include "pixelnav/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "json_io.hpp"
#include "pixelnav/rng.hpp"

namespace pixelnav {

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

bool point_in_convex_polygon(const Vec2& p, const std::vector<Vec2>& verts) {
  // Closed test; accepts either winding by requiring all cross products to
  // share a sign (zeros allowed for boundary points).
  bool has_pos = false, has_neg = false;
  const std::size_t n = verts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = verts[i];
    const Vec2& b = verts[(i + 1) % n];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross > 0.0) has_pos = true;
    if (cross < 0.0) has_neg = true;
  }
  return !(has_pos && has_neg);
}

}  // namespace

bool Obstacle::contains(const Vec2& p) const {
  if (const auto* c = std::get_if<CircleShape>(&shape)) {
    return (p - c->center).norm() <= c->radius;
  }
  const auto& poly = std::get<PolygonShape>(shape);
  return point_in_convex_polygon(p, poly.vertices);
}

double Obstacle::distance_to(const Vec2& p) const {
  if (const auto* c = std::get_if<CircleShape>(&shape)) {
    return std::max(0.0, (p - c->center).norm() - c->radius);
  }
  const auto& poly = std::get<PolygonShape>(shape);
  if (point_in_convex_polygon(p, poly.vertices)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(p, poly.vertices[i], poly.vertices[(i + 1) % n]));
  }
  return best;
}

void WorldModel::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("world: " + what); };
  if (!(bounds.max.x > bounds.min.x && bounds.max.y > bounds.min.y)) {
    fail("bounds must have positive extent");
  }
  if (!(robot_radius > 0.0)) fail("robot_radius must be > 0");
  if (!(fov_range > 0.0)) fail("fov_range must be > 0");
  camera.validate();
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const std::string tag = "obstacle " + std::to_string(i);
    if (const auto* c = std::get_if<CircleShape>(&obstacles[i].shape)) {
      if (!(c->radius > 0.0)) fail(tag + ": radius must be > 0");
      if (!bounds.contains(c->center)) fail(tag + ": center outside bounds");
    } else {
      const auto& poly = std::get<PolygonShape>(obstacles[i].shape);
      if (poly.vertices.size() < 3) fail(tag + ": polygon needs >= 3 vertices");
      for (const Vec2& v : poly.vertices) {
        if (!bounds.contains(v)) fail(tag + ": vertex outside bounds");
      }
    }
  }
}

TraversabilityMask render_traversability_mask(const WorldModel& world, const SimRobot& robot) {
  const CameraModel& cam = robot.cam;
  TraversabilityMask mask(cam.width, cam.height, false);

  const double c = std::cos(robot.pose.theta);
  const double s = std::sin(robot.pose.theta);

  // First row strictly below the horizon margin.
  const int v_start = static_cast<int>(std::floor(cam.cy + kHorizonMarginPx)) + 1;
  for (int v = std::max(0, v_start); v < cam.height; ++v) {
    // The forward range depends only on the row; the lateral offset is
    // linear in the column.
    const double x = cam.fy * cam.h_cam / (v - cam.cy);
    for (int u = 0; u < cam.width; ++u) {
      const double y = -(u - cam.cx) * x / cam.fx;
      const Vec2 p{robot.pose.x + c * x - s * y, robot.pose.y + s * x + c * y};
      if (!world.bounds.contains(p)) continue;
      bool blocked = false;
      for (const Obstacle& obs : world.obstacles) {
        if (obs.contains(p)) {
          blocked = true;
          break;
        }
      }
      if (!blocked) mask.set(u, v, true);
    }
  }
  return mask;
}

std::optional<Collision> check_collision(const WorldModel& world, const Vec2& p) {
  const double r = world.robot_radius;
  if (p.x - r < world.bounds.min.x || p.x + r > world.bounds.max.x || p.y - r < world.bounds.min.y ||
      p.y + r > world.bounds.max.y) {
    return Collision{-1};
  }
  for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
    if (world.obstacles[i].distance_to(p) <= r) {
      return Collision{static_cast<int>(i)};
    }
  }
  return std::nullopt;
}

namespace {

// Deterministic boundary probes: dense samples plus the point nearest the
// robot, which carries the extreme bearing/range cases.
std::vector<Vec2> boundary_probes(const Obstacle& obs, const Vec2& from) {
  std::vector<Vec2> pts;
  if (const auto* c = std::get_if<CircleShape>(&obs.shape)) {
    constexpr int kN = 360;
    pts.reserve(kN + 1);
    for (int k = 0; k < kN; ++k) {
      const double a = 2.0 * kPi * k / kN;
      pts.push_back({c->center.x + c->radius * std::cos(a),
                     c->center.y + c->radius * std::sin(a)});
    }
    const Vec2 d = from - c->center;
    const double n = d.norm();
    if (n > 0.0) pts.push_back(c->center + d * (c->radius / n));
  } else {
    const auto& poly = std::get<PolygonShape>(obs.shape);
    constexpr int kPerEdge = 64;
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = poly.vertices[i];
      const Vec2& b = poly.vertices[(i + 1) % n];
      for (int k = 0; k < kPerEdge; ++k) {
        const double t = static_cast<double>(k) / kPerEdge;
        pts.push_back(a + (b - a) * t);
      }
      // Nearest point of this edge to the robot.
      const Vec2 ab = b - a;
      const double len2 = ab.dot(ab);
      if (len2 > 0.0) {
        const double t = std::clamp((from - a).dot(ab) / len2, 0.0, 1.0);
        pts.push_back(a + ab * t);
      }
    }
  }
  return pts;
}

}  // namespace

bool is_obstacle_visible(const WorldModel& world, const SimRobot& robot, int obstacle_id) {
  if (obstacle_id < 0 || obstacle_id >= static_cast<int>(world.obstacles.size())) return false;
  const Obstacle& obs = world.obstacles[obstacle_id];
  const Vec2 pos = robot.pose.position();
  const double half_angle = robot.cam.fov_half_angle();
  // Closed conditions at double precision.
  constexpr double kEps = 1e-12;

  for (const Vec2& p : boundary_probes(obs, pos)) {
    const Vec2 d = p - pos;
    const double range = d.norm();
    if (range > world.fov_range + kEps) continue;
    const double bearing = wrap_angle(std::atan2(d.y, d.x) - robot.pose.theta);
    if (std::abs(bearing) <= half_angle + kEps) return true;
  }
  return false;
}

int oracle_localize(const WorldModel& /*world*/, const SimRobot& robot, const TopoGraph& graph,
                    double sigma_pos, std::mt19937_64& rng) {
  Vec2 p = robot.pose.position();
  if (sigma_pos > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma_pos);
    p.x += noise(rng);
    p.y += noise(rng);
  }
  return localize_nearest(graph, p);
}

SimYawOracle::SimYawOracle(double sigma_alpha, std::uint64_t seed)
    : sigma_alpha_(sigma_alpha), rng_(make_rng(seed, rng_stream::kYaw)) {}

YawEstimate SimYawOracle::estimate(const Pose2& observed_from, const TopoNode& subgoal_node) {
  return oracle_yaw(observed_from, subgoal_node, sigma_alpha_, rng_);
}

// --- expert recording ------------------------------------------------------

void RecorderParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("record." + what); };
  if (!(speed > 0.0)) fail("speed must be > 0");
  if (!(dt > 0.0)) fail("dt must be > 0");
  if (!(lookahead > 0.0)) fail("lookahead must be > 0");
  if (!(goal_tol > 0.0)) fail("goal_tol must be > 0");
  if (max_steps < 1) fail("max_steps must be >= 1");
}

namespace {

// Point at arc distance `s` along the polyline (clamped to its end).
Vec2 polyline_point(const std::vector<Vec2>& pts, double s) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double seg = (pts[i + 1] - pts[i]).norm();
    if (s <= seg) {
      if (seg == 0.0) continue;
      return pts[i] + (pts[i + 1] - pts[i]) * (s / seg);
    }
    s -= seg;
  }
  return pts.back();
}

double polyline_progress(const std::vector<Vec2>& pts, const Vec2& p) {
  // Arc distance of the closest polyline point to p.
  double best_d = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double base = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 ab = pts[i + 1] - pts[i];
    const double len2 = ab.dot(ab);
    const double len = std::sqrt(len2);
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp((p - pts[i]).dot(ab) / len2, 0.0, 1.0);
    const double d = (p - (pts[i] + ab * t)).norm();
    if (d < best_d) {
      best_d = d;
      best_s = base + t * len;
    }
    base += len;
  }
  return best_s;
}

}  // namespace

std::vector<Pose2> record_expert_path(const WorldModel& world, const std::vector<Vec2>& waypoints,
                                      const RecorderParams& params) {
  params.validate();
  if (waypoints.size() < 2) throw InfeasibleWaypoints("need at least 2 waypoints");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (!world.bounds.contains(waypoints[i])) {
      throw InfeasibleWaypoints("waypoint " + std::to_string(i) + " outside bounds");
    }
    for (const Obstacle& obs : world.obstacles) {
      if (obs.contains(waypoints[i])) {
        throw InfeasibleWaypoints("waypoint " + std::to_string(i) + " inside an obstacle");
      }
    }
  }

  Pose2 pose{waypoints[0].x, waypoints[0].y,
             std::atan2(waypoints[1].y - waypoints[0].y, waypoints[1].x - waypoints[0].x)};
  std::vector<Pose2> poses{pose};
  if (check_collision(world, pose.position())) {
    throw InfeasibleWaypoints("start waypoint collides");
  }

  for (int step = 0; step < params.max_steps; ++step) {
    if ((pose.position() - waypoints.back()).norm() <= params.goal_tol) {
      return poses;
    }
    const double s = polyline_progress(waypoints, pose.position());
    const Vec2 target = polyline_point(waypoints, s + params.lookahead);
    const double eta =
        wrap_angle(std::atan2(target.y - pose.y, target.x - pose.x) - pose.theta);
    // Pure-pursuit curvature toward the lookahead point.
    const double w = std::clamp(2.0 * params.speed * std::sin(eta) / params.lookahead, -2.5, 2.5);
    pose.x += params.speed * std::cos(pose.theta) * params.dt;
    pose.y += params.speed * std::sin(pose.theta) * params.dt;
    pose.theta = wrap_angle(pose.theta + w * params.dt);
    if (check_collision(world, pose.position())) {
      throw InfeasibleWaypoints("follower collided at step " + std::to_string(step));
    }
    poses.push_back(pose);
  }
  throw InfeasibleWaypoints("follower failed to reach the final waypoint within max_steps");
}

// --- JSON -------------------------------------------------------------------

using detail::obstacle_from_json;
using detail::obstacle_to_json;

std::string world_to_json(const WorldModel& world) {
  nlohmann::json j;
  j["bounds"] = {{"min", {world.bounds.min.x, world.bounds.min.y}},
                 {"max", {world.bounds.max.x, world.bounds.max.y}}};
  j["obstacles"] = nlohmann::json::array();
  for (const Obstacle& obs : world.obstacles) j["obstacles"].push_back(obstacle_to_json(obs));
  j["robot_radius"] = world.robot_radius;
  j["fov_range"] = world.fov_range;
  j["camera"] = {{"fx", world.camera.fx},       {"fy", world.camera.fy},
                 {"cx", world.camera.cx},       {"cy", world.camera.cy},
                 {"h_cam", world.camera.h_cam}, {"width", world.camera.width},
                 {"height", world.camera.height}};
  j["start_pose"] = {world.start_pose.x, world.start_pose.y, world.start_pose.theta};
  j["goal_region"] = {{"center", {world.goal_region.center.x, world.goal_region.center.y}},
                      {"radius", world.goal_region.radius}};
  j["expert_waypoints"] = nlohmann::json::array();
  for (const Vec2& w : world.expert_waypoints) j["expert_waypoints"].push_back({w.x, w.y});
  return j.dump(2);
}

WorldModel world_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  WorldModel world;
  world.bounds.min = {j.at("bounds").at("min").at(0).get<double>(),
                      j.at("bounds").at("min").at(1).get<double>()};
  world.bounds.max = {j.at("bounds").at("max").at(0).get<double>(),
                      j.at("bounds").at("max").at(1).get<double>()};
  for (const auto& jo : j.at("obstacles")) world.obstacles.push_back(obstacle_from_json(jo));
  world.robot_radius = j.at("robot_radius").get<double>();
  world.fov_range = j.at("fov_range").get<double>();
  if (j.contains("camera")) {
    const auto& jc = j.at("camera");
    world.camera.fx = jc.at("fx").get<double>();
    world.camera.fy = jc.at("fy").get<double>();
    world.camera.cx = jc.at("cx").get<double>();
    world.camera.cy = jc.at("cy").get<double>();
    world.camera.h_cam = jc.at("h_cam").get<double>();
    world.camera.width = jc.at("width").get<int>();
    world.camera.height = jc.at("height").get<int>();
  }
  const auto& sp = j.at("start_pose");
  world.start_pose = {sp.at(0).get<double>(), sp.at(1).get<double>(), sp.at(2).get<double>()};
  if (j.contains("goal_region")) {
    world.goal_region.center = {j.at("goal_region").at("center").at(0).get<double>(),
                                j.at("goal_region").at("center").at(1).get<double>()};
    world.goal_region.radius = j.at("goal_region").at("radius").get<double>();
  }
  if (j.contains("expert_waypoints")) {
    for (const auto& jw : j.at("expert_waypoints")) {
      world.expert_waypoints.push_back({jw.at(0).get<double>(), jw.at(1).get<double>()});
    }
  }
  world.validate();
  return world;
}

void save_world(const WorldModel& world, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << world_to_json(world) << "\n";
}

WorldModel load_world(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return world_from_json(ss.str());
}

}  // namespace pixelnav
