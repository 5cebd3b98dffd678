#include "pixelnav/episode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "pixelnav/rng.hpp"

namespace pixelnav {

void EpisodeConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("episode." + what); };
  if (max_steps < 1) fail("max_steps must be >= 1");
  if (reloc_period < 1) fail("reloc_period must be >= 1");
  if (l_sg < 1) fail("l_sg must be >= 1");
  if (!(v_freeze > 0.0)) fail("v_freeze must be > 0");
  if (t_freeze < 1) fail("t_freeze must be >= 1");
  if (!(d_goal > 0.0)) fail("d_goal must be > 0");
  if (!(d_lost > 0.0)) fail("d_lost must be > 0");
  if (!(world_scale > 0.0)) fail("world_scale must be > 0");
  if (sigma_pos < 0.0) fail("sigma_pos must be >= 0");
  if (sigma_alpha < 0.0) fail("sigma_alpha must be >= 0");
  if (n_per_contour < 1) fail("n_per_contour must be >= 1");
  try {
    ray.validate();
    mppi.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

namespace {

// Nearest point on the bounds rectangle's boundary; classifies wall contacts
// with the same FOV test as obstacles.
Vec2 nearest_boundary_point(const AxisRect& b, const Vec2& p) {
  const double dl = std::abs(p.x - b.min.x);
  const double dr = std::abs(b.max.x - p.x);
  const double db = std::abs(p.y - b.min.y);
  const double dt = std::abs(b.max.y - p.y);
  const double m = std::min({dl, dr, db, dt});
  if (m == dl) return {b.min.x, std::clamp(p.y, b.min.y, b.max.y)};
  if (m == dr) return {b.max.x, std::clamp(p.y, b.min.y, b.max.y)};
  if (m == db) return {std::clamp(p.x, b.min.x, b.max.x), b.min.y};
  return {std::clamp(p.x, b.min.x, b.max.x), b.max.y};
}

bool point_visible(const WorldModel& world, const SimRobot& robot, const Vec2& p) {
  const Vec2 d = p - robot.pose.position();
  if (d.norm() > world.fov_range + 1e-12) return false;
  const double bearing = wrap_angle(std::atan2(d.y, d.x) - robot.pose.theta);
  return std::abs(bearing) <= robot.cam.fov_half_angle() + 1e-12;
}

// Push the robot out along the contact normal, leaving a gap of two robot
// radii beyond the touching distance ("manual intervention", automated for
// determinism).
Pose2 push_out(const WorldModel& world, const Pose2& pose, const Collision& col) {
  Pose2 out = pose;
  const double clearance = 3.0 * world.robot_radius;  // touch distance + 2 r
  if (col.obstacle_id < 0) {
    out.x = std::clamp(out.x, world.bounds.min.x + clearance, world.bounds.max.x - clearance);
    out.y = std::clamp(out.y, world.bounds.min.y + clearance, world.bounds.max.y - clearance);
    return out;
  }
  const Obstacle& obs = world.obstacles[col.obstacle_id];
  const Vec2 p = pose.position();
  if (const auto* c = std::get_if<CircleShape>(&obs.shape)) {
    Vec2 dir = p - c->center;
    const double n = dir.norm();
    dir = n > 0.0 ? dir * (1.0 / n) : Vec2{1.0, 0.0};
    const Vec2 np = c->center + dir * (c->radius + clearance);
    out.x = np.x;
    out.y = np.y;
    return out;
  }
  const auto& poly = std::get<PolygonShape>(obs.shape);
  // Nearest edge point and its outward normal (away from the centroid).
  Vec2 centroid{0.0, 0.0};
  for (const Vec2& v : poly.vertices) centroid = centroid + v;
  centroid = centroid * (1.0 / poly.vertices.size());
  double best_d = std::numeric_limits<double>::infinity();
  Vec2 best_q, best_n;
  const std::size_t nverts = poly.vertices.size();
  for (std::size_t i = 0; i < nverts; ++i) {
    const Vec2& a = poly.vertices[i];
    const Vec2& b = poly.vertices[(i + 1) % nverts];
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 q = a + ab * t;
    const double d = (p - q).norm();
    if (d < best_d) {
      best_d = d;
      best_q = q;
      Vec2 n{ab.y, -ab.x};
      if (n.dot(q - centroid) < 0.0) n = n * -1.0;
      const double nn = n.norm();
      best_n = nn > 0.0 ? n * (1.0 / nn) : Vec2{1.0, 0.0};
    }
  }
  const Vec2 np = best_q + best_n * clearance;
  out.x = np.x;
  out.y = np.y;
  return out;
}

}  // namespace

EpisodeMetrics run_episode(const WorldModel& base_world, const TopoGraph& graph,
                           const EpisodeConfig& cfg) {
  cfg.validate();
  if (graph.empty()) throw ConfigError("episode: graph is empty");
  const int goal = cfg.goal_node < 0 ? graph.size() - 1 : cfg.goal_node;
  if (goal >= graph.size()) throw ConfigError("episode: goal node out of range");

  WorldModel world = base_world;
  if (cfg.perturbation) {
    Obstacle target = *cfg.perturbation;
    target.is_target = true;
    world.obstacles.push_back(std::move(target));
  }
  world.validate();

  // Metric node positions: recorded poses carry the recording-frame scale.
  std::vector<Vec2> node_metric(graph.nodes.size());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    node_metric[i] = graph.nodes[i].pose.z * (1.0 / cfg.world_scale);
  }

  std::mt19937_64 yaw_rng = make_rng(cfg.seed, rng_stream::kYaw);
  std::mt19937_64 loc_rng = make_rng(cfg.seed, rng_stream::kLocalization);

  EpisodeMetrics metrics;
  Pose2 pose = world.start_pose;
  std::vector<ControlInput> warm(cfg.mppi.horizon_steps);
  int subgoal_node = -1;
  bool in_contact = false;
  int last_event_step = std::numeric_limits<int>::min();
  std::deque<double> speed_window;
  bool freeze_armed = true;
  bool terminate = false;

  for (int t = 0; t < cfg.max_steps && !terminate; ++t) {
    std::string event;

    if (t % cfg.reloc_period == 0) {
      const int loc = oracle_localize(world, {pose, world.camera}, graph, cfg.sigma_pos, loc_rng);
      try {
        const PathSequence path = shortest_path(graph, loc, goal);
        subgoal_node = select_subgoal_node(path, cfg.l_sg);
      } catch (const NoPath&) {
        // Goal is unreachable from the localized node (e.g. the robot ended
        // up past it along the forward-only recording): count as lost.
        metrics.trajectory.push_back({t, pose, {0.0, 0.0}, "lost", 0.0});
        metrics.steps = t + 1;
        return metrics;
      }
    }

    const TraversabilityMask mask = render_traversability_mask(world, {pose, world.camera});
    const YawEstimate yaw =
        oracle_yaw(pose, graph.nodes[subgoal_node], cfg.sigma_alpha, yaw_rng);

    ControlInput u{0.0, 0.0};
    double expected_cost = 0.0;
    if (mask.count_traversable() > 0) {
      const SubgoalPixel sg = select_subgoal_pixel(mask, world.camera, yaw.alpha, cfg.ray);
      const std::vector<Contour> contours = extract_contours(mask);
      const ObstaclePointSet obst_px = sample_obstacle_points(
          contours, world.camera, cfg.n_per_contour,
          derive_seed(cfg.seed, rng_stream::kObstacles, static_cast<std::uint64_t>(t)));
      std::vector<GroundPoint> obst_ground;
      obst_ground.reserve(obst_px.points.size());
      for (const PixelPoint& px : obst_px.points) {
        obst_ground.push_back(backproject_pixel(world.camera, px));
      }
      MppiConfig mppi = cfg.mppi;
      mppi.rng_seed = derive_seed(cfg.seed, rng_stream::kMppi, static_cast<std::uint64_t>(t));
      const PlannerOutput out = mppi_solve({}, world.camera, sg.p, obst_ground, mppi, warm);
      u = out.control;
      warm = out.nominal_sequence;
      expected_cost = out.expected_cost;
    } else {
      // Nothing traversable in view: hold position. Sustained holds surface
      // as freezes below.
      warm.assign(cfg.mppi.horizon_steps, ControlInput{});
    }

    const RobotState next = step_dynamics({pose.x, pose.y, pose.theta}, u, cfg.mppi.dt);
    pose = {next.x, next.y, next.theta};

    // Collision accounting: entering-contact edges only, with a one-step
    // refractory so one physical contact is not multi-counted.
    const std::optional<Collision> col = check_collision(world, pose.position());
    if (col && !in_contact && t > last_event_step + 1) {
      last_event_step = t;
      bool visible;
      bool target_hit = false;
      if (col->obstacle_id >= 0) {
        visible = is_obstacle_visible(world, {pose, world.camera}, col->obstacle_id);
        target_hit = world.obstacles[col->obstacle_id].is_target;
      } else {
        visible = point_visible(world, {pose, world.camera},
                                nearest_boundary_point(world.bounds, pose.position()));
      }
      const std::string id = std::to_string(col->obstacle_id);
      if (visible) {
        ++metrics.dc_count;
        if (target_hit) ++metrics.target_dc_count;
        event = "dc:" + id;
      } else {
        ++metrics.ic_count;
        event = "ic:" + id;
      }
    }
    if (col) {
      pose = push_out(world, pose, *col);
      in_contact = check_collision(world, pose.position()).has_value();
    } else {
      in_contact = false;
    }

    // Freeze detection over a rolling window of commanded speeds; the event
    // re-arms once the mean recovers.
    speed_window.push_back(std::abs(u.v));
    if (static_cast<int>(speed_window.size()) > cfg.t_freeze) speed_window.pop_front();
    if (static_cast<int>(speed_window.size()) == cfg.t_freeze) {
      double mean = 0.0;
      for (const double v : speed_window) mean += v;
      mean /= cfg.t_freeze;
      if (freeze_armed && mean < cfg.v_freeze) {
        ++metrics.freeze_count;
        freeze_armed = false;
        if (event.empty()) event = "freeze";
      } else if (!freeze_armed && mean >= cfg.v_freeze) {
        freeze_armed = true;
      }
    }

    // Termination: goal reached, or lost w.r.t. the graph.
    if ((pose.position() - node_metric[goal]).norm() <= cfg.d_goal) {
      metrics.goal_reached = true;
      if (event.empty() || event == "freeze") event = "goal";
      terminate = true;
    } else {
      double nearest = std::numeric_limits<double>::infinity();
      for (const Vec2& z : node_metric) nearest = std::min(nearest, (pose.position() - z).norm());
      if (nearest > cfg.d_lost) {
        if (event.empty() || event == "freeze") event = "lost";
        terminate = true;
      }
    }

    metrics.trajectory.push_back({t, pose, u, event, expected_cost});
    metrics.steps = t + 1;
  }
  return metrics;
}

EpisodeMetrics run_episode(const EpisodeConfig& cfg) {
  WorldModel world;
  TopoGraph graph;
  try {
    world = load_world(cfg.world_file);
    graph = load_graph(cfg.graph_file);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("episode inputs: ") + e.what());
  }
  return run_episode(world, graph, cfg);
}

SuiteMetrics compute_suite_metrics(const std::vector<EpisodeMetrics>& runs,
                                   const std::vector<bool>& perturbation_flags) {
  if (runs.empty()) throw EmptySuite("no runs to aggregate");
  if (runs.size() != perturbation_flags.size()) {
    throw std::invalid_argument("runs and perturbation_flags must have equal length");
  }
  SuiteMetrics s;
  int pert_runs = 0;
  int pert_hits = 0;
  int reached = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    s.adc += runs[i].dc_count;
    s.aic += runs[i].ic_count;
    s.af += runs[i].freeze_count;
    if (runs[i].goal_reached) ++reached;
    if (perturbation_flags[i]) {
      ++pert_runs;
      if (runs[i].target_dc_count >= 1) ++pert_hits;
    }
  }
  const double n = static_cast<double>(runs.size());
  s.adc /= n;
  s.aic /= n;
  s.af /= n;
  s.grr = reached / n;
  s.tdcr = pert_runs > 0 ? static_cast<double>(pert_hits) / pert_runs : 0.0;
  return s;
}

// --- log formats -------------------------------------------------------------

namespace {

// Shortest round-trip decimal; keeps identical runs byte-identical.
std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string trajectory_to_csv(const EpisodeMetrics& metrics) {
  std::string out = "t,x,y,theta,v,w,event\n";
  for (const TrajectoryPoint& p : metrics.trajectory) {
    out += std::to_string(p.t);
    out += ',';
    out += fmt(p.pose.x);
    out += ',';
    out += fmt(p.pose.y);
    out += ',';
    out += fmt(p.pose.theta);
    out += ',';
    out += fmt(p.control.v);
    out += ',';
    out += fmt(p.control.w);
    out += ',';
    out += p.event;
    out += '\n';
  }
  return out;
}

void save_trajectory_csv(const EpisodeMetrics& metrics, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << trajectory_to_csv(metrics);
}

std::string costs_to_csv(const EpisodeMetrics& metrics) {
  std::string out = "t,expected_cost,v,w\n";
  for (const TrajectoryPoint& p : metrics.trajectory) {
    out += std::to_string(p.t);
    out += ',';
    out += fmt(p.expected_cost);
    out += ',';
    out += fmt(p.control.v);
    out += ',';
    out += fmt(p.control.w);
    out += '\n';
  }
  return out;
}

std::string metrics_to_json(const EpisodeMetrics& m) {
  nlohmann::json j;
  j["dc"] = m.dc_count;
  j["ic"] = m.ic_count;
  j["target_dc"] = m.target_dc_count;
  j["freezes"] = m.freeze_count;
  j["goal_reached"] = m.goal_reached;
  j["steps"] = m.steps;
  return j.dump(2);
}

std::string suite_summary_json(const SuiteMetrics& suite, const std::vector<EpisodeMetrics>& runs,
                               const std::vector<bool>& perturbation_flags,
                               const std::vector<std::uint64_t>& seeds) {
  nlohmann::json j;
  j["adc"] = suite.adc;
  j["aic"] = suite.aic;
  j["af"] = suite.af;
  j["tdcr"] = suite.tdcr;
  j["grr"] = suite.grr;
  j["runs"] = nlohmann::json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    nlohmann::json jr;
    jr["dc"] = runs[i].dc_count;
    jr["ic"] = runs[i].ic_count;
    jr["target_dc"] = runs[i].target_dc_count;
    jr["freezes"] = runs[i].freeze_count;
    jr["goal_reached"] = runs[i].goal_reached;
    jr["steps"] = runs[i].steps;
    jr["perturbation"] = i < perturbation_flags.size() && perturbation_flags[i];
    if (i < seeds.size()) jr["seed"] = seeds[i];
    j["runs"].push_back(std::move(jr));
  }
  return j.dump(2);
}

}  // namespace pixelnav
