// pixelnav_cli.cpp - command-line front end: record expert runs, build
// graphs, run episodes and suites, and emit plot-ready artifacts. Every
// command is a thin wrapper over the library; exit codes are 0 (ok),
// 2 (config error), 3 (runtime error).

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pixelnav/config.hpp"
#include "pixelnav/episode.hpp"
#include "pixelnav/rng.hpp"
#include "pixelnav/simworld.hpp"
#include "pixelnav/subgoal.hpp"
#include "pixelnav/topograph.hpp"
#include "pixelnav/traversability.hpp"

namespace fs = std::filesystem;
using namespace pixelnav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Config file (JSON)");
  cmd->add_option("--override", args.overrides, "Dotted-key override, e.g. mppi.lambda=2.0")
      ->take_all();
  cmd->add_option("--out", args.out, "Output file or directory");
  cmd->add_option("--seed", args.seed, "Seed override")->each([&](const std::string&) {
    args.seed_set = true;
  });
}

RunConfig effective_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
  for (const std::string& ov : args.overrides) apply_override(cfg, ov);
  if (args.seed_set) cfg.seed = args.seed;
  cfg.validate();
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
}

std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// --- record ---------------------------------------------------------------

std::vector<Vec2> load_waypoints(const std::string& path) {
  const nlohmann::json j = nlohmann::json::parse(read_file(path));
  std::vector<Vec2> wps;
  for (const auto& jw : j) wps.push_back({jw.at(0).get<double>(), jw.at(1).get<double>()});
  return wps;
}

int cmd_record(const CommonArgs& common, const std::string& world_path,
               const std::string& waypoints_path) {
  const RunConfig cfg = effective_config(common);
  const WorldModel world = load_world(world_path.empty() ? cfg.world_file : world_path);
  const std::vector<Vec2> waypoints =
      waypoints_path.empty() ? world.expert_waypoints : load_waypoints(waypoints_path);

  const std::vector<Pose2> poses = record_expert_path(world, waypoints, cfg.record);

  // Emulate the scale-free recording frame: positions carry the factor, the
  // headings are scale-free already.
  nlohmann::json j;
  j["scale"] = cfg.world_scale;
  j["poses"] = nlohmann::json::array();
  for (const Pose2& p : poses) {
    j["poses"].push_back({p.x * cfg.world_scale, p.y * cfg.world_scale, p.theta});
  }
  write_file(common.out, j.dump(2) + "\n");
  std::cout << "recorded " << poses.size() << " poses -> " << common.out << "\n";
  return kExitOk;
}

// --- build-graph ------------------------------------------------------------

int cmd_build_graph(const CommonArgs& common, const std::string& poses_path) {
  const RunConfig cfg = effective_config(common);
  const nlohmann::json j = nlohmann::json::parse(read_file(poses_path));
  std::vector<Vec2> positions;
  for (const auto& jp : j.at("poses")) {
    positions.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
  }
  const TopoGraph graph = build_graph(positions, cfg.graph_build);
  save_graph(graph, common.out);
  std::cout << "graph: " << graph.nodes.size() << " nodes, " << graph.edges.size() << " edges -> "
            << common.out << "\n";
  return kExitOk;
}

// --- run ---------------------------------------------------------------------

void write_run_artifacts(const fs::path& dir, const EpisodeMetrics& m) {
  fs::create_directories(dir);
  write_file((dir / "trajectory.csv").string(), trajectory_to_csv(m));
  write_file((dir / "costs.csv").string(), costs_to_csv(m));
  write_file((dir / "metrics.json").string(), metrics_to_json(m) + "\n");
}

int cmd_run(const CommonArgs& common, const std::string& world_path, const std::string& graph_path,
            int goal_node, bool goal_set) {
  RunConfig cfg = effective_config(common);
  if (!world_path.empty()) cfg.world_file = world_path;
  if (!graph_path.empty()) cfg.graph_file = graph_path;
  if (goal_set) cfg.goal_node = goal_node;

  const EpisodeMetrics m = run_episode(cfg.episode_config());
  write_run_artifacts(common.out, m);
  std::cout << "goal_reached=" << (m.goal_reached ? 1 : 0) << " dc=" << m.dc_count
            << " ic=" << m.ic_count << " target_dc=" << m.target_dc_count
            << " freezes=" << m.freeze_count << " steps=" << m.steps << "\n";
  return kExitOk;
}

// --- suite --------------------------------------------------------------------

int cmd_suite(const CommonArgs& common, const std::string& world_path,
              const std::string& graph_path, int trials, bool trials_set) {
  RunConfig cfg = effective_config(common);
  if (!world_path.empty()) cfg.world_file = world_path;
  if (!graph_path.empty()) cfg.graph_file = graph_path;
  const int per_setting = trials_set ? trials : cfg.trials_per_setting;
  if (per_setting < 1) throw ConfigError("suite: trials must be >= 1");

  // Setting 0 is the unperturbed environment; each configured perturbation
  // adds another block of trials.
  std::vector<std::optional<Obstacle>> settings{std::nullopt};
  for (const Obstacle& obs : cfg.suite_perturbations) settings.emplace_back(obs);

  const WorldModel world = load_world(cfg.world_file);
  const TopoGraph graph = load_graph(cfg.graph_file);

  std::vector<EpisodeMetrics> runs;
  std::vector<bool> flags;
  std::vector<std::uint64_t> seeds;
  int run_idx = 0;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    for (int trial = 0; trial < per_setting; ++trial) {
      EpisodeConfig ep = cfg.episode_config();
      ep.perturbation = settings[s];
      ep.seed = derive_seed(cfg.seed, 0x73756974 /*suit*/, s * 1000 + trial);
      const EpisodeMetrics m = run_episode(world, graph, ep);
      write_run_artifacts(fs::path(common.out) / ("run_" + std::to_string(run_idx)), m);
      runs.push_back(m);
      flags.push_back(settings[s].has_value());
      seeds.push_back(ep.seed);
      ++run_idx;
    }
  }

  const SuiteMetrics suite = compute_suite_metrics(runs, flags);
  fs::create_directories(common.out);
  write_file((fs::path(common.out) / "suite_summary.json").string(),
             suite_summary_json(suite, runs, flags, seeds) + "\n");
  std::cout << "runs=" << runs.size() << " adc=" << suite.adc << " aic=" << suite.aic
            << " tdcr=" << suite.tdcr << " af=" << suite.af << " grr=" << suite.grr << "\n";
  return kExitOk;
}

// --- plot ------------------------------------------------------------------

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  return rows;
}

int cmd_plot(const CommonArgs& common, const std::string& log_path, const std::string& costs_path,
             const std::string& world_path) {
  fs::create_directories(common.out);

  // Trajectory polyline: t x y theta, one sample per line.
  const auto rows = read_csv(log_path);
  std::string traj = "# t x y theta\n";
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() < 4) continue;
    traj += rows[i][0] + " " + rows[i][1] + " " + rows[i][2] + " " + rows[i][3] + "\n";
  }
  write_file((fs::path(common.out) / "plot_trajectory.dat").string(), traj);

  // Obstacle outlines and bounds, blank-line separated blocks.
  if (!world_path.empty()) {
    const WorldModel world = load_world(world_path);
    std::string obs = "# obstacle outlines (x y), blocks separated by blank lines\n";
    obs += fmt(world.bounds.min.x) + " " + fmt(world.bounds.min.y) + "\n" +
           fmt(world.bounds.max.x) + " " + fmt(world.bounds.min.y) + "\n" +
           fmt(world.bounds.max.x) + " " + fmt(world.bounds.max.y) + "\n" +
           fmt(world.bounds.min.x) + " " + fmt(world.bounds.max.y) + "\n" +
           fmt(world.bounds.min.x) + " " + fmt(world.bounds.min.y) + "\n";
    for (const Obstacle& o : world.obstacles) {
      obs += "\n";
      if (const auto* c = std::get_if<CircleShape>(&o.shape)) {
        constexpr int kSeg = 64;
        for (int k = 0; k <= kSeg; ++k) {
          const double a = 2.0 * kPi * k / kSeg;
          obs += fmt(c->center.x + c->radius * std::cos(a)) + " " +
                 fmt(c->center.y + c->radius * std::sin(a)) + "\n";
        }
      } else {
        const auto& poly = std::get<PolygonShape>(o.shape);
        for (const Vec2& v : poly.vertices) obs += fmt(v.x) + " " + fmt(v.y) + "\n";
        obs += fmt(poly.vertices.front().x) + " " + fmt(poly.vertices.front().y) + "\n";
      }
    }
    write_file((fs::path(common.out) / "plot_obstacles.dat").string(), obs);
  }

  // Per-step cost trace.
  if (!costs_path.empty()) {
    const auto cost_rows = read_csv(costs_path);
    std::string costs = "# t expected_cost v w\n";
    for (std::size_t i = 1; i < cost_rows.size(); ++i) {
      if (cost_rows[i].size() < 4) continue;
      costs += cost_rows[i][0] + " " + cost_rows[i][1] + " " + cost_rows[i][2] + " " +
               cost_rows[i][3] + "\n";
    }
    write_file((fs::path(common.out) / "plot_costs.dat").string(), costs);
  }
  std::cout << "plot data -> " << common.out << "\n";
  return kExitOk;
}

// --- export-mask --------------------------------------------------------------

Pose2 parse_pose(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::vector<double> vals;
  while (std::getline(ss, part, ',')) vals.push_back(std::stod(part));
  if (vals.size() != 3) throw ConfigError("pose must be x,y,theta");
  return {vals[0], vals[1], vals[2]};
}

int cmd_export_mask(const CommonArgs& common, const std::string& world_path,
                    const std::string& pose_text, double alpha, bool with_subgoal) {
  const RunConfig cfg = effective_config(common);
  const WorldModel world = load_world(world_path.empty() ? cfg.world_file : world_path);
  const Pose2 pose = pose_text.empty() ? world.start_pose : parse_pose(pose_text);
  const TraversabilityMask mask = render_traversability_mask(world, {pose, world.camera});

  if (!with_subgoal) {
    save_mask_pgm(mask, common.out);
  } else {
    // Debug overlay: traversable 255, blocked 0, subgoal pixel cross 128.
    const SubgoalPixel sg = select_subgoal_pixel(mask, world.camera, alpha, cfg.ray);
    std::ofstream os(common.out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + common.out);
    os << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
    const int su = static_cast<int>(sg.p.u);
    const int sv = static_cast<int>(sg.p.v);
    for (int v = 0; v < mask.height(); ++v) {
      for (int u = 0; u < mask.width(); ++u) {
        const bool mark = (u == su && std::abs(v - sv) <= 2) || (v == sv && std::abs(u - su) <= 2);
        os.put(static_cast<char>(mark ? 128 : (mask.at(u, v) ? 255 : 0)));
      }
    }
  }
  std::cout << "mask -> " << common.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical vision-only navigation: topological planning, "
               "traversability-driven subgoal pixels, and an MPPI controller, "
               "with a deterministic 2D simulator"};
  app.require_subcommand(1);

  CommonArgs rec_args, build_args, run_args, suite_args, plot_args, mask_args;
  std::string world_path, graph_path, waypoints_path, poses_path;
  std::string plot_log, plot_costs, plot_world;
  std::string mask_world, mask_pose;
  double mask_alpha = 0.0;
  bool mask_subgoal = false;
  int goal_node = -1;
  bool goal_set = false;
  int trials = 3;
  bool trials_set = false;

  CLI::App* rec = app.add_subcommand("record", "Record a scripted expert run along waypoints");
  add_common(rec, rec_args);
  rec->add_option("--world", world_path, "World file (JSON)");
  rec->add_option("--waypoints", waypoints_path, "Waypoint file (JSON [[x,y],...]); defaults to the world's expert_waypoints");

  CLI::App* build = app.add_subcommand("build-graph", "Build a topological graph from a pose file");
  add_common(build, build_args);
  build->add_option("--poses", poses_path, "Pose file produced by `record`")->required();

  CLI::App* run = app.add_subcommand("run", "Run one closed-loop episode");
  add_common(run, run_args);
  run->add_option("--world", world_path, "World file (JSON)");
  run->add_option("--graph", graph_path, "Graph file (JSON)");
  run->add_option("--goal", goal_node, "Goal node id (default: last node)")
      ->each([&](const std::string&) { goal_set = true; });

  CLI::App* suite = app.add_subcommand("suite", "Run the evaluation protocol (no-perturbation + perturbation trials)");
  add_common(suite, suite_args);
  suite->add_option("--world", world_path, "World file (JSON)");
  suite->add_option("--graph", graph_path, "Graph file (JSON)");
  suite->add_option("--trials", trials, "Trials per setting")->each([&](const std::string&) {
    trials_set = true;
  });

  CLI::App* plot = app.add_subcommand("plot", "Emit plot-ready columnar data from run logs");
  add_common(plot, plot_args);
  plot->add_option("--log", plot_log, "trajectory.csv from `run`")->required();
  plot->add_option("--costs", plot_costs, "costs.csv from `run`");
  plot->add_option("--world", plot_world, "World file for obstacle outlines");

  CLI::App* mask = app.add_subcommand("export-mask", "Render the oracle traversability mask to PGM");
  add_common(mask, mask_args);
  mask->add_option("--world", mask_world, "World file (JSON)");
  mask->add_option("--pose", mask_pose, "Viewpoint x,y,theta (default: start_pose)");
  mask->add_option("--alpha", mask_alpha, "Heading for the subgoal overlay (radians)");
  mask->add_flag("--subgoal", mask_subgoal, "Overlay the selected subgoal pixel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    if (rec->parsed()) return cmd_record(rec_args, world_path, waypoints_path);
    if (build->parsed()) return cmd_build_graph(build_args, poses_path);
    if (run->parsed()) return cmd_run(run_args, world_path, graph_path, goal_node, goal_set);
    if (suite->parsed()) return cmd_suite(suite_args, world_path, graph_path, trials, trials_set);
    if (plot->parsed()) return cmd_plot(plot_args, plot_log, plot_costs, plot_world);
    if (mask->parsed())
      return cmd_export_mask(mask_args, mask_world, mask_pose, mask_alpha, mask_subgoal);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}
