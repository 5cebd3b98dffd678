#include <doctest.h>

#include "fixtures.hpp"
#include "pixelnav/episode.hpp"

using namespace pixelnav;
using namespace pixelnav::fixtures;

namespace {

int event_count(const EpisodeMetrics& m, const std::string& prefix) {
  int n = 0;
  for (const TrajectoryPoint& p : m.trajectory) {
    if (p.event.rfind(prefix, 0) == 0) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("straight hall: goal reached without collisions") {
  const WorldModel world = hall_world();
  const TopoGraph graph = make_expert_graph(world, 1.7);
  EpisodeConfig cfg = hall_episode_config(1);
  cfg.d_goal = 0.5;  // nothing deflects the robot in an empty hall
  cfg.mppi.num_samples = 256;
  const EpisodeMetrics m = run_episode(world, graph, cfg);
  CHECK(m.goal_reached);
  CHECK(m.dc_count == 0);
  CHECK(m.ic_count == 0);
  CHECK(m.target_dc_count == 0);
  CHECK(m.trajectory.back().event == "goal");
}

TEST_CASE("fully blocked corridor: at least one freeze and zero collisions") {
  const WorldModel world = blocked_corridor_world();
  const TopoGraph graph = make_expert_graph(world, 1.7);
  const EpisodeMetrics m = run_episode(world, graph, blocked_episode_config(3));
  CHECK(m.freeze_count >= 1);
  CHECK(m.dc_count == 0);
  CHECK(m.ic_count == 0);
  CHECK(!m.goal_reached);
  CHECK(event_count(m, "freeze") == m.freeze_count);
}

TEST_CASE("max_steps = 1 terminates after one step") {
  const WorldModel world = blocked_corridor_world();
  const TopoGraph graph = make_expert_graph(world, 1.7);
  EpisodeConfig cfg = blocked_episode_config(5);
  cfg.max_steps = 1;
  const EpisodeMetrics m = run_episode(world, graph, cfg);
  CHECK(m.steps == 1);
  CHECK(!m.goal_reached);
}

TEST_CASE("invalid episode configs raise ConfigError") {
  EpisodeConfig cfg;
  cfg.max_steps = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.v_freeze = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.world_file = "does_not_exist.json";
  cfg.graph_file = "nor_this.json";
  CHECK_THROWS_AS(run_episode(cfg), ConfigError);
}

TEST_CASE("collision classification is exhaustive and target hits are flagged") {
  // Collision-seeking setup: obstacle weight off, target blob on the path.
  const WorldModel world = hall_world();
  const TopoGraph graph = make_expert_graph(world, 1.7);
  EpisodeConfig cfg = hall_episode_config(7);
  cfg.perturbation = hall_target_obstacle();
  cfg.mppi.w_obst = 0.0;
  cfg.mppi.num_samples = 256;
  cfg.max_steps = 600;
  const EpisodeMetrics m = run_episode(world, graph, cfg);
  CHECK(m.target_dc_count >= 1);
  CHECK(m.dc_count >= m.target_dc_count);
  CHECK(m.dc_count + m.ic_count == event_count(m, "dc:") + event_count(m, "ic:"));
}

TEST_CASE("no perturbation means no target hits even when colliding") {
  // Same hall but the blob is a plain (non-target) obstacle.
  WorldModel world = hall_world();
  Obstacle blob = hall_target_obstacle();
  blob.is_target = false;
  world.obstacles.push_back(blob);
  const TopoGraph graph = make_expert_graph(world, 1.7);
  EpisodeConfig cfg = hall_episode_config(7);
  cfg.mppi.w_obst = 0.0;
  cfg.mppi.num_samples = 256;
  cfg.max_steps = 600;
  const EpisodeMetrics m = run_episode(world, graph, cfg);
  CHECK(m.dc_count >= 1);
  CHECK(m.target_dc_count == 0);
}

TEST_CASE("replays are identical for identical config and seed") {
  const WorldModel world = blocked_corridor_world();
  const TopoGraph graph = make_expert_graph(world, 1.7);
  const EpisodeConfig cfg = blocked_episode_config(11);
  const EpisodeMetrics a = run_episode(world, graph, cfg);
  const EpisodeMetrics b = run_episode(world, graph, cfg);
  CHECK(trajectory_to_csv(a) == trajectory_to_csv(b));
  CHECK(costs_to_csv(a) == costs_to_csv(b));

  const WorldModel hall = hall_world();
  const TopoGraph hall_graph = make_expert_graph(hall, 1.7);
  EpisodeConfig hcfg = hall_episode_config(13);
  hcfg.max_steps = 40;
  hcfg.mppi.num_samples = 128;
  const EpisodeMetrics c = run_episode(hall, hall_graph, hcfg);
  const EpisodeMetrics d = run_episode(hall, hall_graph, hcfg);
  CHECK(trajectory_to_csv(c) == trajectory_to_csv(d));
}

TEST_CASE("suite metrics follow the per-run definitions") {
  auto mk = [](int dc, int ic, int freezes, int target_dc, bool goal) {
    EpisodeMetrics m;
    m.dc_count = dc;
    m.ic_count = ic;
    m.freeze_count = freezes;
    m.target_dc_count = target_dc;
    m.goal_reached = goal;
    return m;
  };

  const std::vector<EpisodeMetrics> runs{mk(1, 0, 0, 0, true), mk(0, 2, 1, 0, true),
                                         mk(2, 1, 0, 0, true)};
  const SuiteMetrics s = compute_suite_metrics(runs, {false, false, false});
  CHECK(s.adc == doctest::Approx(1.0));
  CHECK(s.aic == doctest::Approx(1.0));
  CHECK(s.af == doctest::Approx(1.0 / 3.0));
  CHECK(s.grr == doctest::Approx(1.0));
  CHECK(s.tdcr == 0.0);  // no perturbation runs

  // 6 perturbation runs, 3 with a target hit.
  std::vector<EpisodeMetrics> pert;
  std::vector<bool> flags;
  for (int i = 0; i < 6; ++i) {
    pert.push_back(mk(1, 0, 0, i < 3 ? 1 : 0, false));
    flags.push_back(true);
  }
  CHECK(compute_suite_metrics(pert, flags).tdcr == doctest::Approx(0.5));

  CHECK_THROWS_AS(compute_suite_metrics({}, {}), EmptySuite);
  CHECK_THROWS_AS(compute_suite_metrics(runs, {true}), std::invalid_argument);
}

TEST_CASE("trajectory CSV carries the documented schema") {
  const WorldModel world = blocked_corridor_world();
  const TopoGraph graph = make_expert_graph(world, 1.7);
  EpisodeConfig cfg = blocked_episode_config(17);
  cfg.max_steps = 20;
  const EpisodeMetrics m = run_episode(world, graph, cfg);
  const std::string csv = trajectory_to_csv(m);
  CHECK(csv.rfind("t,x,y,theta,v,w,event\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == m.steps + 1);
  const std::string costs = costs_to_csv(m);
  CHECK(costs.rfind("t,expected_cost,v,w\n", 0) == 0);
}
