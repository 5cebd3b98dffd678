#include "pixelnav/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pixelnav/rng.hpp"

namespace pixelnav {

void MppiConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidConfig("mppi." + what); };
  if (!(dt > 0.0)) fail("dt must be > 0");
  if (horizon_steps < 1) fail("horizon_steps must be >= 1");
  if (num_samples < 2) fail("num_samples must be >= 2");
  if (!(lambda > 0.0)) fail("lambda must be > 0");
  if (!(sigma_v > 0.0)) fail("sigma_v must be > 0");
  if (!(sigma_w > 0.0)) fail("sigma_w must be > 0");
  if (!(r_safe > 0.0)) fail("r_safe must be > 0");
  if (!(v_max > v_min)) fail("v_max must be > v_min");
  if (!(w_max > 0.0)) fail("w_max must be > 0");
  if (w_obst < 0.0) fail("w_obst must be >= 0");
  if (w_sg < 0.0) fail("w_sg must be >= 0");
  if (q_ctrl_v < 0.0 || q_ctrl_w < 0.0) fail("q_ctrl must be >= 0");
}

RobotState step_dynamics(const RobotState& s, const ControlInput& u, double dt) {
  return {s.x + u.v * std::cos(s.theta) * dt, s.y + u.v * std::sin(s.theta) * dt,
          wrap_angle(s.theta + u.w * dt)};
}

double subgoal_cost(const RobotState& s, const CameraModel& cam, const PixelPoint& subgoal) {
  if (s.x < kMinProjectionDepth) {
    return 10.0 * cam.image_diagonal();
  }
  const PixelPoint p = project_ground_point(cam, {s.x, s.y});
  return std::hypot(p.u - subgoal.u, p.v - subgoal.v);
}

double obstacle_cost(const RobotState& s, std::span<const GroundPoint> obstacles, double r_safe) {
  const double r2 = r_safe * r_safe;
  int count = 0;
  for (const GroundPoint& o : obstacles) {
    const double dx = s.x - o.x;
    const double dy = s.y - o.y;
    if (dx * dx + dy * dy < r2) ++count;
  }
  return static_cast<double>(count);
}

double total_cost(const RobotState& s, const ControlInput& u, const CameraModel& cam,
                  const PixelPoint& subgoal, std::span<const GroundPoint> obstacles,
                  const MppiConfig& cfg) {
  return cfg.w_obst * obstacle_cost(s, obstacles, cfg.r_safe) +
         cfg.w_sg * subgoal_cost(s, cam, subgoal) +
         cfg.q_ctrl_v * u.v * u.v + cfg.q_ctrl_w * u.w * u.w;
}

PlannerOutput mppi_solve(const RobotState& s0, const CameraModel& cam, const PixelPoint& subgoal,
                         std::span<const GroundPoint> obstacles, const MppiConfig& cfg,
                         std::span<const ControlInput> warm_start) {
  cfg.validate();
  const int K = cfg.horizon_steps;
  const int M = cfg.num_samples;

  std::vector<ControlInput> nominal(K);
  for (int k = 0; k < K && k < static_cast<int>(warm_start.size()); ++k) {
    nominal[k] = warm_start[k];
  }

  // Sample, roll out, score. Costs accumulate over the states the controls
  // produce (x_1 .. x_K), so the shared initial state does not wash out the
  // comparison between samples.
  std::vector<std::vector<ControlInput>> controls(M, std::vector<ControlInput>(K));
  std::vector<double> costs(M, 0.0);
  for (int m = 0; m < M; ++m) {
    std::mt19937_64 rng = make_rng(cfg.rng_seed, 0x726f6c6c /*roll*/, static_cast<std::uint64_t>(m));
    std::normal_distribution<double> noise_v(0.0, cfg.sigma_v);
    std::normal_distribution<double> noise_w(0.0, cfg.sigma_w);

    RobotState s = s0;
    double cost = 0.0;
    for (int k = 0; k < K; ++k) {
      ControlInput u{std::clamp(nominal[k].v + noise_v(rng), cfg.v_min, cfg.v_max),
                     std::clamp(nominal[k].w + noise_w(rng), -cfg.w_max, cfg.w_max)};
      controls[m][k] = u;
      s = step_dynamics(s, u, cfg.dt);
      cost += total_cost(s, u, cam, subgoal, obstacles, cfg);
    }
    costs[m] = cost;
  }

  // Baseline-subtracted softmax weights.
  int best = 0;
  double best_cost = costs[0];
  double mean_cost = 0.0;
  for (int m = 0; m < M; ++m) {
    mean_cost += costs[m];
    if (costs[m] < best_cost) {
      best_cost = costs[m];
      best = m;
    }
  }
  mean_cost /= M;

  std::vector<double> weights(M);
  double z = 0.0;
  for (int m = 0; m < M; ++m) {
    weights[m] = std::exp(-(costs[m] - best_cost) / cfg.lambda);
    z += weights[m];
  }

  PlannerOutput out;
  out.best_cost = best_cost;
  out.mean_cost = mean_cost;
  out.best_sequence = controls[best];

  std::vector<ControlInput> averaged(K);
  double weight_sum = 0.0;
  double min_w = std::numeric_limits<double>::infinity();
  double max_w = 0.0;
  double expected = 0.0;
  for (int m = 0; m < M; ++m) {
    const double w = weights[m] / z;
    weight_sum += w;
    min_w = std::min(min_w, w);
    max_w = std::max(max_w, w);
    expected += w * costs[m];
    for (int k = 0; k < K; ++k) {
      averaged[k].v += w * controls[m][k].v;
      averaged[k].w += w * controls[m][k].w;
    }
  }
  // The average of clamped samples is already in bounds; re-clamping only
  // removes last-ulp excursions from the weighted sum.
  for (ControlInput& u : averaged) {
    u.v = std::clamp(u.v, cfg.v_min, cfg.v_max);
    u.w = std::clamp(u.w, -cfg.w_max, cfg.w_max);
  }

  out.weight_sum = weight_sum;
  out.min_weight = min_w;
  out.max_weight = max_w;
  out.expected_cost = expected;
  out.control = averaged[0];

  // Warm start for the next call: shift one step, repeat the last input.
  out.nominal_sequence.assign(averaged.begin() + 1, averaged.end());
  out.nominal_sequence.push_back(averaged.back());
  return out;
}

}  // namespace pixelnav
