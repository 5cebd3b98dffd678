// controller.hpp - sampling-based MPPI over unicycle kinematics. Rollouts
// are scored by a pixel-space subgoal cost, an IPM-based obstacle proximity
// count, and a quadratic control penalty; the returned sequence is the
// softmax-weighted average of the sampled sequences.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pixelnav/geometry.hpp"

namespace pixelnav {

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Robot state in the planning frame (the robot frame at solve time).
struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // wrapped to (-pi, pi]
};

struct ControlInput {
  double v = 0.0;  // linear velocity, m/s
  double w = 0.0;  // angular velocity, rad/s
};

struct MppiConfig {
  double dt = 0.2;          // planning step, s
  int horizon_steps = 20;   // K
  int num_samples = 512;    // M
  double lambda = 1.0;      // softmax temperature
  double sigma_v = 0.3;     // sampling noise std, linear
  double sigma_w = 0.5;     // sampling noise std, angular
  double w_obst = 10.0;     // obstacle cost weight
  double w_sg = 10.0;       // subgoal cost weight
  double q_ctrl_v = 1.0;    // control penalty, diag(q_ctrl_v, q_ctrl_w)
  double q_ctrl_w = 100.0;
  double r_safe = 2.0;      // obstacle proximity threshold, m
  double v_min = 0.0;       // no rear perception, so reverse is excluded
  double v_max = 1.0;
  double w_max = 1.0;
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws InvalidConfig
};

struct PlannerOutput {
  ControlInput control;                        // first step of the optimized sequence
  std::vector<ControlInput> nominal_sequence;  // time-shifted warm start for the next call
  double expected_cost = 0.0;                  // softmax-weighted mean of sample costs

  // Diagnostics for invariant checks and logging.
  double weight_sum = 0.0;      // sum of normalized softmax weights (== 1 up to fp)
  double min_weight = 0.0;      // smallest / largest normalized weight
  double max_weight = 0.0;
  double best_cost = 0.0;       // best and mean sampled rollout cost
  double mean_cost = 0.0;
  std::vector<ControlInput> best_sequence;  // control sequence of the best sample
};

/// One unicycle step: x += v cos(theta) dt, y += v sin(theta) dt,
/// theta = wrap(theta + w dt).
RobotState step_dynamics(const RobotState& s, const ControlInput& u, double dt);

/// Pixel distance between the projected state position and the subgoal
/// pixel; states that cannot be projected (x < kMinProjectionDepth) pay the
/// fixed penalty 10 * image diagonal so the softmax stays well defined.
double subgoal_cost(const RobotState& s, const CameraModel& cam, const PixelPoint& subgoal);

/// Number of obstacle points strictly within r_safe of the state position.
/// Obstacle pixels are backprojected once per control cycle and passed here
/// as ground points.
double obstacle_cost(const RobotState& s, std::span<const GroundPoint> obstacles, double r_safe);

/// w_obst * obstacle_cost + w_sg * subgoal_cost + u^T diag(q_v, q_w) u.
double total_cost(const RobotState& s, const ControlInput& u, const CameraModel& cam,
                  const PixelPoint& subgoal, std::span<const GroundPoint> obstacles,
                  const MppiConfig& cfg);

/// MPPI solve from state s0 (the planning-frame origin in normal use).
///
/// Each of the M samples perturbs the warm-start sequence with i.i.d.
/// Gaussian noise (clamped to the control bounds), rolls out the dynamics,
/// and accumulates total_cost over the horizon. Sample costs are softmax
/// weighted with baseline subtraction, exp(-(S_m - S_min)/lambda), and the
/// returned sequence is the weighted average. Per-sample noise streams are
/// derived from (rng_seed, sample index), so the result does not depend on
/// evaluation order. A short warm_start is zero-padded, a long one truncated.
PlannerOutput mppi_solve(const RobotState& s0, const CameraModel& cam, const PixelPoint& subgoal,
                         std::span<const GroundPoint> obstacles, const MppiConfig& cfg,
                         std::span<const ControlInput> warm_start);

}  // namespace pixelnav
