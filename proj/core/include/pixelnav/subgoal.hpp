// subgoal.hpp - turns a relative-yaw estimate plus the traversability mask
// into the single target pixel the controller steers toward.

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "pixelnav/geometry.hpp"
#include "pixelnav/topograph.hpp"
#include "pixelnav/traversability.hpp"

namespace pixelnav {

struct NoTraversableRegion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Relative rotation toward the subgoal scene.
struct YawEstimate {
  double alpha = 0.0;  // radians, wrapped to (-pi, pi]
  bool valid = false;
};

enum class SubgoalMode {
  kOnRay,           // picked along the traced ground ray
  kFallbackClosest  // nearest traversable pixel to the ray line
};

struct SubgoalPixel {
  PixelPoint p;  // integer-valued, always traversable in the source mask
  SubgoalMode mode = SubgoalMode::kOnRay;
};

/// Ray-trace parameters: ground ranges sampled when projecting the heading
/// ray into the image.
struct RayTraceParams {
  double d_min = 0.3;   // meters
  double d_step = 0.05;
  double d_max = 20.0;  // covers the image to ~1 px of the horizon at default intrinsics

  void validate() const {
    if (!(d_min > 0.0 && d_step > 0.0 && d_max > d_min)) {
      throw std::invalid_argument("subgoal: require 0 < d_min < d_max and d_step > 0");
    }
  }
};

/// Selects the subgoal pixel for heading update alpha.
///
/// The ground ray from the robot origin at heading alpha projects to the
/// vertical image line u = cx - fx * tan(alpha). Ground ranges d_min..d_max
/// are projected and looked up in the mask; the traced segment runs from the
/// nearest in-image traversable ray pixel up to the last one before the
/// first blocked sample (non-traversable, outside the image, or the
/// horizon). The returned pixel sits at 2/3 of the segment's pixel length
/// from the near end (round half-up), snapped to the nearest traversable
/// pixel. When no ray sample is traversable the fallback returns the
/// traversable pixel closest to the ray line (ties: lower v, then lower u).
///
/// Throws NoTraversableRegion when the mask has no traversable pixel at all.
SubgoalPixel select_subgoal_pixel(const TraversabilityMask& mask, const CameraModel& cam,
                                  double alpha, const RayTraceParams& params = {});

/// Seam for the image-based relative-pose pipeline; the simulator oracle
/// implements it from ground truth.
class YawEstimator {
 public:
  virtual ~YawEstimator() = default;
  virtual YawEstimate estimate(const Pose2& observed_from, const TopoNode& subgoal_node) = 0;
};

/// Ground-truth yaw: alpha = wrap(node.phi - robot theta), plus optional
/// Gaussian noise (sigma_alpha = 0 draws nothing from the stream).
YawEstimate oracle_yaw(const Pose2& robot_pose, const TopoNode& subgoal_node,
                       double sigma_alpha, std::mt19937_64& rng);

inline YawEstimate oracle_yaw(const Pose2& robot_pose, const TopoNode& subgoal_node) {
  std::mt19937_64 unused(0);
  return oracle_yaw(robot_pose, subgoal_node, 0.0, unused);
}

}  // namespace pixelnav
