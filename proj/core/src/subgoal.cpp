#include "pixelnav/subgoal.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace pixelnav {

namespace {

// The ground ray through the robot origin at heading alpha projects to a
// vertical image line: u(d) = cx - fx * (d sin a)/(d cos a) is independent
// of the range d. For |alpha| -> pi/2 the column runs off the image side.
double ray_column(const CameraModel& cam, double alpha) {
  const double c = std::cos(alpha);
  if (std::abs(c) < 1e-12) return alpha > 0 ? -1e18 : 1e18;
  return cam.cx - cam.fx * std::tan(alpha);
}

// Nearest traversable pixel to (tu, tv); scan order (v, then u) breaks exact
// ties toward lower v then lower u.
PixelCoord nearest_traversable(const TraversabilityMask& mask, double tu, double tv) {
  PixelCoord best{0, 0};
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (!mask.at(u, v)) continue;
      const double du = u - tu;
      const double dv = v - tv;
      const double d2 = du * du + dv * dv;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = {u, v};
      }
    }
  }
  return best;
}

}  // namespace

SubgoalPixel select_subgoal_pixel(const TraversabilityMask& mask, const CameraModel& cam,
                                  double alpha, const RayTraceParams& params) {
  params.validate();
  if (mask.width() != cam.width || mask.height() != cam.height) {
    throw std::invalid_argument("mask and camera dimensions disagree");
  }
  if (mask.count_traversable() == 0) {
    throw NoTraversableRegion("mask has no traversable pixels");
  }

  const double ca = std::cos(alpha);
  const double sa = std::sin(alpha);

  // Walk the ray near-to-far. The segment opens at the first in-image
  // traversable sample and closes just before the first blocked one
  // (non-traversable, out of image, or past the horizon margin).
  std::optional<PixelPoint> near_px, far_px;
  for (double d = params.d_min; d <= params.d_max + 1e-9; d += params.d_step) {
    const GroundPoint g{d * ca, d * sa};
    if (g.x < kMinProjectionDepth) {
      if (near_px) break;
      continue;
    }
    const PixelPoint px = project_ground_point(cam, g);
    const int ui = round_half_up(px.u);
    const int vi = round_half_up(px.v);
    const bool traversable = mask.in_bounds(ui, vi) && mask.at(ui, vi);
    if (!near_px) {
      if (traversable) near_px = far_px = px;
    } else {
      if (!traversable) break;
      far_px = px;
    }
  }

  if (near_px) {
    const PixelPoint target{near_px->u + (2.0 / 3.0) * (far_px->u - near_px->u),
                            near_px->v + (2.0 / 3.0) * (far_px->v - near_px->v)};
    const int tu = round_half_up(target.u);
    const int tv = round_half_up(target.v);
    PixelCoord chosen{tu, tv};
    if (!(mask.in_bounds(tu, tv) && mask.at(tu, tv))) {
      chosen = nearest_traversable(mask, tu, tv);
    }
    return {{static_cast<double>(chosen.u), static_cast<double>(chosen.v)}, SubgoalMode::kOnRay};
  }

  // No ray sample was traversable: take the traversable pixel closest to the
  // projected ray line (a column distance, since the line is vertical).
  const double u_ray = ray_column(cam, alpha);
  PixelCoord best{0, 0};
  double best_d = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (!mask.at(u, v)) continue;
      const double d = std::abs(u - u_ray);
      if (d < best_d) {
        best_d = d;
        best = {u, v};
      }
    }
  }
  return {{static_cast<double>(best.u), static_cast<double>(best.v)},
          SubgoalMode::kFallbackClosest};
}

YawEstimate oracle_yaw(const Pose2& robot_pose, const TopoNode& subgoal_node, double sigma_alpha,
                       std::mt19937_64& rng) {
  double alpha = wrap_angle(subgoal_node.pose.phi - robot_pose.theta);
  if (sigma_alpha > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma_alpha);
    alpha = wrap_angle(alpha + noise(rng));
  }
  return {alpha, true};
}

}  // namespace pixelnav
