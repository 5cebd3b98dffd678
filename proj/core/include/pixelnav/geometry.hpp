// geometry.hpp - pinhole camera model, ground-plane projection and its
// inverse (IPM), plus the 2D frame transforms used by the simulator.
//
// Frame conventions (ROS-style): robot frame X forward, Y left. The camera
// looks along +X with its optical axis parallel to the ground at height
// h_cam, image plane orthogonal to the ground. A robot-frame ground point
// (x, y) therefore has camera-frame coordinates (-y, h_cam, x).

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace pixelnav {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Distance below which a ground point is considered at/behind the camera
// plane and cannot be projected.
inline constexpr double kMinProjectionDepth = 1e-6;  // meters

// A pixel must lie at least this far below the horizon row to admit a
// finite ground intersection.
inline constexpr double kHorizonMarginPx = 0.5;  // pixels

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

/// Rounds to the nearest integer, halves away from zero upward (round-half-up
/// for the nonnegative pixel coordinates this project deals in).
inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

/// Planar pose (position + heading), used both for the robot in the world
/// frame and for recorded trajectory samples.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, wrapped to (-pi, pi]

  Vec2 position() const { return {x, y}; }
};

struct PixelPoint {
  double u = 0.0;  // horizontal, rightward
  double v = 0.0;  // vertical, downward
};

/// Ground point in the robot frame: x forward (meters), y left (meters).
struct GroundPoint {
  double x = 0.0;
  double y = 0.0;
};

struct DegenerateProjection : std::domain_error {
  using std::domain_error::domain_error;
};

struct HorizonDegenerate : std::domain_error {
  using std::domain_error::domain_error;
};

/// Pinhole intrinsics plus the fixed camera height above ground.
struct CameraModel {
  double fx = 100.0;
  double fy = 100.0;
  double cx = 160.0;
  double cy = 120.0;
  double h_cam = 0.35;  // meters above ground
  int width = 320;
  int height = 240;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  double image_diagonal() const {
    return std::hypot(static_cast<double>(width), static_cast<double>(height));
  }

  /// Horizontal field-of-view half angle, from the sensor width.
  double fov_half_angle() const { return std::atan(width / (2.0 * fx)); }
};

/// Projects a robot-frame ground point into the image:
///   u = cx - fx * y / x,  v = cy + fy * h_cam / x.
/// Throws DegenerateProjection when p.x < kMinProjectionDepth. The returned
/// pixel is real-valued and may fall outside the image bounds.
PixelPoint project_ground_point(const CameraModel& cam, const GroundPoint& p);

/// Inverse perspective mapping: recovers the ground point of a pixel known
/// to lie on the ground plane:
///   x = fy * h_cam / (v - cy),  y = -(u - cx) * fy * h_cam / (fx * (v - cy)).
/// Throws HorizonDegenerate when q.v <= cy + kHorizonMarginPx.
GroundPoint backproject_pixel(const CameraModel& cam, const PixelPoint& q);

/// Expresses a world-frame point in the robot frame of `robot_pose`
/// (rotate by -theta after translating).
GroundPoint world_to_robot(const Pose2& robot_pose, const Vec2& p_world);

/// Inverse of world_to_robot.
Vec2 robot_to_world(const Pose2& robot_pose, const GroundPoint& p_robot);

}  // namespace pixelnav
