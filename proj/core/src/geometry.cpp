#include "pixelnav/geometry.hpp"

namespace pixelnav {

void CameraModel::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("camera: " + what); };
  if (!(fx > 0.0)) fail("fx must be > 0");
  if (!(fy > 0.0)) fail("fy must be > 0");
  if (!(h_cam > 0.0)) fail("h_cam must be > 0");
  if (width <= 0) fail("width must be > 0");
  if (height <= 0) fail("height must be > 0");
  if (!(cx > 0.0 && cx < width)) fail("cx must lie inside (0, width)");
  if (!(cy > 0.0 && cy < height)) fail("cy must lie inside (0, height)");
}

PixelPoint project_ground_point(const CameraModel& cam, const GroundPoint& p) {
  if (p.x < kMinProjectionDepth) {
    throw DegenerateProjection("ground point at/behind the camera plane (x = " +
                               std::to_string(p.x) + ")");
  }
  return {cam.cx - cam.fx * p.y / p.x, cam.cy + cam.fy * cam.h_cam / p.x};
}

GroundPoint backproject_pixel(const CameraModel& cam, const PixelPoint& q) {
  const double dv = q.v - cam.cy;
  if (dv <= kHorizonMarginPx) {
    throw HorizonDegenerate("pixel at/above the horizon row (v = " + std::to_string(q.v) + ")");
  }
  const double x = cam.fy * cam.h_cam / dv;
  const double y = -(q.u - cam.cx) * cam.fy * cam.h_cam / (cam.fx * dv);
  return {x, y};
}

GroundPoint world_to_robot(const Pose2& robot_pose, const Vec2& p_world) {
  const double dx = p_world.x - robot_pose.x;
  const double dy = p_world.y - robot_pose.y;
  const double c = std::cos(robot_pose.theta);
  const double s = std::sin(robot_pose.theta);
  return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 robot_to_world(const Pose2& robot_pose, const GroundPoint& p_robot) {
  const double c = std::cos(robot_pose.theta);
  const double s = std::sin(robot_pose.theta);
  return {robot_pose.x + c * p_robot.x - s * p_robot.y,
          robot_pose.y + s * p_robot.x + c * p_robot.y};
}

}  // namespace pixelnav
