#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>
#include <string>

namespace spf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Thrown when a linear solve or factorization cannot be completed.
/// The CLI maps this to a distinct exit code from plain input errors.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Rigid transform, world <- body. Quaternion must stay unit length.
struct Pose {
  Vec3 translation = Vec3::Zero();
  Quat rotation = Quat::Identity();

  static Pose identity() { return {}; }

  bool has_unit_quaternion(double tol = 1e-9) const {
    return std::abs(rotation.norm() - 1.0) <= tol;
  }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Pose inverse() const {
    Pose inv;
    inv.rotation = rotation.conjugate();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  Pose compose(const Pose& other) const {
    Pose out;
    out.rotation = (rotation * other.rotation).normalized();
    out.translation = rotation * other.translation + translation;
    return out;
  }
};

/// Pinhole camera. Image frame: +z optical axis, +x right, +y down.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const {
    if (fx <= 0.0 || fy <= 0.0)
      throw std::invalid_argument("CameraIntrinsics: focal lengths must be positive");
    if (cx <= 0.0 || cx >= width || cy <= 0.0 || cy >= height)
      throw std::invalid_argument("CameraIntrinsics: principal point outside image");
  }

  /// Unit ray through pixel (u, v), camera frame. Pixel centers sit at
  /// integer coordinates.
  Vec3 pixel_ray(double u, double v) const {
    Vec3 d((u - cx) / fx, (v - cy) / fy, 1.0);
    return d.normalized();
  }
};

/// Camera pose from a yaw/pitch viewing direction, z-up world.
/// pitch > 0 tilts the optical axis below the horizon.
inline Pose camera_pose_from_yaw_pitch(const Vec3& position, double yaw, double pitch) {
  const Vec3 z_cam(std::cos(yaw) * std::cos(pitch), std::sin(yaw) * std::cos(pitch),
                   -std::sin(pitch));
  const Vec3 x_cam(std::sin(yaw), -std::cos(yaw), 0.0);  // image right
  const Vec3 y_cam = z_cam.cross(x_cam).normalized();    // image down
  Eigen::Matrix3d rot;
  rot.col(0) = x_cam;
  rot.col(1) = y_cam;
  rot.col(2) = z_cam;
  Pose pose;
  pose.translation = position;
  pose.rotation = Quat(rot).normalized();
  return pose;
}

}  // namespace spf
