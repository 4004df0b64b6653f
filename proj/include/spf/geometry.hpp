#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "spf/core.hpp"
#include "spf/grid.hpp"
#include "spf/image.hpp"
#include "spf/pointcloud.hpp"

namespace spf {

/// Project a camera-frame cloud onto the image plane. Each point with z > 0
/// whose pixel lands inside the image writes its Euclidean distance from the
/// camera center; the nearest point wins when several share a pixel. Points
/// behind the camera or out of frame are dropped.
inline SparseDepthImage project_points(const PointCloud& cloud, const CameraIntrinsics& intr) {
  intr.validate();
  SparseDepthImage img(intr.height, intr.width);
  for (const Vec3& p : cloud.points) {
    if (!(p.z() > 0.0)) continue;
    const double u = intr.fx * p.x() / p.z() + intr.cx;
    const double v = intr.fy * p.y() / p.z() + intr.cy;
    const int iu = static_cast<int>(std::lround(u));
    const int iv = static_cast<int>(std::lround(v));
    if (iu < 0 || iu >= intr.width || iv < 0 || iv >= intr.height) continue;
    const double dist = p.norm();
    if (!img.is_valid(iv, iu) || dist < img.depth.at(iv, iu)) img.set(iv, iu, dist);
  }
  return img;
}

/// One world-frame point per valid pixel, on the pixel-center ray at the
/// stored distance.
inline PointCloud reproject_depth(const SparseDepthImage& img, const CameraIntrinsics& intr,
                                  const Pose& cam_pose) {
  intr.validate();
  PointCloud cloud;
  cloud.frame = Frame::kWorld;
  cloud.points.reserve(static_cast<size_t>(img.valid_count()));
  for (int v = 0; v < img.rows(); ++v) {
    for (int u = 0; u < img.cols(); ++u) {
      if (!img.is_valid(v, u)) continue;
      const Vec3 ray = intr.pixel_ray(u, v);
      cloud.points.push_back(cam_pose.apply(ray * img.depth.at(v, u)));
    }
  }
  return cloud;
}

inline PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose, Frame target_frame) {
  if (!pose.has_unit_quaternion())
    throw std::invalid_argument("transform_cloud: non-unit quaternion");
  PointCloud out;
  out.frame = target_frame;
  out.points.reserve(cloud.points.size());
  for (const Vec3& p : cloud.points) out.points.push_back(pose.apply(p));
  return out;
}

namespace detail {

/// Height-crossing test for one cell over the ray interval [t0, t1].
/// Returns hit distance or a negative value when the ray stays above.
inline double cell_hit(double oz, double dz, double h, double t0, double t1) {
  const double z0 = oz + t0 * dz;
  if (z0 <= h) return t0;  // enters the interval already at or below the surface
  const double z1 = oz + t1 * dz;
  if (z1 <= h) return (h - oz) / dz;  // dz < 0 here since z0 > h >= z1
  return -1.0;
}

}  // namespace detail

struct RaycastResult {
  SparseDepthImage depth;
  Raster variance;
};

/// March a single ray through the height grid; returns hit distance and the
/// struck cell, or false when the ray leaves the map without intersecting.
/// 2D digital-differential traversal over cells, constant height per cell,
/// sub-cell hit refined along the ray.
inline bool raycast_surface_ray(const SurfaceMap& surface, const Vec3& origin, const Vec3& dir,
                                double& hit_dist, int& hit_r, int& hit_c) {
  const GridGeometry& g = surface.geom;
  const double res = g.resolution;
  const double eps = 1e-12;

  // Clip to the grid rectangle in x-y.
  double t_enter = 0.0;
  double t_exit = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 2; ++axis) {
    const double o = axis == 0 ? origin.x() : origin.y();
    const double d = axis == 0 ? dir.x() : dir.y();
    const double lo = axis == 0 ? g.origin.x() : g.origin.y();
    const double hi = lo + (axis == 0 ? g.extent_x() : g.extent_y());
    if (std::abs(d) < eps) {
      if (o < lo || o > hi) return false;
    } else {
      double ta = (lo - o) / d;
      double tb = (hi - o) / d;
      if (ta > tb) std::swap(ta, tb);
      t_enter = std::max(t_enter, ta);
      t_exit = std::min(t_exit, tb);
    }
  }
  if (t_enter > t_exit) return false;

  // Purely vertical ray: a single column.
  if (std::abs(dir.x()) < eps && std::abs(dir.y()) < eps) {
    int r, c;
    g.cell_of(Vec2(origin.x(), origin.y()), r, c);
    if (!g.inside(r, c) || !surface.is_valid(r, c)) return false;
    const double h = surface.height.at(r, c);
    if (std::abs(dir.z()) < eps) return false;
    const double t = (h - origin.z()) / dir.z();
    if (t <= 0.0) return false;
    hit_dist = t;
    hit_r = r;
    hit_c = c;
    return true;
  }

  // Start cell, nudged inside to dodge boundary ambiguity.
  double t = t_enter;
  const Vec2 start(origin.x() + dir.x() * (t + eps), origin.y() + dir.y() * (t + eps));
  int c, r;
  g.cell_of(start, r, c);
  c = std::clamp(c, 0, g.cols - 1);
  r = std::clamp(r, 0, g.rows - 1);

  const int step_c = dir.x() > 0.0 ? 1 : (dir.x() < 0.0 ? -1 : 0);
  const int step_r = dir.y() > 0.0 ? 1 : (dir.y() < 0.0 ? -1 : 0);
  const double t_delta_c = step_c != 0 ? res / std::abs(dir.x()) : std::numeric_limits<double>::infinity();
  const double t_delta_r = step_r != 0 ? res / std::abs(dir.y()) : std::numeric_limits<double>::infinity();

  auto boundary_t = [&](int idx, int step, double o, double d, double grid_o) {
    const double edge = grid_o + (step > 0 ? (idx + 1) * res : idx * res);
    return (edge - o) / d;
  };
  double t_max_c = step_c != 0
                       ? boundary_t(c, step_c, origin.x(), dir.x(), g.origin.x())
                       : std::numeric_limits<double>::infinity();
  double t_max_r = step_r != 0
                       ? boundary_t(r, step_r, origin.y(), dir.y(), g.origin.y())
                       : std::numeric_limits<double>::infinity();

  while (t <= t_exit && g.inside(r, c)) {
    const double t_next = std::min({t_max_c, t_max_r, t_exit});
    if (surface.is_valid(r, c)) {
      const double th = detail::cell_hit(origin.z(), dir.z(), surface.height.at(r, c), t, t_next);
      if (th > 0.0) {
        hit_dist = th;
        hit_r = r;
        hit_c = c;
        return true;
      }
    }
    if (t_next >= t_exit) break;
    if (t_max_c <= t_max_r) {
      c += step_c;
      t = t_max_c;
      t_max_c += t_delta_c;
    } else {
      r += step_r;
      t = t_max_r;
      t_max_r += t_delta_r;
    }
  }
  return false;
}

/// Raycast every pixel of a camera against the height grid. Hits write ray
/// distance and the struck cell's variance; rays that exit the map or never
/// descend to a valid cell leave the pixel invalid.
inline RaycastResult raycast_heightmap(const SurfaceMap& surface, const CameraIntrinsics& intr,
                                       const Pose& cam_pose) {
  intr.validate();
  surface.geom.validate();
  RaycastResult out;
  out.depth = SparseDepthImage(intr.height, intr.width);
  out.variance = Raster(intr.height, intr.width, 0.0);
  const Vec3 origin = cam_pose.translation;
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const Vec3 dir = cam_pose.rotation * intr.pixel_ray(u, v);
      double dist;
      int r, c;
      if (raycast_surface_ray(surface, origin, dir, dist, r, c)) {
        out.depth.set(v, u, dist);
        out.variance.at(v, u) = surface.variance.at(r, c);
      }
    }
  }
  return out;
}

}  // namespace spf
