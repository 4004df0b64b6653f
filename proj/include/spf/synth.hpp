#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spf/core.hpp"
#include "spf/footholds.hpp"
#include "spf/geometry.hpp"
#include "spf/grid.hpp"
#include "spf/image.hpp"
#include "spf/pointcloud.hpp"

namespace spf {

namespace hash {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t combine(uint64_t a, uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

/// Uniform in [0, 1).
inline double to_unit(uint64_t h) { return (h >> 11) * 0x1.0p-53; }

/// Standard normal from two hashed uniforms (Box-Muller).
inline double to_normal(uint64_t h) {
  const double u1 = std::max(to_unit(splitmix64(h)), 1e-300);
  const double u2 = to_unit(splitmix64(h ^ 0x5851f42d4c957f2dull));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace hash

struct SinusoidComponent {
  double amplitude = 0.0;   // meters
  double frequency = 0.0;   // cycles per meter
  double direction = 0.0;   // radians, wave direction in the plane
  double phase = 0.0;       // radians
};

struct BoxObstacle {
  Vec2 center = Vec2::Zero();
  double yaw = 0.0;
  Vec3 size = Vec3::Zero();  // sx, sy, sz; the box sits on the ground
};

struct GaitParams {
  double stance_s = 0.4;
  double swing_s = 0.4;
  double step_length = 0.25;   // base advance per cycle, meters
  double clearance = 0.15;     // swing apex above the ground line
  double sample_rate_hz = 100.0;
  double stance_width = 0.3;   // lateral distance between foot pairs
  double stance_length = 0.4;  // longitudinal distance between foot pairs
};

struct LidarRig {
  int rings = 16;
  int azimuth_steps = 180;
  double elevation_min = -75.0 * M_PI / 180.0;
  double elevation_max = -5.0 * M_PI / 180.0;
  double range_noise_sigma = 0.01;  // meters
  double max_range = 20.0;
  double mount_height = 0.4;  // above the robot base origin
};

struct CameraRig {
  CameraIntrinsics intr{120.0, 120.0, 64.0, 48.0, 128, 96};
  double mount_height = 0.5;
  double mount_forward = 0.2;
  double pitch = 35.0 * M_PI / 180.0;
  double brightness_jitter = 0.0;  // optional per-frame lighting perturbation
};

struct SceneSpec {
  uint64_t seed = 1;
  Vec2 extent_min = Vec2(-2.0, -6.0);
  Vec2 extent_max = Vec2(14.0, 6.0);
  double grid_resolution = 0.05;

  std::vector<SinusoidComponent> ground;

  double veg_coverage = 0.5;       // fraction of patches carrying vegetation
  double veg_height_min = 0.2;
  double veg_height_max = 0.4;
  double veg_penetration = 0.1;    // p_pen, probability a LiDAR ray passes through
  double veg_patch_size = 0.5;     // meters, patch lattice pitch

  std::vector<BoxObstacle> obstacles;

  std::vector<Vec2> waypoints = {Vec2(0.0, 0.0), Vec2(10.0, 0.0)};
  GaitParams gait;
  CameraRig camera;
  LidarRig lidar;
  double body_height = 0.55;
  double frame_interval_s = 0.5;

  void validate() const {
    if (veg_penetration < 0.0 || veg_penetration > 1.0)
      throw std::invalid_argument("SceneSpec: penetration probability outside [0,1]");
    if (veg_coverage < 0.0 || veg_coverage > 1.0)
      throw std::invalid_argument("SceneSpec: vegetation coverage outside [0,1]");
    if (veg_height_max < veg_height_min)
      throw std::invalid_argument("SceneSpec: vegetation height range inverted");
    if (waypoints.size() < 2) throw std::invalid_argument("SceneSpec: need >= 2 waypoints");
    for (const Vec2& w : waypoints)
      if (w.x() < extent_min.x() || w.x() > extent_max.x() || w.y() < extent_min.y() ||
          w.y() > extent_max.y())
        throw std::invalid_argument("SceneSpec: waypoint outside extent");
  }
};

struct SceneFrame {
  double t = 0.0;
  Pose robot;
  Pose camera;
  Pose lidar;
};

enum class ReturnType : uint8_t { kGround = 0, kVegetation = 1, kObstacle = 2 };

struct LidarScan {
  PointCloud cloud;  // world frame
  std::vector<ReturnType> labels;
};

struct CameraRender {
  RgbImage rgb;
  SegMask true_mask;
};

/// Deterministic ground-truth world: analytic sum-of-sinusoids ground,
/// patch-lattice vegetation, box obstacles, and the robot's trajectory through
/// it. Everything is a pure function of the spec.
class Scene {
 public:
  SceneSpec spec;
  SurfaceMap true_surface;    // analytic ground sampled at grid resolution
  SurfaceMap vegetation_top;  // ground + patch vegetation height
  std::vector<SceneFrame> frames;

  double ground_height(double x, double y) const {
    double z = 0.0;
    for (const SinusoidComponent& s : spec.ground)
      z += s.amplitude * std::sin(2.0 * M_PI * s.frequency *
                                      (x * std::cos(s.direction) + y * std::sin(s.direction)) +
                                  s.phase);
    return z;
  }

  /// Gradient bound used for safe ray marching against the analytic ground.
  double ground_lipschitz() const {
    double l = 0.0;
    for (const SinusoidComponent& s : spec.ground)
      l += std::abs(s.amplitude) * 2.0 * M_PI * s.frequency;
    return l;
  }

  bool patch_vegetated(int px, int py) const {
    if (spec.veg_coverage <= 0.0) return false;
    const uint64_t h = hash::combine(hash::combine(spec.seed, 0x7665670aull),
                                     hash::combine(static_cast<uint64_t>(px) * 0x1f123bb5ull,
                                                   static_cast<uint64_t>(py) + 0x9d2c5680ull));
    return hash::to_unit(h) < spec.veg_coverage;
  }

  double patch_veg_height(int px, int py) const {
    const uint64_t h = hash::combine(hash::combine(spec.seed, 0x76656768ull),
                                     hash::combine(static_cast<uint64_t>(px) * 0x85ebca6bull,
                                                   static_cast<uint64_t>(py) + 0xc2b2ae35ull));
    return spec.veg_height_min +
           hash::to_unit(h) * (spec.veg_height_max - spec.veg_height_min);
  }

  void patch_of(double x, double y, int& px, int& py) const {
    px = static_cast<int>(std::floor(x / spec.veg_patch_size));
    py = static_cast<int>(std::floor(y / spec.veg_patch_size));
  }

  bool is_vegetated(double x, double y) const {
    int px, py;
    patch_of(x, y, px, py);
    return patch_vegetated(px, py);
  }

  double vegetation_top_height(double x, double y) const {
    int px, py;
    patch_of(x, y, px, py);
    const double g = ground_height(x, y);
    return patch_vegetated(px, py) ? g + patch_veg_height(px, py) : g;
  }

  double box_base_z(const BoxObstacle& box) const {
    return ground_height(box.center.x(), box.center.y());
  }
};

namespace detail {

/// First positive intersection of a ray with the analytic surface
/// g(x, y) + offset over the parameter interval [t0, t1]. Lipschitz-bounded
/// marching with bisection refinement.
inline bool march_analytic(const Scene& scene, const Vec3& origin, const Vec3& dir, double t0,
                           double t1, double offset, double& t_hit) {
  const double lip = scene.ground_lipschitz();
  const double rate = std::abs(dir.z()) + lip * std::hypot(dir.x(), dir.y()) + 1e-9;
  const double tol = 1e-9;

  auto gap = [&](double t) {
    const double x = origin.x() + t * dir.x();
    const double y = origin.y() + t * dir.y();
    return origin.z() + t * dir.z() - (scene.ground_height(x, y) + offset);
  };

  double t = t0;
  double g = gap(t);
  if (g <= 0.0) {
    // Starts at or below the surface within this interval.
    if (t <= 0.0) return false;
    t_hit = t;
    return true;
  }
  int guard = 0;
  while (t < t1 && guard++ < 10000) {
    const double step = std::max(0.9 * g / rate, 1e-4);
    const double t_next = std::min(t + step, t1);
    const double g_next = gap(t_next);
    if (g_next <= 0.0) {
      // Bisect [t, t_next].
      double lo = t, hi = t_next;
      for (int i = 0; i < 80 && (hi - lo) > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
      }
      t_hit = hi;
      return t_hit > 0.0;
    }
    t = t_next;
    g = g_next;
  }
  return false;
}

/// Clip a ray to an axis-aligned rectangle in x-y; false when it misses.
inline bool clip_to_rect(const Vec3& origin, const Vec3& dir, const Vec2& lo, const Vec2& hi,
                         double max_t, double& t_enter, double& t_exit) {
  t_enter = 0.0;
  t_exit = max_t;
  for (int axis = 0; axis < 2; ++axis) {
    const double o = axis == 0 ? origin.x() : origin.y();
    const double d = axis == 0 ? dir.x() : dir.y();
    const double a = axis == 0 ? lo.x() : lo.y();
    const double b = axis == 0 ? hi.x() : hi.y();
    if (std::abs(d) < 1e-12) {
      if (o < a || o > b) return false;
    } else {
      double ta = (a - o) / d, tb = (b - o) / d;
      if (ta > tb) std::swap(ta, tb);
      t_enter = std::max(t_enter, ta);
      t_exit = std::min(t_exit, tb);
    }
  }
  return t_enter <= t_exit;
}

/// First hit against the vegetation canopy: ground + per-patch constant
/// height, walked patch by patch so the marching stays within one smooth
/// piece at a time.
inline bool raycast_vegetation(const Scene& scene, const Vec3& origin, const Vec3& dir,
                               double max_t, double& t_hit) {
  if (scene.spec.veg_coverage <= 0.0) return false;
  double t0, t1;
  if (!clip_to_rect(origin, dir, scene.spec.extent_min, scene.spec.extent_max, max_t, t0, t1))
    return false;

  const double patch = scene.spec.veg_patch_size;
  const double eps = 1e-9;

  // Vertical ray: single patch column.
  if (std::abs(dir.x()) < 1e-12 && std::abs(dir.y()) < 1e-12) {
    int px, py;
    scene.patch_of(origin.x(), origin.y(), px, py);
    if (!scene.patch_vegetated(px, py)) return false;
    return march_analytic(scene, origin, dir, t0, t1, scene.patch_veg_height(px, py), t_hit);
  }

  double t = t0;
  int guard = 0;
  while (t < t1 && guard++ < 100000) {
    const double x = origin.x() + (t + eps) * dir.x();
    const double y = origin.y() + (t + eps) * dir.y();
    int px, py;
    scene.patch_of(x, y, px, py);
    // Parameter at which the ray leaves this patch.
    double t_leave = t1;
    if (std::abs(dir.x()) > 1e-12) {
      const double edge = (dir.x() > 0.0 ? (px + 1) * patch : px * patch);
      t_leave = std::min(t_leave, (edge - origin.x()) / dir.x());
    }
    if (std::abs(dir.y()) > 1e-12) {
      const double edge = (dir.y() > 0.0 ? (py + 1) * patch : py * patch);
      t_leave = std::min(t_leave, (edge - origin.y()) / dir.y());
    }
    if (scene.patch_vegetated(px, py) &&
        march_analytic(scene, origin, dir, t, std::min(t_leave, t1),
                       scene.patch_veg_height(px, py), t_hit))
      return true;
    if (t_leave <= t + 1e-12) t_leave = t + 1e-12;  // degenerate corner crossing
    t = t_leave;
  }
  return false;
}

/// Slab test against a yawed box resting on the ground.
inline bool raycast_box(const Scene& scene, const BoxObstacle& box, const Vec3& origin,
                        const Vec3& dir, double max_t, double& t_hit) {
  const double base = scene.box_base_z(box);
  const double cz = std::cos(-box.yaw), sz = std::sin(-box.yaw);
  // Into box frame (x-y rotation about the center, z shifted to the base).
  const Vec3 o_local(cz * (origin.x() - box.center.x()) - sz * (origin.y() - box.center.y()),
                     sz * (origin.x() - box.center.x()) + cz * (origin.y() - box.center.y()),
                     origin.z() - base);
  const Vec3 d_local(cz * dir.x() - sz * dir.y(), sz * dir.x() + cz * dir.y(), dir.z());
  const Vec3 lo(-box.size.x() / 2.0, -box.size.y() / 2.0, 0.0);
  const Vec3 hi(box.size.x() / 2.0, box.size.y() / 2.0, box.size.z());

  double t_enter = 0.0, t_exit = max_t;
  for (int axis = 0; axis < 3; ++axis) {
    const double o = o_local[axis], d = d_local[axis];
    if (std::abs(d) < 1e-12) {
      if (o < lo[axis] || o > hi[axis]) return false;
    } else {
      double ta = (lo[axis] - o) / d, tb = (hi[axis] - o) / d;
      if (ta > tb) std::swap(ta, tb);
      t_enter = std::max(t_enter, ta);
      t_exit = std::min(t_exit, tb);
    }
  }
  if (t_enter > t_exit || t_enter <= 0.0) return false;
  t_hit = t_enter;
  return true;
}

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  ReturnType type = ReturnType::kGround;
  bool valid = false;
};

/// Nearest candidate of each kind along the ray.
inline void ray_candidates(const Scene& scene, const Vec3& origin, const Vec3& dir, double max_t,
                           RayHit& box, RayHit& veg, RayHit& ground) {
  for (const BoxObstacle& b : scene.spec.obstacles) {
    double t;
    if (raycast_box(scene, b, origin, dir, max_t, t) && t < box.t) {
      box.t = t;
      box.type = ReturnType::kObstacle;
      box.valid = true;
    }
  }
  double t;
  if (raycast_vegetation(scene, origin, dir, max_t, t)) {
    veg.t = t;
    veg.type = ReturnType::kVegetation;
    veg.valid = true;
  }
  double t0, t1;
  if (clip_to_rect(origin, dir, scene.spec.extent_min, scene.spec.extent_max, max_t, t0, t1) &&
      march_analytic(scene, origin, dir, t0, t1, 0.0, t)) {
    ground.t = t;
    ground.type = ReturnType::kGround;
    ground.valid = true;
  }
}

}  // namespace detail

/// Build the world from its spec: sampled truth grids plus the frame poses
/// along the waypoint path.
inline Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.spec = spec;

  GridGeometry geom;
  geom.resolution = spec.grid_resolution;
  geom.origin = spec.extent_min;
  geom.cols = static_cast<int>(std::ceil((spec.extent_max.x() - spec.extent_min.x()) /
                                         spec.grid_resolution));
  geom.rows = static_cast<int>(std::ceil((spec.extent_max.y() - spec.extent_min.y()) /
                                         spec.grid_resolution));
  geom.validate();

  scene.true_surface = SurfaceMap(geom);
  scene.vegetation_top = SurfaceMap(geom);
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      const Vec2 p = geom.cell_center(r, c);
      const double g = scene.ground_height(p.x(), p.y());
      scene.true_surface.set(r, c, g, 0.0);
      scene.vegetation_top.set(r, c, scene.vegetation_top_height(p.x(), p.y()), 0.0);
    }
  }

  // Frame poses along the waypoint polyline at the gait's average speed.
  const double cycle = spec.gait.stance_s + spec.gait.swing_s;
  const double speed = spec.gait.step_length / cycle;
  std::vector<double> seg_len;
  double total = 0.0;
  for (size_t i = 1; i < spec.waypoints.size(); ++i) {
    seg_len.push_back((spec.waypoints[i] - spec.waypoints[i - 1]).norm());
    total += seg_len.back();
  }
  auto path_point = [&](double s, Vec2& pos, double& yaw) {
    s = std::clamp(s, 0.0, total);
    size_t i = 0;
    while (i < seg_len.size() - 1 && s > seg_len[i]) s -= seg_len[i++];
    const Vec2 a = spec.waypoints[i], b = spec.waypoints[i + 1];
    const Vec2 d = (b - a).normalized();
    pos = a + d * std::min(s, seg_len[i]);
    yaw = std::atan2(d.y(), d.x());
  };

  const double duration = total / speed;
  for (double t = 0.0; t <= duration + 1e-9; t += spec.frame_interval_s) {
    Vec2 pos;
    double yaw;
    path_point(t * speed, pos, yaw);
    SceneFrame frame;
    frame.t = t;
    const double gz = scene.ground_height(pos.x(), pos.y());
    frame.robot = camera_pose_from_yaw_pitch(Vec3(pos.x(), pos.y(), gz + spec.body_height), yaw, 0.0);
    const Vec2 fwd(std::cos(yaw), std::sin(yaw));
    const Vec2 cam_xy = pos + fwd * spec.camera.mount_forward;
    frame.camera = camera_pose_from_yaw_pitch(
        Vec3(cam_xy.x(), cam_xy.y(), gz + spec.body_height + spec.camera.mount_height), yaw,
        spec.camera.pitch);
    frame.lidar.translation = Vec3(pos.x(), pos.y(), gz + spec.body_height + spec.lidar.mount_height);
    frame.lidar.rotation = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
    scene.frames.push_back(frame);
  }
  return scene;
}

/// Simulate one LiDAR scan. Per ray: obstacles always return, the vegetation
/// canopy returns unless the seeded per-ray draw penetrates, otherwise the
/// ground returns exactly; Gaussian range noise on every return. frame_tag
/// decorrelates scans taken from different frames.
inline LidarScan simulate_lidar(const Scene& scene, const Pose& sensor_pose,
                                uint64_t frame_tag = 0) {
  const LidarRig& rig = scene.spec.lidar;
  LidarScan scan;
  scan.cloud.frame = Frame::kWorld;
  const uint64_t scan_seed = hash::combine(scene.spec.seed, hash::combine(0x11da72ull, frame_tag));

  int ray_index = 0;
  for (int ring = 0; ring < rig.rings; ++ring) {
    const double el = rig.rings == 1 ? rig.elevation_min
                                     : rig.elevation_min + (rig.elevation_max - rig.elevation_min) *
                                                               ring / (rig.rings - 1.0);
    for (int ai = 0; ai < rig.azimuth_steps; ++ai, ++ray_index) {
      const double az = 2.0 * M_PI * ai / rig.azimuth_steps;
      const Vec3 d_sensor(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
      const Vec3 dir = sensor_pose.rotation * d_sensor;
      const Vec3 origin = sensor_pose.translation;

      detail::RayHit box, veg, ground;
      detail::ray_candidates(scene, origin, dir, rig.max_range, box, veg, ground);

      const uint64_t ray_seed = hash::combine(scan_seed, static_cast<uint64_t>(ray_index));
      const bool penetrates =
          hash::to_unit(hash::splitmix64(ray_seed ^ 0x70656eull)) < scene.spec.veg_penetration;

      detail::RayHit hit;
      // Walk candidates in range order; vegetation may be skipped.
      std::vector<detail::RayHit> cands;
      for (const detail::RayHit& h : {box, veg, ground})
        if (h.valid) cands.push_back(h);
      std::sort(cands.begin(), cands.end(),
                [](const detail::RayHit& a, const detail::RayHit& b) { return a.t < b.t; });
      for (const detail::RayHit& h : cands) {
        if (h.type == ReturnType::kVegetation && penetrates) continue;
        hit = h;
        break;
      }
      if (!hit.valid) continue;

      const double noise =
          rig.range_noise_sigma * hash::to_normal(ray_seed ^ 0x6e6f697365ull);
      const double range = std::max(hit.t + noise, 1e-6);
      scan.cloud.points.push_back(origin + dir * range);
      scan.labels.push_back(hit.type);
    }
  }
  return scan;
}

/// Render the camera view: vegetation green, ground gray-brown, obstacles
/// dark gray, sky where nothing is hit. The mask marks support where
/// vegetation occludes the ground and rigid everywhere else.
inline CameraRender simulate_camera(const Scene& scene, const Pose& cam_pose,
                                    const CameraIntrinsics& intr, uint64_t frame_tag = 0) {
  intr.validate();
  CameraRender render;
  render.rgb = RgbImage(intr.height, intr.width, 0.0);
  render.true_mask = SegMask(intr.height, intr.width, SegClass::kRigid);
  const uint64_t frame_seed =
      hash::combine(scene.spec.seed, hash::combine(0xca3ull, frame_tag));
  const double brightness =
      1.0 + scene.spec.camera.brightness_jitter *
                (hash::to_unit(hash::splitmix64(frame_seed ^ 0xb7ull)) * 2.0 - 1.0);

  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const Vec3 dir = cam_pose.rotation * intr.pixel_ray(u, v);
      detail::RayHit box, veg, ground;
      detail::ray_candidates(scene, cam_pose.translation, dir, 100.0, box, veg, ground);

      detail::RayHit best;
      for (const detail::RayHit& h : {box, veg, ground})
        if (h.valid && h.t < best.t) {
          best = h;
          best.valid = true;
        }

      double r, g, b;
      const uint64_t px_seed =
          hash::combine(frame_seed, static_cast<uint64_t>(v) * 131071ull + u);
      const double jitter = 0.04 * (hash::to_unit(px_seed) * 2.0 - 1.0);
      if (!best.valid) {
        r = 0.55, g = 0.65, b = 0.80;  // sky
      } else if (best.type == ReturnType::kObstacle) {
        r = 0.22 + jitter, g = 0.22 + jitter, b = 0.25 + jitter;
      } else if (best.type == ReturnType::kVegetation) {
        r = 0.18 + jitter, g = 0.55 + jitter, b = 0.16 + jitter;
        render.true_mask.at(v, u) = SegClass::kSupport;
      } else {
        r = 0.45 + jitter, g = 0.40 + jitter, b = 0.33 + jitter;
      }
      render.rgb.at(0, v, u) = std::clamp(r * brightness, 0.0, 1.0);
      render.rgb.at(1, v, u) = std::clamp(g * brightness, 0.0, 1.0);
      render.rgb.at(2, v, u) = std::clamp(b * brightness, 0.0, 1.0);
    }
  }
  return render;
}

struct StanceInterval {
  double t_begin = 0.0;
  double t_end = 0.0;
  Vec3 contact = Vec3::Zero();
};

struct GaitResult {
  std::vector<FootTrajectory> feet;
  std::vector<std::vector<StanceInterval>> stance;  // per foot, time-ordered
};

/// Four phase-offset feet following the waypoint path. Stance feet pin to the
/// analytic ground height; swing arcs carry the configured clearance. The
/// labeled stance intervals feed extraction recall/precision tests.
inline GaitResult simulate_gait(const Scene& scene) {
  const SceneSpec& spec = scene.spec;
  const GaitParams& gait = spec.gait;
  const double cycle = gait.stance_s + gait.swing_s;
  const double speed = gait.step_length / cycle;

  std::vector<double> seg_len;
  double total = 0.0;
  for (size_t i = 1; i < spec.waypoints.size(); ++i) {
    seg_len.push_back((spec.waypoints[i] - spec.waypoints[i - 1]).norm());
    total += seg_len.back();
  }
  auto path_point = [&](double s, Vec2& pos, double& yaw) {
    s = std::clamp(s, 0.0, total);
    size_t i = 0;
    while (i < seg_len.size() - 1 && s > seg_len[i]) s -= seg_len[i++];
    const Vec2 a = spec.waypoints[i], b = spec.waypoints[i + 1];
    const Vec2 d = (b - a).normalized();
    pos = a + d * std::min(s, seg_len[i]);
    yaw = std::atan2(d.y(), d.x());
  };

  struct FootDef {
    const char* id;
    double lon, lat, phase;
  };
  const FootDef defs[4] = {{"LF", 1.0, 1.0, 0.0},
                           {"RF", 1.0, -1.0, 0.5},
                           {"LH", -1.0, 1.0, 0.5},
                           {"RH", -1.0, -1.0, 0.0}};

  GaitResult result;
  result.feet.resize(4);
  result.stance.resize(4);
  const double duration = total / speed;
  const double dt = 1.0 / gait.sample_rate_hz;

  for (int f = 0; f < 4; ++f) {
    const FootDef& def = defs[f];
    result.feet[f].foot_id = def.id;

    auto contact_point = [&](int k) {
      // Contact k holds over stance k; the base sits near s = k*step_length.
      Vec2 pos;
      double yaw;
      path_point(k * gait.step_length, pos, yaw);
      const Vec2 fwd(std::cos(yaw), std::sin(yaw));
      const Vec2 left(-std::sin(yaw), std::cos(yaw));
      const Vec2 xy = pos + fwd * (def.lon * gait.stance_length / 2.0) +
                      left * (def.lat * gait.stance_width / 2.0);
      return Vec3(xy.x(), xy.y(), scene.ground_height(xy.x(), xy.y()));
    };

    for (double t = 0.0; t <= duration + 1e-9; t += dt) {
      const double shifted = t + def.phase * cycle;
      const int k = static_cast<int>(std::floor(shifted / cycle));
      const double tau = shifted - k * cycle;
      const Vec3 c0 = contact_point(k);
      Vec3 p;
      if (tau < gait.stance_s) {
        p = c0;
      } else {
        const Vec3 c1 = contact_point(k + 1);
        const double u = (tau - gait.stance_s) / gait.swing_s;
        const double blend = 0.5 * (1.0 - std::cos(M_PI * u));
        p = c0 + (c1 - c0) * blend;
        p.z() += gait.clearance * std::sin(M_PI * u);
      }
      result.feet[f].samples.push_back({t, p});
    }

    // Analytic stance intervals clipped to the sampled duration.
    for (int k = 0;; ++k) {
      const double begin = k * cycle - def.phase * cycle;
      const double end = begin + gait.stance_s;
      if (begin > duration) break;
      if (end < 0.0) continue;
      StanceInterval interval;
      interval.t_begin = std::max(begin, 0.0);
      interval.t_end = std::min(end, duration);
      interval.contact = contact_point(k);
      if (interval.t_end > interval.t_begin) result.stance[f].push_back(interval);
    }
  }
  return result;
}

/// Keep only points that project inside the camera image (the baselines'
/// field-of-view restriction).
inline PointCloud points_in_fov(const PointCloud& cloud_world, const CameraIntrinsics& intr,
                                const Pose& cam_pose) {
  PointCloud out;
  out.frame = Frame::kWorld;
  const Pose inv = cam_pose.inverse();
  for (const Vec3& p : cloud_world.points) {
    const Vec3 q = inv.apply(p);
    if (!(q.z() > 0.0)) continue;
    const int iu = static_cast<int>(std::lround(intr.fx * q.x() / q.z() + intr.cx));
    const int iv = static_cast<int>(std::lround(intr.fy * q.y() / q.z() + intr.cy));
    if (iu >= 0 && iu < intr.width && iv >= 0 && iv < intr.height) out.points.push_back(p);
  }
  return out;
}

}  // namespace spf
