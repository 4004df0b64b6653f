#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spf/core.hpp"
#include "spf/footholds.hpp"
#include "spf/grid.hpp"
#include "spf/pointcloud.hpp"

namespace spf {

inline double yaw_of(const Quat& q) {
  return std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                    1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
}

/// Robot-centric 2.5D elevation grid. The anchor stays cell-aligned so
/// recentering is a pure shift: contents move by whole cells, cells leaving
/// the window are dropped, new cells start invalid.
struct ElevationMap {
  GridGeometry geom;
  Vec2 center = Vec2::Zero();  // cell-aligned anchor
  Raster height;
  Raster variance;
  Raster valid;

  static ElevationMap create(double size = 8.0, double resolution = 0.04) {
    const int cells = static_cast<int>(std::lround(size / resolution));
    if (cells <= 0 || std::abs(cells * resolution - size) > 1e-9)
      throw std::invalid_argument("ElevationMap: size must be an integral number of cells");
    ElevationMap map;
    map.geom.resolution = resolution;
    map.geom.rows = cells;
    map.geom.cols = cells;
    map.geom.origin = Vec2(-size / 2.0, -size / 2.0);
    map.height = Raster(cells, cells, 0.0);
    map.variance = Raster(cells, cells, 0.0);
    map.valid = Raster(cells, cells, 0.0);
    return map;
  }

  bool is_valid(int r, int c) const { return valid.at(r, c) != 0.0; }

  void recenter(const Vec2& target) {
    const double res = geom.resolution;
    const Vec2 snapped(std::round(target.x() / res) * res, std::round(target.y() / res) * res);
    const int shift_c = static_cast<int>(std::lround((snapped.x() - center.x()) / res));
    const int shift_r = static_cast<int>(std::lround((snapped.y() - center.y()) / res));
    if (shift_c == 0 && shift_r == 0) {
      center = snapped;
      geom.origin = center + Vec2(-geom.cols * res / 2.0, -geom.rows * res / 2.0);
      return;
    }
    Raster nh(geom.rows, geom.cols, 0.0), nv(geom.rows, geom.cols, 0.0),
        nval(geom.rows, geom.cols, 0.0);
    for (int r = 0; r < geom.rows; ++r) {
      for (int c = 0; c < geom.cols; ++c) {
        const int sr = r + shift_r, sc = c + shift_c;
        if (sr < 0 || sr >= geom.rows || sc < 0 || sc >= geom.cols) continue;
        nh.at(r, c) = height.at(sr, sc);
        nv.at(r, c) = variance.at(sr, sc);
        nval.at(r, c) = valid.at(sr, sc);
      }
    }
    height = std::move(nh);
    variance = std::move(nv);
    valid = std::move(nval);
    center = snapped;
    geom.origin = center + Vec2(-geom.cols * res / 2.0, -geom.rows * res / 2.0);
  }
};

/// Fuse one world-frame cloud into the map with a per-cell 1D Kalman update.
/// Points landing in a cell within one call are merged into a single batch
/// measurement first, so the result is independent of point order.
inline void fuse_elevation(ElevationMap& map, const PointCloud& cloud, const Pose& robot_pose,
                           double measurement_variance = 0.01) {
  if (!(measurement_variance > 0.0))
    throw std::invalid_argument("fuse_elevation: measurement variance must be > 0");
  map.recenter(Vec2(robot_pose.translation.x(), robot_pose.translation.y()));

  Raster prec_sum(map.geom.rows, map.geom.cols, 0.0);
  Raster weighted(map.geom.rows, map.geom.cols, 0.0);
  const double prec_m = 1.0 / measurement_variance;
  for (const Vec3& p : cloud.points) {
    int r, c;
    map.geom.cell_of(Vec2(p.x(), p.y()), r, c);
    if (!map.geom.inside(r, c)) continue;
    prec_sum.at(r, c) += prec_m;
    weighted.at(r, c) += p.z() * prec_m;
  }

  for (int r = 0; r < map.geom.rows; ++r) {
    for (int c = 0; c < map.geom.cols; ++c) {
      const double pm = prec_sum.at(r, c);
      if (pm == 0.0) continue;
      const double zm = weighted.at(r, c) / pm;
      if (!map.is_valid(r, c)) {
        map.height.at(r, c) = zm;
        map.variance.at(r, c) = 1.0 / pm;
        map.valid.at(r, c) = 1.0;
      } else {
        const double prior_prec = 1.0 / map.variance.at(r, c);
        const double post_prec = prior_prec + pm;
        map.height.at(r, c) = (map.height.at(r, c) * prior_prec + zm * pm) / post_prec;
        map.variance.at(r, c) = 1.0 / post_prec;
      }
    }
  }
}

/// Gaussian-weighted smoothing over valid neighbors; weights renormalize over
/// the valid neighborhood so isolated cells pass through unchanged.
inline ElevationMap smooth_map(const ElevationMap& map, int kernel_radius) {
  if (kernel_radius < 1) throw std::invalid_argument("smooth_map: radius must be >= 1");
  ElevationMap out = map;
  const double sigma = std::max(0.5, kernel_radius / 2.0);
  for (int r = 0; r < map.geom.rows; ++r) {
    for (int c = 0; c < map.geom.cols; ++c) {
      if (!map.is_valid(r, c)) continue;
      double wsum = 0.0, hsum = 0.0;
      for (int dr = -kernel_radius; dr <= kernel_radius; ++dr) {
        for (int dc = -kernel_radius; dc <= kernel_radius; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= map.geom.rows || cc < 0 || cc >= map.geom.cols) continue;
          if (!map.is_valid(rr, cc)) continue;
          const double w = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
          wsum += w;
          hsum += w * map.height.at(rr, cc);
        }
      }
      out.height.at(r, c) = hsum / wsum;
    }
  }
  return out;
}

/// Nearest-neighbor completion of the footholds onto the map grid; ties go to
/// the lowest foothold index.
inline ElevationMap foothold_nn_map(const FootholdSet& fh, const ElevationMap& geometry_like) {
  if (fh.empty()) throw std::invalid_argument("foothold_nn_map: empty foothold set");
  ElevationMap out = geometry_like;
  for (int r = 0; r < out.geom.rows; ++r) {
    for (int c = 0; c < out.geom.cols; ++c) {
      const Vec2 center = out.geom.cell_center(r, c);
      double best = std::numeric_limits<double>::infinity();
      double best_h = 0.0;
      for (const Vec3& f : fh.footholds) {
        const double d2 = (Vec2(f.x(), f.y()) - center).squaredNorm();
        if (d2 < best) {
          best = d2;
          best_h = f.z();
        }
      }
      out.height.at(r, c) = best_h;
      out.variance.at(r, c) = 0.0;
      out.valid.at(r, c) = 1.0;
    }
  }
  return out;
}

struct TraversabilityConfig {
  double max_slope = 30.0 * M_PI / 180.0;  // radians
  double max_step = 0.2;                   // meters
  int roughness_window = 5;                // cells, plane-fit neighborhood
  double max_roughness = 0.05;             // meters, residual std cap
};

struct TraversabilityMap {
  GridGeometry geom;
  Raster score;  // [0, 1], 1 = traversable; invalid cells 0

  TraversabilityMap() = default;
  explicit TraversabilityMap(const GridGeometry& g) : geom(g), score(g.rows, g.cols, 0.0) {}
};

/// Score = slope * step * roughness penalties, each linear from 1 at zero to
/// 0 at its cap. Slope and roughness come from a local plane fit; step is the
/// largest plane-residual gap to an 8-neighbor, so a uniform ramp carries no
/// step penalty.
inline TraversabilityMap estimate_traversability(const ElevationMap& map,
                                                 const TraversabilityConfig& cfg = {}) {
  TraversabilityMap out(map.geom);
  const int half = cfg.roughness_window / 2;

  auto plane_residual = [&](int r, int c, int rr, int cc, const Eigen::Vector3d& coef,
                            const Vec2& center) {
    const Vec2 p = map.geom.cell_center(rr, cc);
    const double fit = coef.x() * (p.x() - center.x()) + coef.y() * (p.y() - center.y()) + coef.z();
    return map.height.at(rr, cc) - fit;
  };

  for (int r = 0; r < map.geom.rows; ++r) {
    for (int c = 0; c < map.geom.cols; ++c) {
      if (!map.is_valid(r, c)) continue;
      const Vec2 center = map.geom.cell_center(r, c);

      Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
      Eigen::Vector3d atb = Eigen::Vector3d::Zero();
      int n = 0;
      for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= map.geom.rows || cc < 0 || cc >= map.geom.cols) continue;
          if (!map.is_valid(rr, cc)) continue;
          const Vec2 p = map.geom.cell_center(rr, cc);
          const Eigen::Vector3d row(p.x() - center.x(), p.y() - center.y(), 1.0);
          ata += row * row.transpose();
          atb += row * map.height.at(rr, cc);
          ++n;
        }
      }
      ata.diagonal().array() += 1e-9;
      const Eigen::Vector3d coef = ata.ldlt().solve(atb);

      const double slope = std::atan(std::hypot(coef.x(), coef.y()));

      double res_sq = 0.0;
      for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= map.geom.rows || cc < 0 || cc >= map.geom.cols) continue;
          if (!map.is_valid(rr, cc)) continue;
          const double res = plane_residual(r, c, rr, cc, coef, center);
          res_sq += res * res;
        }
      }
      const double roughness = n > 0 ? std::sqrt(res_sq / n) : 0.0;

      const double self_res = plane_residual(r, c, r, c, coef, center);
      double step = 0.0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= map.geom.rows || cc < 0 || cc >= map.geom.cols) continue;
          if (!map.is_valid(rr, cc)) continue;
          step = std::max(step, std::abs(plane_residual(r, c, rr, cc, coef, center) - self_res));
        }
      }

      auto penalty = [](double value, double cap) {
        return std::clamp(1.0 - value / cap, 0.0, 1.0);
      };
      out.score.at(r, c) = penalty(slope, cfg.max_slope) * penalty(step, cfg.max_step) *
                           penalty(roughness, cfg.max_roughness);
    }
  }
  return out;
}

/// Per-cell squared-error accumulation in the robot frame (planar pose: x-y
/// translation plus yaw). RMSE, bias, and error variance derive per cell
/// where count > 0.
struct ErrorMapAccumulator {
  GridGeometry geom;  // robot-frame, centered on the robot
  Raster err_sum;
  Raster err_sq_sum;
  Raster count;

  static ErrorMapAccumulator create(double size = 8.0, double resolution = 0.04) {
    const int cells = static_cast<int>(std::lround(size / resolution));
    ErrorMapAccumulator acc;
    acc.geom.resolution = resolution;
    acc.geom.rows = cells;
    acc.geom.cols = cells;
    acc.geom.origin = Vec2(-size / 2.0, -size / 2.0);
    acc.err_sum = Raster(cells, cells, 0.0);
    acc.err_sq_sum = Raster(cells, cells, 0.0);
    acc.count = Raster(cells, cells, 0.0);
    return acc;
  }

  void accumulate(const ElevationMap& map, const SurfaceMap& truth, const Pose& robot_pose) {
    const double yaw = yaw_of(robot_pose.rotation);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    const Vec2 t(robot_pose.translation.x(), robot_pose.translation.y());
    for (int r = 0; r < geom.rows; ++r) {
      for (int c = 0; c < geom.cols; ++c) {
        const Vec2 local = geom.cell_center(r, c);
        const Vec2 world(t.x() + cy * local.x() - sy * local.y(),
                         t.y() + sy * local.x() + cy * local.y());
        int mr, mc;
        map.geom.cell_of(world, mr, mc);
        if (!map.geom.inside(mr, mc) || !map.is_valid(mr, mc)) continue;
        int tr, tc;
        truth.geom.cell_of(world, tr, tc);
        if (!truth.geom.inside(tr, tc) || !truth.is_valid(tr, tc)) continue;
        const double err = map.height.at(mr, mc) - truth.height.at(tr, tc);
        err_sum.at(r, c) += err;
        err_sq_sum.at(r, c) += err * err;
        count.at(r, c) += 1.0;
      }
    }
  }

  double cell_rmse(int r, int c) const {
    const double n = count.at(r, c);
    return n > 0.0 ? std::sqrt(err_sq_sum.at(r, c) / n) : 0.0;
  }

  /// RMSE pooled over all observed cells.
  double total_rmse() const {
    double sq = 0.0, n = 0.0;
    for (size_t i = 0; i < count.data.size(); ++i) {
      sq += err_sq_sum.data[i];
      n += count.data[i];
    }
    return n > 0.0 ? std::sqrt(sq / n) : 0.0;
  }

  /// RMSE pooled over robot-frame cells selected by a predicate on (x, y).
  template <typename Pred>
  double region_rmse(Pred&& pred) const {
    double sq = 0.0, n = 0.0;
    for (int r = 0; r < geom.rows; ++r) {
      for (int c = 0; c < geom.cols; ++c) {
        const Vec2 p = geom.cell_center(r, c);
        if (!pred(p.x(), p.y())) continue;
        sq += err_sq_sum.at(r, c);
        n += count.at(r, c);
      }
    }
    return n > 0.0 ? std::sqrt(sq / n) : 0.0;
  }
};

}  // namespace spf
