#pragma once

#include <cmath>
#include <stdexcept>

#include "spf/core.hpp"
#include "spf/image.hpp"

namespace spf {

/// Geometry of an axis-aligned 2D grid. Cell (r, c) spans
/// [origin + (c, r) * res, origin + (c + 1, r + 1) * res); its center is at
/// origin + (c + 0.5, r + 0.5) * res. Rows index y, columns index x.
struct GridGeometry {
  Vec2 origin = Vec2::Zero();  // min corner, meters
  double resolution = 0.0;     // meters per cell
  int rows = 0;
  int cols = 0;

  void validate() const {
    if (resolution <= 0.0) throw std::invalid_argument("GridGeometry: resolution must be > 0");
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("GridGeometry: empty grid");
  }

  Vec2 cell_center(int r, int c) const {
    return origin + Vec2((c + 0.5) * resolution, (r + 0.5) * resolution);
  }

  /// Cell containing point p; may be out of range, caller checks inside().
  void cell_of(const Vec2& p, int& r, int& c) const {
    c = static_cast<int>(std::floor((p.x() - origin.x()) / resolution));
    r = static_cast<int>(std::floor((p.y() - origin.y()) / resolution));
  }

  bool inside(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }

  double extent_x() const { return cols * resolution; }
  double extent_y() const { return rows * resolution; }
};

/// 2.5D height + variance grid with validity mask, the fused GP output.
struct SurfaceMap {
  GridGeometry geom;
  Raster height;
  Raster variance;
  Raster valid;  // 1.0 / 0.0

  SurfaceMap() = default;
  explicit SurfaceMap(const GridGeometry& g)
      : geom(g), height(g.rows, g.cols, 0.0), variance(g.rows, g.cols, 0.0),
        valid(g.rows, g.cols, 0.0) {}

  bool is_valid(int r, int c) const { return valid.at(r, c) != 0.0; }

  void set(int r, int c, double h, double var) {
    height.at(r, c) = h;
    variance.at(r, c) = var;
    valid.at(r, c) = 1.0;
  }

  int valid_count() const {
    int n = 0;
    for (double v : valid.data) n += (v != 0.0);
    return n;
  }
};

}  // namespace spf
