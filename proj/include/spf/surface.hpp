#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>
#include <vector>

#include "spf/footholds.hpp"
#include "spf/gp.hpp"
#include "spf/grid.hpp"

namespace spf {

struct TilingConfig {
  double tile_size = 2.0;        // meters
  double overlap = 0.5;          // meters, also the training margin
  int min_points_per_tile = 3;

  void validate() const {
    if (!(tile_size > 0.0)) throw std::invalid_argument("TilingConfig: tile_size must be > 0");
    if (overlap < 0.0 || overlap >= tile_size)
      throw std::invalid_argument("TilingConfig: need 0 <= overlap < tile_size");
    if (min_points_per_tile < 1)
      throw std::invalid_argument("TilingConfig: min_points_per_tile must be >= 1");
  }
};

/// Axis-aligned rectangle, [min, max) in both axes.
struct Rect {
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();

  bool contains(const Vec2& p) const {
    return p.x() >= min.x() && p.x() < max.x() && p.y() >= min.y() && p.y() < max.y();
  }
};

/// Overlapping GP tiles fitted over a region. Prediction at a point fuses all
/// covering tiles: mean of tile means, max of tile variances.
class TiledGpSurface {
 public:
  struct Tile {
    Rect rect;      // cells inside this rect are predicted by the tile
    GpTile gp;
  };

  static TiledGpSurface fit(const FootholdSet& fh, const TilingConfig& tiling,
                            const GpParams& gp, const Rect& region, int jobs = 1) {
    tiling.validate();
    TiledGpSurface surface;
    surface.region_ = region;
    if (fh.empty()) return surface;

    const double stride = tiling.tile_size - tiling.overlap;
    const double ext_x = region.max.x() - region.min.x();
    const double ext_y = region.max.y() - region.min.y();
    const int nx = tile_count(ext_x, tiling.tile_size, stride);
    const int ny = tile_count(ext_y, tiling.tile_size, stride);

    struct Pending {
      Rect rect;
      std::vector<Vec2> xy;
      std::vector<double> z;
      std::string id;
    };
    std::vector<Pending> pending;
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        Pending p;
        p.rect.min = region.min + Vec2(ix * stride, iy * stride);
        p.rect.max = p.rect.min + Vec2(tiling.tile_size, tiling.tile_size);
        // Clip the last row/column so tiles never extend past the region.
        p.rect.max.x() = std::min(p.rect.max.x(), region.max.x());
        p.rect.max.y() = std::min(p.rect.max.y(), region.max.y());
        const double m = tiling.overlap;
        for (const Vec3& f : fh.footholds) {
          if (f.x() >= p.rect.min.x() - m && f.x() < p.rect.max.x() + m &&
              f.y() >= p.rect.min.y() - m && f.y() < p.rect.max.y() + m) {
            p.xy.emplace_back(f.x(), f.y());
            p.z.push_back(f.z());
          }
        }
        if (static_cast<int>(p.xy.size()) >= tiling.min_points_per_tile) {
          p.id = std::to_string(ix) + "," + std::to_string(iy);
          pending.push_back(std::move(p));
        }
      }
    }

    surface.tiles_.resize(pending.size());
    auto fit_range = [&](size_t begin, size_t end) {
      for (size_t i = begin; i < end; ++i) {
        surface.tiles_[i].rect = pending[i].rect;
        surface.tiles_[i].gp = GpTile::fit(pending[i].xy, pending[i].z, gp, pending[i].id);
      }
    };
    run_chunks(pending.size(), jobs, fit_range);
    return surface;
  }

  /// Fused prediction at one point; empty when no tile covers it.
  std::optional<std::pair<double, double>> predict(const Vec2& query) const {
    double mean_sum = 0.0;
    double var_max = 0.0;
    int covering = 0;
    for (const Tile& tile : tiles_) {
      if (!tile.rect.contains(query)) continue;
      double m, v;
      tile.gp.predict(query, m, v);
      mean_sum += m;
      var_max = std::max(var_max, v);
      ++covering;
    }
    if (covering == 0) return std::nullopt;
    return std::make_pair(mean_sum / covering, var_max);
  }

  /// Predict every covered cell center of the output grid. Tiles are
  /// evaluated independently (optionally in parallel) and fused in fixed tile
  /// order, so the result does not depend on scheduling.
  SurfaceMap to_map(const GridGeometry& out_geom, int jobs = 1) const {
    out_geom.validate();
    SurfaceMap map(out_geom);
    Raster mean_sum(out_geom.rows, out_geom.cols, 0.0);
    Raster var_max(out_geom.rows, out_geom.cols, 0.0);
    Raster cover(out_geom.rows, out_geom.cols, 0.0);

    struct TileResult {
      std::vector<int> cell_index;
      std::vector<double> means;
      std::vector<double> variances;
    };
    std::vector<TileResult> results(tiles_.size());

    auto eval_range = [&](size_t begin, size_t end) {
      for (size_t i = begin; i < end; ++i) {
        const Tile& tile = tiles_[i];
        TileResult& res = results[i];
        std::vector<Vec2> queries;
        for (int r = 0; r < out_geom.rows; ++r) {
          for (int c = 0; c < out_geom.cols; ++c) {
            const Vec2 center = out_geom.cell_center(r, c);
            if (tile.rect.contains(center)) {
              res.cell_index.push_back(r * out_geom.cols + c);
              queries.push_back(center);
            }
          }
        }
        tile.gp.predict_batch(queries, res.means, res.variances);
      }
    };
    run_chunks(tiles_.size(), jobs, eval_range);

    for (const TileResult& res : results) {
      for (size_t k = 0; k < res.cell_index.size(); ++k) {
        const int idx = res.cell_index[k];
        mean_sum.data[idx] += res.means[k];
        var_max.data[idx] = std::max(var_max.data[idx], res.variances[k]);
        cover.data[idx] += 1.0;
      }
    }
    for (size_t idx = 0; idx < map.height.data.size(); ++idx) {
      if (cover.data[idx] > 0.0) {
        map.height.data[idx] = mean_sum.data[idx] / cover.data[idx];
        map.variance.data[idx] = var_max.data[idx];
        map.valid.data[idx] = 1.0;
      }
    }
    return map;
  }

  const std::vector<Tile>& tiles() const { return tiles_; }

 private:
  static int tile_count(double extent, double tile_size, double stride) {
    if (extent <= tile_size) return 1;
    return 1 + static_cast<int>(std::ceil((extent - tile_size) / stride));
  }

  template <typename Fn>
  static void run_chunks(size_t n, int jobs, Fn&& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || n <= 1) {
      fn(0, n);
      return;
    }
    const size_t chunk = (n + jobs - 1) / jobs;
    std::vector<std::thread> threads;
    for (size_t begin = 0; begin < n; begin += chunk) {
      const size_t end = std::min(n, begin + chunk);
      threads.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : threads) t.join();
  }

  Rect region_;
  std::vector<Tile> tiles_;
};

/// Tiled GP reconstruction of the support surface over the output grid.
/// Returns an all-invalid map when there are no footholds.
inline SurfaceMap reconstruct_surface(const FootholdSet& fh, const TilingConfig& tiling,
                                      const GpParams& gp, const GridGeometry& out_geom,
                                      int jobs = 1) {
  out_geom.validate();
  Rect region;
  region.min = out_geom.origin;
  region.max = out_geom.origin + Vec2(out_geom.extent_x(), out_geom.extent_y());
  if (fh.empty()) return SurfaceMap(out_geom);
  return TiledGpSurface::fit(fh, tiling, gp, region, jobs).to_map(out_geom, jobs);
}

}  // namespace spf
