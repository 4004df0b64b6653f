#include <gtest/gtest.h>

#include <Eigen/LU>
#include <algorithm>
#include <random>

#include "spf/surface.hpp"

namespace spf {
namespace {

TEST(RbfKernel, AnalyticValues) {
  EXPECT_DOUBLE_EQ(rbf_kernel(Vec2(1.0, 2.0), Vec2(1.0, 2.0), 0.7), 1.0);
  // Distance l*sqrt(2) gives exp(-1).
  const double l = 0.4;
  EXPECT_NEAR(rbf_kernel(Vec2(0.0, 0.0), Vec2(l * std::sqrt(2.0), 0.0), l), std::exp(-1.0),
              1e-15);
  EXPECT_NEAR(rbf_kernel(Vec2(0.0, 0.0), Vec2(1.0, 0.0), 0.5), std::exp(-2.0), 1e-15);
  EXPECT_THROW(rbf_kernel(Vec2(0, 0), Vec2(1, 0), 0.0), std::invalid_argument);
  EXPECT_THROW(rbf_kernel(Vec2(0, 0), Vec2(1, 0), -1.0), std::invalid_argument);
}

TEST(GpTile, SinglePointPrediction) {
  GpParams params;
  params.lengthscale = 0.5;
  params.noise = 0.1;
  const GpTile tile = GpTile::fit({Vec2(0.0, 0.0)}, {1.0}, params);
  double mean, var;
  tile.predict(Vec2(0.0, 0.0), mean, var);
  // Centered target is zero, so the mean is exactly the training height.
  EXPECT_DOUBLE_EQ(mean, 1.0);
  // v* = 1 + sigma^2 - 1/(1 + sigma^2), evaluated by hand.
  EXPECT_NEAR(var, 1.01 - 1.0 / 1.01, 1e-12);
  EXPECT_NEAR(var, 0.0199, 1e-4);
}

TEST(GpTile, DuplicateInputsExerciseJitter) {
  GpParams params;
  params.lengthscale = 0.5;
  params.noise = 0.0;  // singular Gram matrix without jitter
  const GpTile tile = GpTile::fit({Vec2(0.0, 0.0), Vec2(0.0, 0.0)}, {0.4, 0.6}, params);
  EXPECT_GT(tile.jitter(), 0.0);
  EXPECT_LT(tile.factorization_residual(), 1e-6);
  double mean, var;
  tile.predict(Vec2(0.0, 0.0), mean, var);
  EXPECT_TRUE(std::isfinite(mean));
  EXPECT_NEAR(mean, 0.5, 1e-3);  // noise-free GP averages the duplicates
}

TEST(GpTile, FactorizationResidualSmall) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<Vec2> xy;
  std::vector<double> z;
  for (int i = 0; i < 20; ++i) {
    xy.emplace_back(d(rng), d(rng));
    z.push_back(0.3 * xy.back().x() - 0.2 * xy.back().y() + 0.1);
  }
  GpParams params;
  params.lengthscale = 0.4;
  params.noise = 0.05;
  const GpTile tile = GpTile::fit(xy, z, params);
  EXPECT_LT(tile.factorization_residual(), 1e-8);
}

TEST(GpTile, FarQueryRevertsToLocalMean) {
  GpParams params;
  params.lengthscale = 0.3;
  params.noise = 0.02;
  const std::vector<Vec2> xy = {Vec2(0, 0), Vec2(0.1, 0), Vec2(0, 0.1)};
  const std::vector<double> z = {1.0, 1.2, 0.8};
  const GpTile tile = GpTile::fit(xy, z, params);
  double mean, var;
  tile.predict(Vec2(100.0, 100.0), mean, var);
  EXPECT_NEAR(mean, 1.0, 1e-12);  // mean of z
  EXPECT_NEAR(var, 1.0 + params.noise * params.noise, 1e-12);
}

TEST(GpTile, NoiselessLimitInterpolates) {
  GpParams params;
  params.lengthscale = 0.5;
  params.noise = 1e-6;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<Vec2> xy;
  std::vector<double> z;
  for (int i = 0; i < 15; ++i) {
    xy.emplace_back(d(rng), d(rng));
    z.push_back(0.1 + 0.2 * std::sin(xy.back().x()) + 0.1 * xy.back().y());
  }
  const GpTile tile = GpTile::fit(xy, z, params);
  for (size_t i = 0; i < xy.size(); ++i) {
    double mean, var;
    tile.predict(xy[i], mean, var);
    EXPECT_NEAR(mean, z[i], 1e-3);
    EXPECT_GE(var, 0.0);
  }
}

TEST(GpTile, VarianceBounds) {
  GpParams params;
  params.lengthscale = 0.25;
  params.noise = 0.05;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<Vec2> xy;
  std::vector<double> z;
  for (int i = 0; i < 40; ++i) {
    xy.emplace_back(d(rng), d(rng));
    z.push_back(d(rng) * 0.1);
  }
  const GpTile tile = GpTile::fit(xy, z, params);
  const double upper = 1.0 + params.noise * params.noise + 1e-9;
  for (int i = 0; i < 100; ++i) {
    double mean, var;
    tile.predict(Vec2(d(rng) * 2.0, d(rng) * 2.0), mean, var);
    EXPECT_GE(var, 0.0);
    EXPECT_LE(var, upper);
  }
}

FootholdSet plane_footholds(int n, uint64_t seed, double extent = 4.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, extent);
  FootholdSet fh;
  for (int i = 0; i < n; ++i) {
    const double x = d(rng), y = d(rng);
    fh.footholds.emplace_back(x, y, 0.1 + 0.05 * x);
  }
  return fh;
}

GridGeometry square_grid(double extent, double res) {
  GridGeometry geom;
  geom.origin = Vec2(0.0, 0.0);
  geom.resolution = res;
  geom.rows = static_cast<int>(extent / res);
  geom.cols = static_cast<int>(extent / res);
  return geom;
}

TEST(ReconstructSurface, PlaneOracleWithinHull) {
  const FootholdSet fh = plane_footholds(120, 21);
  TilingConfig tiling;
  tiling.tile_size = 2.0;
  tiling.overlap = 0.5;
  tiling.min_points_per_tile = 3;
  GpParams gp;
  gp.lengthscale = 0.5;
  gp.noise = 0.01;
  const GridGeometry geom = square_grid(4.0, 0.1);
  const SurfaceMap map = reconstruct_surface(fh, tiling, gp, geom);

  // Check the interior of the foothold hull (margin shrinks boundary effects).
  double sq = 0.0;
  int n = 0;
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      const Vec2 p = geom.cell_center(r, c);
      if (p.x() < 0.5 || p.x() > 3.5 || p.y() < 0.5 || p.y() > 3.5) continue;
      ASSERT_TRUE(map.is_valid(r, c));
      const double truth = 0.1 + 0.05 * p.x();
      sq += (map.height.at(r, c) - truth) * (map.height.at(r, c) - truth);
      ++n;
    }
  }
  ASSERT_GT(n, 0);
  EXPECT_LT(std::sqrt(sq / n), 0.02);
}

TEST(ReconstructSurface, FusionRuleMeanOfMeansMaxOfVariances) {
  // Two overlapping tiles cover the query; fused prediction must equal the
  // hand-fused per-tile predictions.
  FootholdSet fh = plane_footholds(60, 33, 3.0);
  TilingConfig tiling;
  tiling.tile_size = 2.0;
  tiling.overlap = 1.0;  // wide overlap forces multi-tile coverage
  tiling.min_points_per_tile = 3;
  GpParams gp;
  gp.lengthscale = 0.4;
  gp.noise = 0.02;
  Rect region;
  region.min = Vec2(0.0, 0.0);
  region.max = Vec2(3.0, 3.0);
  const TiledGpSurface surface = TiledGpSurface::fit(fh, tiling, gp, region);
  ASSERT_GT(surface.tiles().size(), 1u);

  const Vec2 query(1.5, 1.5);
  double mean_sum = 0.0, var_max = 0.0;
  int covering = 0;
  for (const auto& tile : surface.tiles()) {
    if (!tile.rect.contains(query)) continue;
    double m, v;
    tile.gp.predict(query, m, v);
    mean_sum += m;
    var_max = std::max(var_max, v);
    ++covering;
  }
  ASSERT_GE(covering, 2);
  const auto fused = surface.predict(query);
  ASSERT_TRUE(fused.has_value());
  EXPECT_NEAR(fused->first, mean_sum / covering, 1e-12);
  EXPECT_DOUBLE_EQ(fused->second, var_max);
}

TEST(ReconstructSurface, SingleTileMatchesDirectFullGp) {
  // Independent oracle: explicit LU solve of the same centered system.
  const FootholdSet fh = plane_footholds(50, 7, 3.0);
  TilingConfig tiling;
  tiling.tile_size = 10.0;  // one tile covers everything
  tiling.overlap = 0.0;
  tiling.min_points_per_tile = 1;
  GpParams gp;
  gp.lengthscale = 0.5;
  gp.noise = 0.02;
  const GridGeometry geom = square_grid(3.0, 0.25);
  const SurfaceMap map = reconstruct_surface(fh, tiling, gp, geom);

  const int n = static_cast<int>(fh.size());
  Eigen::MatrixXd gram(n, n);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) {
    z[i] = fh.footholds[i].z();
    for (int j = 0; j < n; ++j)
      gram(i, j) = rbf_kernel(Vec2(fh.footholds[i].x(), fh.footholds[i].y()),
                              Vec2(fh.footholds[j].x(), fh.footholds[j].y()), gp.lengthscale);
  }
  gram.diagonal().array() += gp.noise * gp.noise;
  const double z_mean = z.mean();
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  const Eigen::VectorXd alpha = lu.solve((z.array() - z_mean).matrix());

  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      ASSERT_TRUE(map.is_valid(r, c));
      const Vec2 p = geom.cell_center(r, c);
      Eigen::VectorXd k(n);
      for (int i = 0; i < n; ++i)
        k[i] = rbf_kernel(p, Vec2(fh.footholds[i].x(), fh.footholds[i].y()), gp.lengthscale);
      const double mean = z_mean + k.dot(alpha);
      const double var = 1.0 + gp.noise * gp.noise - k.dot(lu.solve(k));
      EXPECT_NEAR(map.height.at(r, c), mean, 1e-9);
      EXPECT_NEAR(map.variance.at(r, c), var, 1e-9);
    }
  }
}

TEST(ReconstructSurface, PermutationInvariance) {
  FootholdSet fh = plane_footholds(80, 17);
  TilingConfig tiling;
  GpParams gp;
  const GridGeometry geom = square_grid(4.0, 0.2);
  const SurfaceMap a = reconstruct_surface(fh, tiling, gp, geom);

  std::mt19937_64 rng(99);
  std::shuffle(fh.footholds.begin(), fh.footholds.end(), rng);
  const SurfaceMap b = reconstruct_surface(fh, tiling, gp, geom);

  for (size_t i = 0; i < a.height.data.size(); ++i) {
    EXPECT_EQ(a.valid.data[i], b.valid.data[i]);
    if (a.valid.data[i] != 0.0) {
      EXPECT_NEAR(a.height.data[i], b.height.data[i], 1e-9);
      EXPECT_NEAR(a.variance.data[i], b.variance.data[i], 1e-9);
    }
  }
}

TEST(ReconstructSurface, ParallelTilesMatchSerial) {
  const FootholdSet fh = plane_footholds(150, 41, 6.0);
  TilingConfig tiling;
  GpParams gp;
  const GridGeometry geom = square_grid(6.0, 0.1);
  const SurfaceMap serial = reconstruct_surface(fh, tiling, gp, geom, 1);
  const SurfaceMap parallel = reconstruct_surface(fh, tiling, gp, geom, 4);
  for (size_t i = 0; i < serial.height.data.size(); ++i) {
    EXPECT_EQ(serial.valid.data[i], parallel.valid.data[i]);
    EXPECT_DOUBLE_EQ(serial.height.data[i], parallel.height.data[i]);
    EXPECT_DOUBLE_EQ(serial.variance.data[i], parallel.variance.data[i]);
  }
}

TEST(ReconstructSurface, NoFootholdsGivesInvalidMap) {
  TilingConfig tiling;
  GpParams gp;
  const GridGeometry geom = square_grid(2.0, 0.5);
  const SurfaceMap map = reconstruct_surface(FootholdSet{}, tiling, gp, geom);
  EXPECT_EQ(map.valid_count(), 0);
}

}  // namespace
}  // namespace spf
