#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spf/footholds.hpp"

namespace spf {
namespace {

FootTrajectory make_trajectory(double rate_hz, double duration,
                               const std::function<double(double)>& height) {
  FootTrajectory traj;
  traj.foot_id = "LF";
  const double dt = 1.0 / rate_hz;
  for (double t = 0.0; t <= duration + 1e-12; t += dt)
    traj.samples.push_back({t, Vec3(t, 0.0, height(t))});
  return traj;
}

/// Independent brute-force re-implementation of the dual-window predicate,
/// plain linear scans over the samples.
std::vector<size_t> brute_force_footholds(const FootTrajectory& traj, const WindowParams& p) {
  std::vector<size_t> hits;
  const auto& s = traj.samples;
  if (s.empty() || traj.span() < p.t_b) return hits;
  const double t0 = s.front().t, t_end = s.back().t;
  const double advance = p.advance > 0.0 ? p.advance : p.t_b;
  for (double wb = t0; wb < t_end; wb += advance) {
    double mean_b = 0.0;
    int nb = 0;
    for (const auto& smp : s)
      if (smp.t >= wb && smp.t < wb + p.t_b) {
        mean_b += smp.position.z();
        ++nb;
      }
    if (nb == 0) continue;
    mean_b /= nb;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i].t < wb || s[i].t >= wb + p.t_b) continue;
      const double lo = s[i].t - p.t_s / 2.0, hi = s[i].t + p.t_s / 2.0;
      if (lo < t0 || hi > t_end) continue;
      double mean_s = 0.0, zmin = 1e18, zmax = -1e18;
      int ns = 0;
      for (const auto& smp : s)
        if (smp.t >= lo && smp.t < hi) {
          mean_s += smp.position.z();
          zmin = std::min(zmin, smp.position.z());
          zmax = std::max(zmax, smp.position.z());
          ++ns;
        }
      if (ns == 0) continue;
      mean_s /= ns;
      const double tie = kMeanTieTolerance * std::max(1.0, std::abs(mean_b));
      if (mean_s <= mean_b + tie && zmax - zmin <= p.r_t) hits.push_back(i);
    }
  }
  return hits;
}

TEST(ExtractFootholds, ConstantHeightAllInteriorQualify) {
  const FootTrajectory traj = make_trajectory(100.0, 3.0, [](double) { return 0.2; });
  WindowParams params;
  const FootholdExtraction out = extract_footholds(traj, params);
  EXPECT_FALSE(out.trajectory_too_short);
  // Every sample whose small window fits inside the span qualifies.
  const auto brute = brute_force_footholds(traj, params);
  EXPECT_EQ(out.set.size(), brute.size());
  EXPECT_GT(out.set.size(), 0.9 * traj.samples.size() - 10);
  for (const Vec3& f : out.set.footholds) EXPECT_DOUBLE_EQ(f.z(), 0.2);
}

TEST(ExtractFootholds, SwingSinusoidOnlyNearMinima) {
  // Amplitude far above r_t, no dwell: only locally flat samples near minima.
  const double period = 0.8;
  const FootTrajectory traj = make_trajectory(200.0, 4.0, [&](double t) {
    return 0.1 * (1.0 - std::cos(2.0 * M_PI * t / period)) / 2.0;
  });
  WindowParams params;  // paper values
  const FootholdExtraction out = extract_footholds(traj, params);

  // Matches the brute-force oracle exactly.
  const auto brute = brute_force_footholds(traj, params);
  ASSERT_EQ(out.set.size(), brute.size());
  for (size_t i = 0; i < brute.size(); ++i) {
    EXPECT_NEAR((out.set.footholds[i] - traj.samples[brute[i]].position).norm(), 0.0, 1e-15);
  }

  // All emitted samples sit near minima of the sinusoid (z close to 0).
  for (const Vec3& f : out.set.footholds) EXPECT_LT(f.z(), 0.02);
  EXPECT_GT(out.set.size(), 0u);
}

TEST(ExtractFootholds, TooShortTrajectoryFlagged) {
  const FootTrajectory traj = make_trajectory(100.0, 1.0, [](double) { return 0.0; });
  WindowParams params;  // t_b = 1.5 > 1.0 span
  const FootholdExtraction out = extract_footholds(traj, params);
  EXPECT_TRUE(out.trajectory_too_short);
  EXPECT_TRUE(out.set.empty());
}

TEST(ExtractFootholds, EmittedSetMatchesBruteForceOnNoisyGait) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.003);
  const double cycle = 0.8, stance = 0.4;
  const FootTrajectory traj = make_trajectory(100.0, 5.0, [&](double t) {
    const double tau = std::fmod(t, cycle);
    const double base = tau < stance ? 0.0 : 0.15 * std::sin(M_PI * (tau - stance) / (cycle - stance));
    return base + noise(rng);
  });
  WindowParams params;
  const FootholdExtraction out = extract_footholds(traj, params);
  const auto brute = brute_force_footholds(traj, params);
  ASSERT_EQ(out.set.size(), brute.size());
  for (size_t i = 0; i < brute.size(); ++i)
    EXPECT_NEAR((out.set.footholds[i] - traj.samples[brute[i]].position).norm(), 0.0, 1e-15);
}

TEST(ExtractFootholds, TranslationEquivariant) {
  const FootTrajectory traj = make_trajectory(100.0, 3.0, [](double t) {
    return 0.05 * std::sin(2.0 * M_PI * t / 0.8);
  });
  FootTrajectory shifted = traj;
  for (auto& s : shifted.samples) s.position.z() += 1.7;
  WindowParams params;
  const auto a = extract_footholds(traj, params);
  const auto b = extract_footholds(shifted, params);
  ASSERT_EQ(a.set.size(), b.set.size());
  for (size_t i = 0; i < a.set.size(); ++i)
    EXPECT_NEAR(a.set.footholds[i].z() + 1.7, b.set.footholds[i].z(), 1e-12);
}

TEST(ExtractFootholds, RaisingThresholdNeverRemoves) {
  const FootTrajectory traj = make_trajectory(150.0, 4.0, [](double t) {
    return 0.08 * std::sin(2.0 * M_PI * t / 0.9) + 0.01 * std::sin(20.0 * t);
  });
  WindowParams tight, loose;
  tight.r_t = 0.01;
  loose.r_t = 0.05;
  const auto small = extract_footholds(traj, tight);
  const auto large = extract_footholds(traj, loose);
  EXPECT_GE(large.set.size(), small.set.size());
  // Every tight foothold appears among the loose ones.
  for (const Vec3& f : small.set.footholds) {
    bool found = false;
    for (const Vec3& g : large.set.footholds)
      if ((f - g).norm() < 1e-15) found = true;
    EXPECT_TRUE(found);
  }
}

TEST(RasterizeFootholds, CellAssignmentAndMean) {
  GridGeometry geom;
  geom.origin = Vec2(0.0, 0.0);
  geom.resolution = 0.04;
  geom.rows = 10;
  geom.cols = 10;

  FootholdSet fh;
  fh.footholds.emplace_back(0.02, 0.02, 0.5);
  FootholdGrid grid = rasterize_footholds(fh, geom);
  ASSERT_EQ(grid.cells.size(), 1u);
  EXPECT_DOUBLE_EQ(grid.cells.at({0, 0}).height, 0.5);
  EXPECT_EQ(grid.cells.at({0, 0}).count, 1);

  fh.footholds.emplace_back(0.03, 0.01, 0.4);
  fh.footholds[0].z() = 0.4;
  fh.footholds[1].z() = 0.6;
  grid = rasterize_footholds(fh, geom);
  EXPECT_DOUBLE_EQ(grid.cells.at({0, 0}).height, 0.5);
  EXPECT_EQ(grid.cells.at({0, 0}).count, 2);
}

TEST(RasterizeFootholds, EmptySetAndOutOfBounds) {
  GridGeometry geom;
  geom.origin = Vec2(0.0, 0.0);
  geom.resolution = 0.1;
  geom.rows = 5;
  geom.cols = 5;
  const FootholdGrid empty = rasterize_footholds(FootholdSet{}, geom);
  EXPECT_TRUE(empty.cells.empty());

  FootholdSet fh;
  fh.footholds.emplace_back(10.0, 10.0, 1.0);  // outside
  const FootholdGrid grid = rasterize_footholds(fh, geom);
  EXPECT_TRUE(grid.cells.empty());
  EXPECT_EQ(grid.dropped, 1);
}

}  // namespace
}  // namespace spf
