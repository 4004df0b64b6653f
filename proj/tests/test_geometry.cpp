#include <gtest/gtest.h>

#include <random>

#include "spf/geometry.hpp"

namespace spf {
namespace {

CameraIntrinsics test_intrinsics() {
  CameraIntrinsics intr;
  intr.fx = 500.0;
  intr.fy = 500.0;
  intr.cx = 360.0;
  intr.cy = 270.0;
  intr.width = 720;
  intr.height = 540;
  return intr;
}

TEST(ProjectPoints, OnAxisPoint) {
  PointCloud cloud;
  cloud.points.emplace_back(0.0, 0.0, 2.0);
  const SparseDepthImage img = project_points(cloud, test_intrinsics());
  ASSERT_TRUE(img.is_valid(270, 360));
  EXPECT_DOUBLE_EQ(img.depth.at(270, 360), 2.0);
  EXPECT_EQ(img.valid_count(), 1);
}

TEST(ProjectPoints, BehindCameraDropped) {
  PointCloud cloud;
  cloud.points.emplace_back(0.0, 0.0, -1.0);
  const SparseDepthImage img = project_points(cloud, test_intrinsics());
  EXPECT_EQ(img.valid_count(), 0);
}

TEST(ProjectPoints, OffAxisPinholeFormula) {
  // Independent pinhole evaluation: u = cx + fx*x/z, depth = |p|.
  PointCloud cloud;
  cloud.points.emplace_back(0.5, 0.0, 2.0);
  const CameraIntrinsics intr = test_intrinsics();
  const SparseDepthImage img = project_points(cloud, intr);
  const int expect_u = 360 + static_cast<int>(500.0 * 0.25);
  EXPECT_EQ(expect_u, 485);
  ASSERT_TRUE(img.is_valid(270, expect_u));
  EXPECT_NEAR(img.depth.at(270, expect_u), std::sqrt(0.25 + 4.0), 1e-12);
}

TEST(ProjectPoints, MinDepthWinsPerPixel) {
  PointCloud cloud;
  cloud.points.emplace_back(0.0, 0.0, 3.0);
  cloud.points.emplace_back(0.0, 0.0, 2.0);
  cloud.points.emplace_back(0.0, 0.0, 5.0);
  const SparseDepthImage img = project_points(cloud, test_intrinsics());
  EXPECT_DOUBLE_EQ(img.depth.at(270, 360), 2.0);
}

TEST(ReprojectDepth, RoundTripIdentity) {
  // Points constructed on pixel-center rays round-trip exactly.
  const CameraIntrinsics intr = test_intrinsics();
  PointCloud cloud;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> du(0, intr.width - 1), dv(0, intr.height - 1);
  std::uniform_real_distribution<double> dd(0.5, 20.0);
  for (int i = 0; i < 200; ++i)
    cloud.points.push_back(intr.pixel_ray(du(rng), dv(rng)) * dd(rng));

  const SparseDepthImage img = project_points(cloud, intr);
  const PointCloud back = reproject_depth(img, intr, Pose::identity());

  // Collisions collapse points; verify each reprojected point matches some input.
  EXPECT_EQ(static_cast<int>(back.points.size()), img.valid_count());
  for (const Vec3& q : back.points) {
    double best = 1e9;
    for (const Vec3& p : cloud.points) best = std::min(best, (p - q).norm());
    EXPECT_LT(best, 1e-9);
  }
}

TEST(ReprojectDepth, AllInvalidGivesEmptyCloud) {
  const SparseDepthImage img(540, 720);
  const PointCloud cloud = reproject_depth(img, test_intrinsics(), Pose::identity());
  EXPECT_TRUE(cloud.empty());
}

TEST(ReprojectDepth, PrincipalPixelLandsOnOpticalAxis) {
  const CameraIntrinsics intr = test_intrinsics();
  SparseDepthImage img(intr.height, intr.width);
  img.set(270, 360, 3.0);
  Pose cam;
  cam.translation = Vec3(1.0, 0.0, 0.5);
  const PointCloud cloud = reproject_depth(img, intr, cam);
  ASSERT_EQ(cloud.points.size(), 1u);
  // Identity rotation: optical axis is +z in world.
  EXPECT_NEAR((cloud.points[0] - Vec3(1.0, 0.0, 3.5)).norm(), 0.0, 1e-12);
}

TEST(TransformCloud, IdentityAndTranslationAndYaw) {
  PointCloud cloud;
  cloud.points.emplace_back(0.0, 0.0, 0.0);
  cloud.points.emplace_back(1.0, 0.0, 0.0);

  const PointCloud same = transform_cloud(cloud, Pose::identity(), Frame::kWorld);
  EXPECT_NEAR((same.points[1] - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);

  Pose shift;
  shift.translation = Vec3(1.0, 2.0, 3.0);
  const PointCloud moved = transform_cloud(cloud, shift, Frame::kWorld);
  EXPECT_NEAR((moved.points[0] - Vec3(1, 2, 3)).norm(), 0.0, 1e-15);

  Pose yaw90;
  yaw90.rotation = Quat(Eigen::AngleAxisd(M_PI / 2.0, Vec3::UnitZ()));
  const PointCloud rotated = transform_cloud(cloud, yaw90, Frame::kWorld);
  EXPECT_NEAR((rotated.points[1] - Vec3(0, 1, 0)).norm(), 0.0, 1e-9);
}

TEST(TransformCloud, NonUnitQuaternionRejected) {
  PointCloud cloud;
  cloud.points.emplace_back(1.0, 2.0, 3.0);
  Pose bad;
  bad.rotation = Quat(2.0, 0.0, 0.0, 0.0);  // unnormalized
  EXPECT_THROW(transform_cloud(cloud, bad, Frame::kWorld), std::invalid_argument);
}

TEST(TransformCloud, PreservesPairwiseDistances) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  PointCloud cloud;
  for (int i = 0; i < 30; ++i) cloud.points.emplace_back(d(rng), d(rng), d(rng));
  Pose pose;
  pose.translation = Vec3(d(rng), d(rng), d(rng));
  pose.rotation = Quat(Eigen::AngleAxisd(1.234, Vec3(0.3, -0.5, 0.8).normalized()));
  const PointCloud moved = transform_cloud(cloud, pose, Frame::kWorld);
  for (size_t i = 0; i < cloud.points.size(); ++i)
    for (size_t j = i + 1; j < cloud.points.size(); ++j) {
      const double before = (cloud.points[i] - cloud.points[j]).norm();
      const double after = (moved.points[i] - moved.points[j]).norm();
      EXPECT_NEAR(before, after, 1e-9);
    }
}

SurfaceMap flat_surface(double z, double extent = 20.0, double res = 0.1) {
  GridGeometry geom;
  geom.resolution = res;
  geom.origin = Vec2(-extent / 2.0, -extent / 2.0);
  geom.rows = static_cast<int>(extent / res);
  geom.cols = static_cast<int>(extent / res);
  SurfaceMap map(geom);
  for (int r = 0; r < geom.rows; ++r)
    for (int c = 0; c < geom.cols; ++c) map.set(r, c, z, 0.0);
  return map;
}

TEST(RaycastHeightmap, FlatSurfaceMatchesRayPlaneDistance) {
  const SurfaceMap surface = flat_surface(0.0);
  CameraIntrinsics intr;
  intr.fx = intr.fy = 100.0;
  intr.cx = 50.0;
  intr.cy = 50.0;
  intr.width = 100;
  intr.height = 100;
  const Pose cam = camera_pose_from_yaw_pitch(Vec3(0.0, 0.0, 2.0), 0.0, M_PI / 4.0);
  const RaycastResult cast = raycast_heightmap(surface, intr, cam);

  // Principal pixel descends at 45 degrees: distance = 2*sqrt(2).
  ASSERT_TRUE(cast.depth.is_valid(50, 50));
  EXPECT_NEAR(cast.depth.depth.at(50, 50), 2.0 * std::sqrt(2.0), 1e-9);

  // Every valid pixel matches the analytic ray-plane intersection.
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      if (!cast.depth.is_valid(v, u)) continue;
      const Vec3 dir = cam.rotation * intr.pixel_ray(u, v);
      ASSERT_LT(dir.z(), 0.0);
      const double analytic = -2.0 / dir.z();
      EXPECT_NEAR(cast.depth.depth.at(v, u), analytic, surface.geom.resolution * 1.5);
    }
  }
}

TEST(RaycastHeightmap, HorizontalRayAboveSurfaceMisses) {
  const SurfaceMap surface = flat_surface(0.0);
  CameraIntrinsics intr;
  intr.fx = intr.fy = 100.0;
  intr.cx = 5.0;
  intr.cy = 5.0;
  intr.width = 10;
  intr.height = 10;
  // Pitch 0: the principal ray is parallel to the ground at z = 2.
  const Pose cam = camera_pose_from_yaw_pitch(Vec3(0.0, 0.0, 2.0), 0.0, 0.0);
  const RaycastResult cast = raycast_heightmap(surface, intr, cam);
  EXPECT_FALSE(cast.depth.is_valid(5, 5));
}

TEST(RaycastHeightmap, VariancePassThrough) {
  SurfaceMap surface = flat_surface(0.0);
  for (double& v : surface.variance.data) v = 0.01;
  CameraIntrinsics intr;
  intr.fx = intr.fy = 100.0;
  intr.cx = 5.0;
  intr.cy = 5.0;
  intr.width = 10;
  intr.height = 10;
  const Pose cam = camera_pose_from_yaw_pitch(Vec3(0.0, 0.0, 2.0), 0.0, M_PI / 3.0);
  const RaycastResult cast = raycast_heightmap(surface, intr, cam);
  ASSERT_TRUE(cast.depth.is_valid(5, 5));
  EXPECT_DOUBLE_EQ(cast.variance.at(5, 5), 0.01);
}

TEST(RaycastHeightmap, DepthMonotoneInCameraHeight) {
  const SurfaceMap surface = flat_surface(0.0);
  CameraIntrinsics intr;
  intr.fx = intr.fy = 50.0;
  intr.cx = 5.0;
  intr.cy = 5.0;
  intr.width = 10;
  intr.height = 10;
  double last = 0.0;
  for (double h = 1.0; h <= 4.0; h += 0.5) {
    const Pose cam = camera_pose_from_yaw_pitch(Vec3(0.0, 0.0, h), 0.0, M_PI / 4.0);
    const RaycastResult cast = raycast_heightmap(surface, intr, cam);
    ASSERT_TRUE(cast.depth.is_valid(5, 5));
    const double d = cast.depth.depth.at(5, 5);
    EXPECT_GT(d, last);
    last = d;
  }
}

}  // namespace
}  // namespace spf
