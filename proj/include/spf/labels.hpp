#pragma once

#include <optional>
#include <stdexcept>

#include "spf/geometry.hpp"
#include "spf/grid.hpp"
#include "spf/image.hpp"

namespace spf {

/// Self-supervised support-surface depth label: per-pixel ray distance to the
/// reconstructed surface, its GP variance, and the validity mask C_ss.
struct SsdeLabel {
  Raster depth;
  Raster variance;
  Raster valid;  // 1.0 / 0.0

  SsdeLabel() = default;
  SsdeLabel(int rows, int cols)
      : depth(rows, cols, 0.0), variance(rows, cols, 0.0), valid(rows, cols, 0.0) {}

  int rows() const { return depth.rows; }
  int cols() const { return depth.cols; }
  bool is_valid(int r, int c) const { return valid.at(r, c) != 0.0; }

  int valid_count() const {
    int n = 0;
    for (double v : valid.data) n += (v != 0.0);
    return n;
  }
};

/// Raycast the surface into the camera and keep pixels whose GP variance is
/// strictly below tau_max.
inline SsdeLabel generate_ssde_label(const SurfaceMap& surface, const CameraIntrinsics& intr,
                                     const Pose& cam_pose, double tau_max) {
  RaycastResult cast = raycast_heightmap(surface, intr, cam_pose);
  SsdeLabel label(intr.height, intr.width);
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      if (!cast.depth.is_valid(v, u)) continue;
      const double var = cast.variance.at(v, u);
      label.depth.at(v, u) = cast.depth.depth.at(v, u);
      label.variance.at(v, u) = var;
      if (var < tau_max) label.valid.at(v, u) = 1.0;
    }
  }
  return label;
}

/// One frame's worth of training data; all rasters share dimensions.
struct TrainingSample {
  RgbImage rgb;
  SparseDepthImage sparse_depth;
  SsdeLabel ssde;
  std::optional<SegMask> seg;

  void validate() const {
    const int r = rgb.rows, c = rgb.cols;
    if (sparse_depth.rows() != r || sparse_depth.cols() != c || ssde.rows() != r ||
        ssde.cols() != c || (seg && (seg->rows != r || seg->cols != c)))
      throw std::invalid_argument("TrainingSample: raster dimensions differ");
  }
};

/// Assemble a sample from world-frame scene inputs: project the cloud into the
/// camera, raycast the surface for the depth label, attach the segmentation
/// mask when present.
inline TrainingSample build_training_sample(const RgbImage& rgb, const PointCloud& cloud_world,
                                            const SurfaceMap& surface,
                                            const CameraIntrinsics& intr, const Pose& cam_pose,
                                            double tau_max,
                                            const std::optional<SegMask>& seg = std::nullopt) {
  if (rgb.rows != intr.height || rgb.cols != intr.width)
    throw std::invalid_argument("build_training_sample: rgb dimensions do not match intrinsics");
  TrainingSample sample;
  sample.rgb = rgb;
  const PointCloud cam_cloud = transform_cloud(cloud_world, cam_pose.inverse(), Frame::kSensor);
  sample.sparse_depth = project_points(cam_cloud, intr);
  sample.ssde = generate_ssde_label(surface, intr, cam_pose, tau_max);
  sample.seg = seg;
  sample.validate();
  return sample;
}

}  // namespace spf
