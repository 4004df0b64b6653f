#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "spf/geometry.hpp"
#include "spf/image.hpp"

namespace spf {

/// Raw predictor output: per-pixel depth estimate and two-class scores
/// (channel 0 rigid, channel 1 support).
struct PredictorOutput {
  Raster depth;
  Raster score_rigid;
  Raster score_support;
};

/// Plug-in boundary shared by the heuristic baseline and trained models, the
/// mapping (x_rgb, x_d) -> (depth estimate, class scores).
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string name() const = 0;
  virtual int version() const = 0;
  /// Must be callable from multiple threads unless thread_safe() is false,
  /// in which case the pipeline serializes calls.
  virtual bool thread_safe() const { return true; }
  virtual PredictorOutput predict(const RgbImage& rgb, const SparseDepthImage& xd) const = 0;
};

inline SegMask seg_from_scores(const Raster& score_rigid, const Raster& score_support) {
  SegMask mask(score_rigid.rows, score_rigid.cols);
  for (int r = 0; r < mask.rows; ++r)
    for (int c = 0; c < mask.cols; ++c)
      mask.at(r, c) = score_support.at(r, c) > score_rigid.at(r, c) ? SegClass::kSupport
                                                                    : SegClass::kRigid;
  return mask;
}

/// Per-pixel output combination: rigid pixels keep the raw measurement
/// (validity included); support pixels take the predicted depth where a raw
/// return exists. Pixels with no raw return stay invalid — the filter adjusts
/// measurements, it does not densify.
inline SparseDepthImage combine_outputs(const SparseDepthImage& xd, const Raster& depth_pred,
                                        const SegMask& seg) {
  if (!xd.depth.same_shape(depth_pred) || seg.rows != xd.rows() || seg.cols != xd.cols())
    throw std::invalid_argument("combine_outputs: dimension mismatch");
  SparseDepthImage out(xd.rows(), xd.cols());
  for (int r = 0; r < xd.rows(); ++r) {
    for (int c = 0; c < xd.cols(); ++c) {
      if (seg.at(r, c) == SegClass::kRigid) {
        out.depth.at(r, c) = xd.depth.at(r, c);
        out.valid.at(r, c) = xd.valid.at(r, c);
      } else if (xd.is_valid(r, c)) {
        const double d = depth_pred.at(r, c);
        if (std::isfinite(d) && d > 0.0) out.set(r, c, d);
      }
    }
  }
  return out;
}

struct FilterOutput {
  Raster depth_pred;
  SegMask seg;
  SparseDepthImage combined;
  PointCloud cloud;  // world frame
};

/// The full filter pipeline for one frame: project the cloud into the camera,
/// run the predictor, combine per the segmentation, reproject. Points outside
/// the frustum (or behind the camera) pass through unchanged.
inline FilterOutput filter_pointcloud(const PointCloud& cloud_world, const RgbImage& rgb,
                                      const CameraIntrinsics& intr, const Pose& cam_pose,
                                      const Predictor& predictor) {
  const PointCloud cam_cloud = transform_cloud(cloud_world, cam_pose.inverse(), Frame::kSensor);
  const SparseDepthImage xd = project_points(cam_cloud, intr);

  PredictorOutput pred = predictor.predict(rgb, xd);
  if (!pred.depth.same_shape(xd.depth) || !pred.score_rigid.same_shape(xd.depth) ||
      !pred.score_support.same_shape(xd.depth))
    throw std::invalid_argument("filter_pointcloud: predictor '" + predictor.name() +
                                "' returned mismatched raster shape");

  FilterOutput out;
  out.seg = seg_from_scores(pred.score_rigid, pred.score_support);
  out.depth_pred = std::move(pred.depth);
  out.combined = combine_outputs(xd, out.depth_pred, out.seg);
  out.cloud = reproject_depth(out.combined, intr, cam_pose);

  // Frustum-external points pass through verbatim.
  for (const Vec3& p : cam_cloud.points) {
    bool inside = false;
    if (p.z() > 0.0) {
      const int iu = static_cast<int>(std::lround(intr.fx * p.x() / p.z() + intr.cx));
      const int iv = static_cast<int>(std::lround(intr.fy * p.y() / p.z() + intr.cy));
      inside = iu >= 0 && iu < intr.width && iv >= 0 && iv < intr.height;
    }
    if (!inside) out.cloud.points.push_back(cam_pose.apply(p));
  }
  return out;
}

/// Non-learned reference predictor. Segments by excess-green score, then fits
/// a robust plane depth(u, v) to rigid-class raw returns per image block and
/// evaluates it at support-class pixels. Blocks with fewer than 3 usable
/// rigid pixels fall back to the raw depth.
class HeuristicPredictor : public Predictor {
 public:
  struct Config {
    double green_threshold = 0.08;  // excess-green index above this => support
    int block_size = 32;            // pixels per fitting region
    int block_margin = 16;          // extra context pulled into each fit
    int robust_iters = 2;           // reweighting passes
  };

  HeuristicPredictor() = default;
  explicit HeuristicPredictor(const Config& cfg) : cfg_(cfg) {}

  std::string name() const override { return "heuristic"; }
  int version() const override { return 1; }

  PredictorOutput predict(const RgbImage& rgb, const SparseDepthImage& xd) const override {
    const int rows = rgb.rows, cols = rgb.cols;
    PredictorOutput out;
    out.depth = xd.depth;          // fallback: raw depth where no fit exists
    out.score_rigid = Raster(rows, cols, 0.0);
    out.score_support = Raster(rows, cols, 0.0);

    SegMask seg(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double exg =
            2.0 * rgb.at(1, r, c) - rgb.at(0, r, c) - rgb.at(2, r, c);
        const bool support = exg > cfg_.green_threshold;
        seg.at(r, c) = support ? SegClass::kSupport : SegClass::kRigid;
        out.score_rigid.at(r, c) = support ? 0.0 : 1.0;
        out.score_support.at(r, c) = support ? 1.0 : 0.0;
      }
    }

    for (int br = 0; br < rows; br += cfg_.block_size) {
      for (int bc = 0; bc < cols; bc += cfg_.block_size) {
        fit_block(seg, xd, br, bc, std::min(br + cfg_.block_size, rows),
                  std::min(bc + cfg_.block_size, cols), out.depth);
      }
    }
    return out;
  }

 private:
  /// Least squares depth = a*u + b*v + d over rigid returns near the block,
  /// with a couple of Huber reweighting passes, evaluated at the block's
  /// support pixels.
  void fit_block(const SegMask& seg, const SparseDepthImage& xd, int r0, int c0, int r1, int c1,
                 Raster& depth_out) const {
    const int m = cfg_.block_margin;
    const int rr0 = std::max(0, r0 - m), cc0 = std::max(0, c0 - m);
    const int rr1 = std::min(seg.rows, r1 + m), cc1 = std::min(seg.cols, c1 + m);

    std::vector<Eigen::Vector3d> pts;  // (u, v, depth)
    for (int r = rr0; r < rr1; ++r)
      for (int c = cc0; c < cc1; ++c)
        if (seg.at(r, c) == SegClass::kRigid && xd.is_valid(r, c))
          pts.emplace_back(c, r, xd.depth.at(r, c));
    if (pts.size() < 3) return;  // keep raw depths in this block

    // Center coordinates for conditioning.
    const double uc = 0.5 * (cc0 + cc1), vc = 0.5 * (rr0 + rr1);
    Eigen::Vector3d coef = Eigen::Vector3d::Zero();
    std::vector<double> w(pts.size(), 1.0);
    for (int iter = 0; iter <= cfg_.robust_iters; ++iter) {
      Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
      Eigen::Vector3d atb = Eigen::Vector3d::Zero();
      for (size_t i = 0; i < pts.size(); ++i) {
        const Eigen::Vector3d row(pts[i].x() - uc, pts[i].y() - vc, 1.0);
        ata += w[i] * row * row.transpose();
        atb += w[i] * row * pts[i].z();
      }
      ata.diagonal().array() += 1e-9;
      coef = ata.ldlt().solve(atb);
      if (iter == cfg_.robust_iters) break;
      const double huber = 0.1;  // meters
      for (size_t i = 0; i < pts.size(); ++i) {
        const double res = std::abs(pts[i].z() - coef.dot(Eigen::Vector3d(
                                                      pts[i].x() - uc, pts[i].y() - vc, 1.0)));
        w[i] = res <= huber ? 1.0 : huber / res;
      }
    }

    for (int r = r0; r < r1; ++r) {
      for (int c = c0; c < c1; ++c) {
        if (seg.at(r, c) != SegClass::kSupport) continue;
        const double d = coef.dot(Eigen::Vector3d(c - uc, r - vc, 1.0));
        if (std::isfinite(d) && d > 0.0) depth_out.at(r, c) = d;
      }
    }
  }

  Config cfg_;
};

}  // namespace spf
