#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spf/image.hpp"

namespace spf {

/// Root mean squared error over masked elements.
inline double compute_rmse(const Raster& pred, const Raster& truth, const Raster& mask) {
  if (!pred.same_shape(truth) || !pred.same_shape(mask))
    throw std::invalid_argument("compute_rmse: shape mismatch");
  double sum = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < pred.data.size(); ++i) {
    if (mask.data[i] == 0.0) continue;
    const double e = pred.data[i] - truth.data[i];
    sum += e * e;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("compute_rmse: empty mask");
  return std::sqrt(sum / n);
}

/// Mean absolute relative error; truth must be positive on the mask.
inline double compute_rel(const Raster& pred, const Raster& truth, const Raster& mask) {
  if (!pred.same_shape(truth) || !pred.same_shape(mask))
    throw std::invalid_argument("compute_rel: shape mismatch");
  double sum = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < pred.data.size(); ++i) {
    if (mask.data[i] == 0.0) continue;
    if (truth.data[i] == 0.0) throw std::invalid_argument("compute_rel: zero truth value in mask");
    sum += std::abs(pred.data[i] - truth.data[i]) / truth.data[i];
    ++n;
  }
  if (n == 0) throw std::invalid_argument("compute_rel: empty mask");
  return sum / n;
}

/// Mean IoU over the two classes; a class absent from both masks counts 1.
inline double compute_miou(const SegMask& pred, const SegMask& truth) {
  if (pred.rows != truth.rows || pred.cols != truth.cols)
    throw std::invalid_argument("compute_miou: shape mismatch");
  double iou_sum = 0.0;
  for (int cls = 0; cls < 2; ++cls) {
    const SegClass c = cls == 0 ? SegClass::kRigid : SegClass::kSupport;
    size_t inter = 0, uni = 0;
    for (size_t i = 0; i < pred.classes.size(); ++i) {
      const bool p = pred.classes[i] == c;
      const bool t = truth.classes[i] == c;
      inter += (p && t);
      uni += (p || t);
    }
    iou_sum += uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
  }
  return iou_sum / 2.0;
}

struct DistanceBin {
  double lo = 0.0;
  double hi = 0.0;
  double rmse = 0.0;
  double rel = 0.0;
  size_t count = 0;
};

struct MetricReport {
  double rmse = 0.0;
  double rel = 0.0;
  double miou = 0.0;
  size_t n_pixels = 0;
  std::vector<DistanceBin> distance_bins;
};

/// Depth metrics over masked pixels, binned by the truth distance
/// (default 0.5 m bins to 5 m). Pixels beyond the max radius are excluded.
inline MetricReport depth_metrics_binned(const Raster& pred, const Raster& truth,
                                         const Raster& mask, double bin_width = 0.5,
                                         double max_distance = 5.0) {
  if (!pred.same_shape(truth) || !pred.same_shape(mask))
    throw std::invalid_argument("depth_metrics_binned: shape mismatch");
  if (!(bin_width > 0.0) || !(max_distance > 0.0))
    throw std::invalid_argument("depth_metrics_binned: bad bins");
  const int n_bins = static_cast<int>(std::ceil(max_distance / bin_width));

  MetricReport report;
  report.distance_bins.resize(n_bins);
  std::vector<double> sq(n_bins, 0.0), ab(n_bins, 0.0);
  double sq_all = 0.0, ab_all = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    report.distance_bins[b].lo = b * bin_width;
    report.distance_bins[b].hi = std::min((b + 1) * bin_width, max_distance);
  }
  for (size_t i = 0; i < pred.data.size(); ++i) {
    if (mask.data[i] == 0.0) continue;
    const double t = truth.data[i];
    if (t <= 0.0 || t > max_distance) continue;
    const int b = std::min(static_cast<int>(t / bin_width), n_bins - 1);
    const double e = pred.data[i] - t;
    sq[b] += e * e;
    ab[b] += std::abs(e) / t;
    ++report.distance_bins[b].count;
    sq_all += e * e;
    ab_all += std::abs(e) / t;
    ++report.n_pixels;
  }
  for (int b = 0; b < n_bins; ++b) {
    const size_t n = report.distance_bins[b].count;
    if (n > 0) {
      report.distance_bins[b].rmse = std::sqrt(sq[b] / n);
      report.distance_bins[b].rel = ab[b] / n;
    }
  }
  if (report.n_pixels > 0) {
    report.rmse = std::sqrt(sq_all / report.n_pixels);
    report.rel = ab_all / report.n_pixels;
  }
  return report;
}

}  // namespace spf
