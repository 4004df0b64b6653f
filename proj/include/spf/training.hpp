#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "spf/labels.hpp"
#include "spf/net.hpp"

namespace spf {

enum class DepthLossMode { kMean, kSum };

struct LossOptions {
  double w = 0.02;                           // depth-loss weight in the total
  DepthLossMode mode = DepthLossMode::kMean;
  double variance_floor = 1e-6;              // clamps sigma^-2 weights
};

struct LossReport {
  double l_de = 0.0;
  double l_seg = 0.0;
  double l_total = 0.0;
  int valid_pixel_count = 0;
  bool empty_depth_mask = false;
};

/// Variance-inverse-weighted squared depth error over the label's valid set.
/// Mean form divides by |C_ss|; sum form is the raw sum.
inline double depth_loss(const Raster& pred, const SsdeLabel& ssde,
                         DepthLossMode mode = DepthLossMode::kMean,
                         double variance_floor = 1e-6, bool* empty_mask = nullptr) {
  if (!pred.same_shape(ssde.depth)) throw std::invalid_argument("depth_loss: shape mismatch");
  double sum = 0.0;
  int count = 0;
  for (int r = 0; r < pred.rows; ++r) {
    for (int c = 0; c < pred.cols; ++c) {
      if (!ssde.is_valid(r, c)) continue;
      const double var = std::max(ssde.variance.at(r, c), variance_floor);
      const double err = pred.at(r, c) - ssde.depth.at(r, c);
      sum += err * err / var;
      ++count;
    }
  }
  if (empty_mask) *empty_mask = (count == 0);
  if (count == 0) return 0.0;
  return mode == DepthLossMode::kMean ? sum / count : sum;
}

/// Mean two-class cross-entropy from raw scores, stabilized log-sum-exp.
inline double seg_loss(const Raster& score_rigid, const Raster& score_support,
                       const SegMask& truth) {
  if (score_rigid.rows != truth.rows || score_rigid.cols != truth.cols ||
      !score_rigid.same_shape(score_support))
    throw std::invalid_argument("seg_loss: shape mismatch");
  double sum = 0.0;
  for (int r = 0; r < truth.rows; ++r) {
    for (int c = 0; c < truth.cols; ++c) {
      const double s0 = score_rigid.at(r, c);
      const double s1 = score_support.at(r, c);
      const double m = std::max(s0, s1);
      const double lse = m + std::log(std::exp(s0 - m) + std::exp(s1 - m));
      const double s_true = truth.at(r, c) == SegClass::kRigid ? s0 : s1;
      sum += lse - s_true;
    }
  }
  return sum / (static_cast<double>(truth.rows) * truth.cols);
}

inline double total_loss(double l_seg, double l_de, double w) {
  if (l_seg < 0.0 || l_de < 0.0) throw std::invalid_argument("total_loss: losses must be >= 0");
  return l_seg + w * l_de;
}

/// Horizontal flip + random crop applied identically to every raster of the
/// sample; deterministic under the configured seed.
struct AugmentConfig {
  double hflip_prob = 0.5;
  int crop_from_rows = 540;
  int crop_from_cols = 720;
  int crop_to_rows = 352;
  int crop_to_cols = 704;
  uint64_t seed = 0;

  void validate() const {
    if (crop_to_rows > crop_from_rows || crop_to_cols > crop_from_cols)
      throw std::invalid_argument("AugmentConfig: crop_to exceeds crop_from");
    if (hflip_prob < 0.0 || hflip_prob > 1.0)
      throw std::invalid_argument("AugmentConfig: hflip_prob out of [0,1]");
  }
};

namespace detail {

inline void hflip(Raster& r) {
  for (int y = 0; y < r.rows; ++y)
    for (int x = 0; x < r.cols / 2; ++x) std::swap(r.at(y, x), r.at(y, r.cols - 1 - x));
}

inline Raster crop(const Raster& r, int r0, int c0, int rows, int cols) {
  Raster out(rows, cols, 0.0);
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x) out.at(y, x) = r.at(r0 + y, c0 + x);
  return out;
}

}  // namespace detail

inline TrainingSample augment_sample(const TrainingSample& sample, const AugmentConfig& cfg) {
  cfg.validate();
  sample.validate();
  const int rows = sample.rgb.rows, cols = sample.rgb.cols;
  if (rows < cfg.crop_to_rows || cols < cfg.crop_to_cols)
    throw std::invalid_argument("augment_sample: sample smaller than crop_to");

  std::mt19937_64 rng(cfg.seed);
  const bool flip = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg.hflip_prob;
  const int max_r0 = rows - cfg.crop_to_rows;
  const int max_c0 = cols - cfg.crop_to_cols;
  const int r0 = max_r0 > 0 ? static_cast<int>(std::uniform_int_distribution<int>(0, max_r0)(rng)) : 0;
  const int c0 = max_c0 > 0 ? static_cast<int>(std::uniform_int_distribution<int>(0, max_c0)(rng)) : 0;

  // Collect every raster, transform them the same way.
  TrainingSample out = sample;
  auto apply = [&](Raster& r) {
    if (flip) detail::hflip(r);
    r = detail::crop(r, r0, c0, cfg.crop_to_rows, cfg.crop_to_cols);
  };
  Raster red(rows, cols), green(rows, cols), blue(rows, cols);
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x) {
      red.at(y, x) = sample.rgb.at(0, y, x);
      green.at(y, x) = sample.rgb.at(1, y, x);
      blue.at(y, x) = sample.rgb.at(2, y, x);
    }
  apply(red);
  apply(green);
  apply(blue);
  out.rgb = RgbImage(cfg.crop_to_rows, cfg.crop_to_cols);
  for (int y = 0; y < cfg.crop_to_rows; ++y)
    for (int x = 0; x < cfg.crop_to_cols; ++x) {
      out.rgb.at(0, y, x) = red.at(y, x);
      out.rgb.at(1, y, x) = green.at(y, x);
      out.rgb.at(2, y, x) = blue.at(y, x);
    }
  apply(out.sparse_depth.depth);
  apply(out.sparse_depth.valid);
  apply(out.ssde.depth);
  apply(out.ssde.variance);
  apply(out.ssde.valid);
  if (sample.seg) {
    Raster seg_r(rows, cols);
    for (int y = 0; y < rows; ++y)
      for (int x = 0; x < cols; ++x)
        seg_r.at(y, x) = sample.seg->at(y, x) == SegClass::kSupport ? 1.0 : 0.0;
    apply(seg_r);
    SegMask seg(cfg.crop_to_rows, cfg.crop_to_cols);
    for (int y = 0; y < cfg.crop_to_rows; ++y)
      for (int x = 0; x < cfg.crop_to_cols; ++x)
        seg.at(y, x) = seg_r.at(y, x) != 0.0 ? SegClass::kSupport : SegClass::kRigid;
    out.seg = seg;
  }
  return out;
}

/// Loss of the net on one sample, optionally accumulating gradients of the
/// total loss into `grads` (shapes from TinyConvNet::zero_grads).
inline LossReport net_loss(const TinyConvNet& net, const TrainingSample& sample,
                           const LossOptions& opt, std::vector<ConvLayer>* grads = nullptr) {
  sample.validate();
  const TinyConvNet::Cache cache = net.forward(sample.rgb, sample.sparse_depth);
  const int rows = cache.head.rows, cols = cache.head.cols;

  LossReport report;
  report.valid_pixel_count = sample.ssde.valid_count();
  report.empty_depth_mask = (report.valid_pixel_count == 0);

  Tensor3 dhead(3, rows, cols, 0.0);
  const double norm =
      opt.mode == DepthLossMode::kMean && report.valid_pixel_count > 0
          ? 1.0 / report.valid_pixel_count
          : 1.0;

  double de_sum = 0.0;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (!sample.ssde.is_valid(y, x)) continue;
      const double raw = cache.head.at(0, y, x);
      const double pred = net.depth_from_raw(raw);
      const double var = std::max(sample.ssde.variance.at(y, x), opt.variance_floor);
      const double err = pred - sample.ssde.depth.at(y, x);
      de_sum += err * err / var;
      if (grads)
        dhead.at(0, y, x) =
            opt.w * norm * 2.0 * err / var * net.depth_scale * nn::sigmoid(raw);
    }
  }
  report.l_de = report.valid_pixel_count > 0 ? de_sum * norm : 0.0;

  if (sample.seg) {
    const double pixel_norm = 1.0 / (static_cast<double>(rows) * cols);
    double seg_sum = 0.0;
    for (int y = 0; y < rows; ++y) {
      for (int x = 0; x < cols; ++x) {
        const double s0 = cache.head.at(1, y, x);
        const double s1 = cache.head.at(2, y, x);
        const double m = std::max(s0, s1);
        const double lse = m + std::log(std::exp(s0 - m) + std::exp(s1 - m));
        const bool is_rigid = sample.seg->at(y, x) == SegClass::kRigid;
        seg_sum += lse - (is_rigid ? s0 : s1);
        if (grads) {
          const double p0 = std::exp(s0 - lse);
          const double p1 = std::exp(s1 - lse);
          dhead.at(1, y, x) = (p0 - (is_rigid ? 1.0 : 0.0)) * pixel_norm;
          dhead.at(2, y, x) = (p1 - (is_rigid ? 0.0 : 1.0)) * pixel_norm;
        }
      }
    }
    report.l_seg = seg_sum * pixel_norm;
  }

  report.l_total = total_loss(report.l_seg, report.l_de, opt.w);
  if (grads) net.backward(cache, dhead, *grads);
  return report;
}

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 1e-4;
  uint64_t seed = 0;
  int hidden = 16;
  LossOptions loss;
};

struct TrainResult {
  TinyConvNet net;
  std::vector<LossReport> history;
  bool diverged = false;
};

/// Plain full-batch gradient descent on the total loss. Deterministic under a
/// fixed seed; aborts to the last finite parameters when the loss diverges.
inline TrainResult train_predictor(const std::vector<TrainingSample>& samples,
                                   const TrainConfig& cfg) {
  bool trainable = false;
  for (const TrainingSample& s : samples)
    if (s.ssde.valid_count() > 0 || s.seg) trainable = true;
  if (samples.empty() || !trainable)
    throw std::invalid_argument("train_predictor: need >= 1 sample with labels");

  TrainResult result;
  result.net = TinyConvNet::create(cfg.seed, cfg.hidden);
  TinyConvNet last_good = result.net;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<ConvLayer> grads = result.net.zero_grads();
    LossReport epoch_report;
    for (const TrainingSample& sample : samples) {
      const LossReport r = net_loss(result.net, sample, cfg.loss, &grads);
      epoch_report.l_de += r.l_de;
      epoch_report.l_seg += r.l_seg;
      epoch_report.valid_pixel_count += r.valid_pixel_count;
    }
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    epoch_report.l_de *= inv_n;
    epoch_report.l_seg *= inv_n;
    epoch_report.l_total = total_loss(epoch_report.l_seg, epoch_report.l_de, cfg.loss.w);
    epoch_report.empty_depth_mask = (epoch_report.valid_pixel_count == 0);
    result.history.push_back(epoch_report);

    if (!std::isfinite(epoch_report.l_total)) {
      result.net = last_good;
      result.diverged = true;
      break;
    }
    last_good = result.net;

    if (cfg.learning_rate == 0.0) continue;
    const double step = cfg.learning_rate * inv_n;
    for (size_t li = 0; li < result.net.layers.size(); ++li) {
      ConvLayer& layer = result.net.layers[li];
      const ConvLayer& g = grads[li];
      for (size_t i = 0; i < layer.w.size(); ++i) layer.w[i] -= step * g.w[i];
      for (size_t i = 0; i < layer.b.size(); ++i) layer.b[i] -= step * g.b[i];
    }
  }
  return result;
}

}  // namespace spf
