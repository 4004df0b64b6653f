#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "spf/filter.hpp"
#include "spf/image.hpp"

namespace spf {

/// Channel-major dense tensor (C, H, W) of doubles.
struct Tensor3 {
  int channels = 0;
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int c, int h, int w, double fill = 0.0)
      : channels(c), rows(h), cols(w), data(static_cast<size_t>(c) * h * w, fill) {}

  double& at(int c, int y, int x) {
    return data[(static_cast<size_t>(c) * rows + y) * cols + x];
  }
  double at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * rows + y) * cols + x];
  }
};

/// 3x3 stride-1 zero-padded convolution parameters.
struct ConvLayer {
  int in_c = 0;
  int out_c = 0;
  int k = 3;
  std::vector<double> w;  // [out_c][in_c][k][k]
  std::vector<double> b;  // [out_c]

  double& weight(int oc, int ic, int dy, int dx) {
    return w[((static_cast<size_t>(oc) * in_c + ic) * k + dy) * k + dx];
  }
  double weight(int oc, int ic, int dy, int dx) const {
    return w[((static_cast<size_t>(oc) * in_c + ic) * k + dy) * k + dx];
  }
  size_t param_count() const { return w.size() + b.size(); }
};

namespace nn {

inline Tensor3 conv_forward(const Tensor3& in, const ConvLayer& layer) {
  const int pad = layer.k / 2;
  Tensor3 out(layer.out_c, in.rows, in.cols, 0.0);
  for (int oc = 0; oc < layer.out_c; ++oc) {
    for (int y = 0; y < in.rows; ++y) {
      for (int x = 0; x < in.cols; ++x) {
        double acc = layer.b[oc];
        for (int ic = 0; ic < layer.in_c; ++ic) {
          for (int dy = 0; dy < layer.k; ++dy) {
            const int yy = y + dy - pad;
            if (yy < 0 || yy >= in.rows) continue;
            for (int dx = 0; dx < layer.k; ++dx) {
              const int xx = x + dx - pad;
              if (xx < 0 || xx >= in.cols) continue;
              acc += layer.weight(oc, ic, dy, dx) * in.at(ic, yy, xx);
            }
          }
        }
        out.at(oc, y, x) = acc;
      }
    }
  }
  return out;
}

inline void conv_backward(const Tensor3& in, const ConvLayer& layer, const Tensor3& dout,
                          Tensor3& din, ConvLayer& dlayer) {
  const int pad = layer.k / 2;
  din = Tensor3(layer.in_c, in.rows, in.cols, 0.0);
  for (int oc = 0; oc < layer.out_c; ++oc) {
    for (int y = 0; y < in.rows; ++y) {
      for (int x = 0; x < in.cols; ++x) {
        const double g = dout.at(oc, y, x);
        if (g == 0.0) continue;
        dlayer.b[oc] += g;
        for (int ic = 0; ic < layer.in_c; ++ic) {
          for (int dy = 0; dy < layer.k; ++dy) {
            const int yy = y + dy - pad;
            if (yy < 0 || yy >= in.rows) continue;
            for (int dx = 0; dx < layer.k; ++dx) {
              const int xx = x + dx - pad;
              if (xx < 0 || xx >= in.cols) continue;
              dlayer.weight(oc, ic, dy, dx) += g * in.at(ic, yy, xx);
              din.at(ic, yy, xx) += g * layer.weight(oc, ic, dy, dx);
            }
          }
        }
      }
    }
  }
}

inline void relu_inplace(Tensor3& t) {
  for (double& v : t.data) v = v > 0.0 ? v : 0.0;
}

/// dL/dpre from dL/dpost given the pre-activation values.
inline void relu_backward(const Tensor3& pre, Tensor3& grad) {
  for (size_t i = 0; i < grad.data.size(); ++i)
    if (pre.data[i] <= 0.0) grad.data[i] = 0.0;
}

inline double softplus(double x) {
  return x > 30.0 ? x : std::log1p(std::exp(x));
}
inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace nn

/// Small fully-convolutional predictor: two hidden 3x3 conv layers and a
/// 3-channel head (depth + two class scores). Depth output is
/// depth_scale * softplus(raw) so emitted depths stay positive.
class TinyConvNet {
 public:
  static constexpr int kInputChannels = 4;  // r, g, b, scaled sparse depth
  static constexpr int kVersion = 1;

  std::vector<ConvLayer> layers;
  double depth_scale = 5.0;
  double input_depth_scale = 0.1;

  static TinyConvNet create(uint64_t seed, int hidden = 16) {
    TinyConvNet net;
    net.layers.push_back(make_layer(kInputChannels, hidden));
    net.layers.push_back(make_layer(hidden, hidden));
    net.layers.push_back(make_layer(hidden, 3));
    std::mt19937_64 rng(seed);
    for (ConvLayer& layer : net.layers) {
      const double a = 1.0 / std::sqrt(static_cast<double>(layer.in_c) * layer.k * layer.k);
      std::uniform_real_distribution<double> dist(-a, a);
      for (double& v : layer.w) v = dist(rng);
      for (double& v : layer.b) v = dist(rng);
    }
    return net;
  }

  size_t param_count() const {
    size_t n = 0;
    for (const ConvLayer& layer : layers) n += layer.param_count();
    return n;
  }

  Tensor3 make_input(const RgbImage& rgb, const SparseDepthImage& xd) const {
    Tensor3 in(kInputChannels, rgb.rows, rgb.cols, 0.0);
    for (int ch = 0; ch < 3; ++ch)
      for (int y = 0; y < rgb.rows; ++y)
        for (int x = 0; x < rgb.cols; ++x) in.at(ch, y, x) = rgb.at(ch, y, x);
    for (int y = 0; y < rgb.rows; ++y)
      for (int x = 0; x < rgb.cols; ++x)
        if (xd.is_valid(y, x)) in.at(3, y, x) = xd.depth.at(y, x) * input_depth_scale;
    return in;
  }

  /// Activations kept for the backward pass.
  struct Cache {
    Tensor3 input;
    Tensor3 pre1, pre2;    // pre-activation hidden layers
    Tensor3 act1, act2;    // post-ReLU
    Tensor3 head;          // raw 3-channel output
  };

  Cache forward(const RgbImage& rgb, const SparseDepthImage& xd) const {
    Cache cache;
    cache.input = make_input(rgb, xd);
    cache.pre1 = nn::conv_forward(cache.input, layers[0]);
    cache.act1 = cache.pre1;
    nn::relu_inplace(cache.act1);
    cache.pre2 = nn::conv_forward(cache.act1, layers[1]);
    cache.act2 = cache.pre2;
    nn::relu_inplace(cache.act2);
    cache.head = nn::conv_forward(cache.act2, layers[2]);
    return cache;
  }

  double depth_from_raw(double raw) const { return depth_scale * nn::softplus(raw); }

  PredictorOutput output_from_head(const Tensor3& head) const {
    PredictorOutput out;
    out.depth = Raster(head.rows, head.cols, 0.0);
    out.score_rigid = Raster(head.rows, head.cols, 0.0);
    out.score_support = Raster(head.rows, head.cols, 0.0);
    for (int y = 0; y < head.rows; ++y) {
      for (int x = 0; x < head.cols; ++x) {
        out.depth.at(y, x) = depth_from_raw(head.at(0, y, x));
        out.score_rigid.at(y, x) = head.at(1, y, x);
        out.score_support.at(y, x) = head.at(2, y, x);
      }
    }
    return out;
  }

  /// Backpropagate dL/dhead into parameter gradients (accumulated).
  void backward(const Cache& cache, const Tensor3& dhead, std::vector<ConvLayer>& grads) const {
    Tensor3 d_act2;
    nn::conv_backward(cache.act2, layers[2], dhead, d_act2, grads[2]);
    nn::relu_backward(cache.pre2, d_act2);
    Tensor3 d_act1;
    nn::conv_backward(cache.act1, layers[1], d_act2, d_act1, grads[1]);
    nn::relu_backward(cache.pre1, d_act1);
    Tensor3 d_input;
    nn::conv_backward(cache.input, layers[0], d_act1, d_input, grads[0]);
  }

  std::vector<ConvLayer> zero_grads() const {
    std::vector<ConvLayer> grads;
    for (const ConvLayer& layer : layers) {
      ConvLayer g = layer;
      std::fill(g.w.begin(), g.w.end(), 0.0);
      std::fill(g.b.begin(), g.b.end(), 0.0);
      grads.push_back(std::move(g));
    }
    return grads;
  }

 private:
  static ConvLayer make_layer(int in_c, int out_c) {
    ConvLayer layer;
    layer.in_c = in_c;
    layer.out_c = out_c;
    layer.k = 3;
    layer.w.assign(static_cast<size_t>(out_c) * in_c * layer.k * layer.k, 0.0);
    layer.b.assign(out_c, 0.0);
    return layer;
  }
};

/// Predictor adapter over a trained TinyConvNet.
class NetPredictor : public Predictor {
 public:
  explicit NetPredictor(TinyConvNet net) : net_(std::move(net)) {}

  std::string name() const override { return "tiny-conv"; }
  int version() const override { return TinyConvNet::kVersion; }

  PredictorOutput predict(const RgbImage& rgb, const SparseDepthImage& xd) const override {
    const TinyConvNet::Cache cache = net_.forward(rgb, xd);
    return net_.output_from_head(cache.head);
  }

  const TinyConvNet& net() const { return net_; }

 private:
  TinyConvNet net_;
};

}  // namespace spf
