#pragma once

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spf/core.hpp"

namespace spf {

/// Squared-exponential covariance with lengthscale l; unit prior amplitude.
inline double rbf_kernel(const Vec2& xi, const Vec2& xj, double l) {
  if (!(l > 0.0)) throw std::invalid_argument("rbf_kernel: lengthscale must be > 0");
  const double d2 = (xi - xj).squaredNorm();
  return std::exp(-d2 / (2.0 * l * l));
}

struct GpParams {
  double lengthscale = 0.3;  // meters
  double noise = 0.02;       // sigma_n, meters
};

/// One fitted GP over a set of training points. Targets are centered on their
/// mean before the solve so far-field predictions revert to the local mean.
class GpTile {
 public:
  GpTile() = default;

  /// Factorize (K + sigma_n^2 I) with escalating diagonal jitter when the
  /// Cholesky fails (starts at 1e-8, doubles up to 1e-4).
  static GpTile fit(const std::vector<Vec2>& xy, const std::vector<double>& z,
                    const GpParams& params, const std::string& tile_id = {}) {
    if (xy.empty() || xy.size() != z.size())
      throw std::invalid_argument("GpTile::fit: need >= 1 point with matching heights");
    GpTile tile;
    tile.xy_ = xy;
    tile.params_ = params;
    const Eigen::Index n = static_cast<Eigen::Index>(xy.size());

    Eigen::VectorXd zv(n);
    for (Eigen::Index i = 0; i < n; ++i) zv[i] = z[i];
    tile.z_mean_ = zv.mean();
    const Eigen::VectorXd centered = zv.array() - tile.z_mean_;

    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, i) = 1.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double v = rbf_kernel(xy[i], xy[j], params.lengthscale);
        k(i, j) = v;
        k(j, i) = v;
      }
    }
    const double noise_var = params.noise * params.noise;

    double jitter = 0.0;
    double next_jitter = 1e-8;
    while (true) {
      Eigen::MatrixXd gram = k;
      gram.diagonal().array() += noise_var + jitter;
      tile.llt_.compute(gram);
      if (tile.llt_.info() == Eigen::Success && factor_usable(tile.llt_)) break;
      if (next_jitter > 1e-4)
        throw NumericalError("GpTile::fit: factorization failed even with max jitter" +
                             (tile_id.empty() ? std::string() : " (tile " + tile_id + ")"));
      jitter = next_jitter;
      next_jitter *= 2.0;
    }
    tile.jitter_ = jitter;
    tile.alpha_ = tile.llt_.solve(centered);
    return tile;
  }

  /// Predictive mean and variance at one query point (unit prior amplitude,
  /// k* = 1).
  void predict(const Vec2& query, double& mean, double& variance) const {
    const Eigen::Index n = static_cast<Eigen::Index>(xy_.size());
    Eigen::VectorXd kvec(n);
    for (Eigen::Index i = 0; i < n; ++i) kvec[i] = rbf_kernel(query, xy_[i], params_.lengthscale);
    mean = z_mean_ + kvec.dot(alpha_);
    const Eigen::VectorXd v = llt_.solve(kvec);
    variance = std::max(0.0, 1.0 + params_.noise * params_.noise - kvec.dot(v));
  }

  /// Batch prediction; one column of kernels per query.
  void predict_batch(const std::vector<Vec2>& queries, std::vector<double>& means,
                     std::vector<double>& variances) const {
    const Eigen::Index n = static_cast<Eigen::Index>(xy_.size());
    const Eigen::Index m = static_cast<Eigen::Index>(queries.size());
    means.resize(queries.size());
    variances.resize(queries.size());
    if (m == 0) return;
    Eigen::MatrixXd ks(n, m);
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        ks(i, j) = rbf_kernel(queries[j], xy_[i], params_.lengthscale);
    const Eigen::MatrixXd sol = llt_.solve(ks);
    const double prior = 1.0 + params_.noise * params_.noise;
    for (Eigen::Index j = 0; j < m; ++j) {
      means[j] = z_mean_ + ks.col(j).dot(alpha_);
      variances[j] = std::max(0.0, prior - ks.col(j).dot(sol.col(j)));
    }
  }

  size_t train_count() const { return xy_.size(); }
  double z_mean() const { return z_mean_; }
  double jitter() const { return jitter_; }
  const GpParams& params() const { return params_; }
  const std::vector<Vec2>& train_xy() const { return xy_; }

  /// Max-norm residual of the stored factorization against the Gram matrix it
  /// claims to factor; test hook.
  double factorization_residual() const {
    const Eigen::Index n = static_cast<Eigen::Index>(xy_.size());
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        gram(i, j) = rbf_kernel(xy_[i], xy_[j], params_.lengthscale);
    gram.diagonal().array() += params_.noise * params_.noise + jitter_;
    const Eigen::MatrixXd l = llt_.matrixL();
    return (gram - l * l.transpose()).cwiseAbs().maxCoeff();
  }

 private:
  static bool factor_usable(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    const auto l = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < l.size(); ++i)
      if (!std::isfinite(l[i]) || l[i] <= 1e-12) return false;
    return true;
  }

  std::vector<Vec2> xy_;
  GpParams params_;
  double z_mean_ = 0.0;
  double jitter_ = 0.0;
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Convenience wrappers mirroring the tile API as free functions.
inline GpTile gp_fit(const std::vector<Vec2>& xy, const std::vector<double>& z,
                     const GpParams& params) {
  return GpTile::fit(xy, z, params);
}

inline void gp_predict(const GpTile& tile, const Vec2& query, double& mean, double& variance) {
  tile.predict(query, mean, variance);
}

}  // namespace spf
