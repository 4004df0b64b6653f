#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spf/core.hpp"
#include "spf/grid.hpp"

namespace spf {

struct FootSample {
  double t = 0.0;  // seconds
  Vec3 position = Vec3::Zero();
};

/// Time-ordered foot positions for one foot, world frame.
struct FootTrajectory {
  std::string foot_id;
  std::vector<FootSample> samples;

  void validate() const {
    for (size_t i = 1; i < samples.size(); ++i)
      if (!(samples[i].t > samples[i - 1].t))
        throw std::invalid_argument("FootTrajectory: timestamps must strictly increase");
  }

  double span() const {
    return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
  }
};

struct FootholdSet {
  std::vector<Vec3> footholds;

  size_t size() const { return footholds.size(); }
  bool empty() const { return footholds.empty(); }

  void append(const FootholdSet& other) {
    footholds.insert(footholds.end(), other.footholds.begin(), other.footholds.end());
  }
};

/// Dual-window test parameters. The big window of length t_b slides over the
/// trajectory; a small window of length t_s is centered on each candidate.
/// advance = 0 means the big window advances by its full length.
struct WindowParams {
  double t_b = 1.5;
  double t_s = 0.07;
  double r_t = 0.015;
  double advance = 0.0;

  void validate() const {
    if (!(t_s < t_b)) throw std::invalid_argument("WindowParams: t_s must be < t_b");
    if (!(r_t > 0.0)) throw std::invalid_argument("WindowParams: r_t must be > 0");
    if (advance < 0.0) throw std::invalid_argument("WindowParams: advance must be >= 0");
  }
};

struct FootholdExtraction {
  FootholdSet set;
  bool trajectory_too_short = false;
};

/// Tolerance absorbing accumulation rounding in the mean comparison, so an
/// exactly flat trajectory satisfies mean_s <= mean_b as the non-strict
/// inequality intends.
inline constexpr double kMeanTieTolerance = 1e-12;

/// Emit a sample as a foothold when, inside the current big window, the small
/// window centered on it has mean height <= the big window's mean height and
/// height range <= r_t. Windows are half-open in time; candidates whose small
/// window sticks out of the recorded span are skipped.
inline FootholdExtraction extract_footholds(const FootTrajectory& traj,
                                            const WindowParams& params) {
  params.validate();
  traj.validate();
  FootholdExtraction out;
  if (traj.samples.empty() || traj.span() < params.t_b) {
    out.trajectory_too_short = true;
    return out;
  }

  const auto& s = traj.samples;
  const size_t n = s.size();
  const double t0 = s.front().t;
  const double t_end = s.back().t;
  const double advance = params.advance > 0.0 ? params.advance : params.t_b;
  const double half_s = params.t_s / 2.0;

  // Index of first sample with t >= query.
  auto lower = [&](double t_query) {
    return static_cast<size_t>(std::lower_bound(s.begin(), s.end(), t_query,
                                                [](const FootSample& a, double t) {
                                                  return a.t < t;
                                                }) -
                               s.begin());
  };

  for (double wb_start = t0; wb_start < t_end; wb_start += advance) {
    const double wb_end = wb_start + params.t_b;
    const size_t i_begin = lower(wb_start);
    const size_t i_end = lower(wb_end);
    if (i_begin >= i_end) continue;

    double mean_b = 0.0;
    for (size_t i = i_begin; i < i_end; ++i) mean_b += s[i].position.z();
    mean_b /= static_cast<double>(i_end - i_begin);

    for (size_t i = i_begin; i < i_end && i < n; ++i) {
      const double tc = s[i].t;
      if (tc - half_s < t0 || tc + half_s > t_end) continue;
      const size_t j_begin = lower(tc - half_s);
      const size_t j_end = lower(tc + half_s);
      if (j_begin >= j_end) continue;
      double mean_s = 0.0;
      double z_min = s[j_begin].position.z();
      double z_max = z_min;
      for (size_t j = j_begin; j < j_end; ++j) {
        const double z = s[j].position.z();
        mean_s += z;
        z_min = std::min(z_min, z);
        z_max = std::max(z_max, z);
      }
      mean_s /= static_cast<double>(j_end - j_begin);
      const double tie = kMeanTieTolerance * std::max(1.0, std::abs(mean_b));
      if (mean_s <= mean_b + tie && (z_max - z_min) <= params.r_t)
        out.set.footholds.push_back(s[i].position);
    }
  }
  return out;
}

struct FootholdCell {
  double height = 0.0;
  int count = 0;
};

struct FootholdGrid {
  GridGeometry geom;
  std::map<std::pair<int, int>, FootholdCell> cells;  // (row, col) -> mean height
  int dropped = 0;                                    // footholds outside bounds
};

/// Average foothold heights into grid cells; footholds outside the bounds are
/// counted and dropped.
inline FootholdGrid rasterize_footholds(const FootholdSet& fh, const GridGeometry& geom) {
  geom.validate();
  FootholdGrid grid;
  grid.geom = geom;
  for (const Vec3& p : fh.footholds) {
    int r, c;
    geom.cell_of(Vec2(p.x(), p.y()), r, c);
    if (!geom.inside(r, c)) {
      ++grid.dropped;
      continue;
    }
    auto& cell = grid.cells[{r, c}];
    cell.height = (cell.height * cell.count + p.z()) / (cell.count + 1);
    ++cell.count;
  }
  return grid;
}

}  // namespace spf
