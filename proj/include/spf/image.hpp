#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace spf {

/// Dense row-major 2D raster of doubles.
struct Raster {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Raster() = default;
  Raster(int rows_, int cols_, double fill = 0.0)
      : rows(rows_), cols(cols_), data(static_cast<size_t>(rows_) * cols_, fill) {}

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  bool inside(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }
  size_t size() const { return data.size(); }
  bool same_shape(const Raster& o) const { return rows == o.rows && cols == o.cols; }
};

/// Per-pixel depth (Euclidean distance along the pixel ray, meters) with an
/// explicit validity mask. Invalid pixels hold 0 but the mask is authoritative;
/// no consumer reads depth where valid is false.
struct SparseDepthImage {
  Raster depth;
  Raster valid;  // 1.0 / 0.0

  SparseDepthImage() = default;
  SparseDepthImage(int rows, int cols) : depth(rows, cols, 0.0), valid(rows, cols, 0.0) {}

  int rows() const { return depth.rows; }
  int cols() const { return depth.cols; }

  bool is_valid(int r, int c) const { return valid.at(r, c) != 0.0; }

  void set(int r, int c, double d) {
    depth.at(r, c) = d;
    valid.at(r, c) = 1.0;
  }

  void clear(int r, int c) {
    depth.at(r, c) = 0.0;
    valid.at(r, c) = 0.0;
  }

  int valid_count() const {
    int n = 0;
    for (double v : valid.data) n += (v != 0.0);
    return n;
  }
};

enum class SegClass : uint8_t { kRigid = 0, kSupport = 1 };

/// Binary rigid/support mask; every pixel carries exactly one class.
struct SegMask {
  int rows = 0;
  int cols = 0;
  std::vector<SegClass> classes;

  SegMask() = default;
  SegMask(int rows_, int cols_, SegClass fill = SegClass::kRigid)
      : rows(rows_), cols(cols_), classes(static_cast<size_t>(rows_) * cols_, fill) {}

  SegClass& at(int r, int c) { return classes[static_cast<size_t>(r) * cols + c]; }
  SegClass at(int r, int c) const { return classes[static_cast<size_t>(r) * cols + c]; }
};

/// 3-channel unit-range image, channel-major (r plane, g plane, b plane).
struct RgbImage {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // 3 * rows * cols

  RgbImage() = default;
  RgbImage(int rows_, int cols_, double fill = 0.0)
      : rows(rows_), cols(cols_), data(3u * rows_ * cols_, fill) {}

  double& at(int ch, int r, int c) {
    return data[(static_cast<size_t>(ch) * rows + r) * cols + c];
  }
  double at(int ch, int r, int c) const {
    return data[(static_cast<size_t>(ch) * rows + r) * cols + c];
  }
};

}  // namespace spf
