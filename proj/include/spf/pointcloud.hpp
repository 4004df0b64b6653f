#pragma once

#include <vector>

#include "spf/core.hpp"

namespace spf {

enum class Frame { kSensor, kWorld };

struct PointCloud {
  std::vector<Vec3> points;
  Frame frame = Frame::kSensor;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

}  // namespace spf
