#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spf/core.hpp"
#include "spf/grid.hpp"
#include "spf/image.hpp"
#include "spf/labels.hpp"
#include "spf/net.hpp"
#include "spf/pointcloud.hpp"
#include "spf/synth.hpp"

namespace spf::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// PLY pointclouds (x, y, z float32; ascii or binary_little_endian)

enum class PlyFormat { kAscii, kBinaryLE };

inline void write_ply(const fs::path& path, const PointCloud& cloud,
                      PlyFormat format = PlyFormat::kBinaryLE) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ply: cannot open " + path.string());
  out << "ply\n"
      << (format == PlyFormat::kAscii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "element vertex " << cloud.points.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "end_header\n";
  if (format == PlyFormat::kAscii) {
    for (const Vec3& p : cloud.points) {
      out << static_cast<float>(p.x()) << " " << static_cast<float>(p.y()) << " "
          << static_cast<float>(p.z()) << "\n";
    }
  } else {
    for (const Vec3& p : cloud.points) {
      const float xyz[3] = {static_cast<float>(p.x()), static_cast<float>(p.y()),
                            static_cast<float>(p.z())};
      out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    }
  }
}

inline PointCloud read_ply(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_ply: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
    throw std::runtime_error("read_ply: missing ply magic in " + path.string());

  bool binary = false;
  size_t n_vertices = 0;
  std::vector<std::string> vertex_props;
  std::string element;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "binary_little_endian")
        binary = true;
      else if (fmt != "ascii")
        throw std::runtime_error("read_ply: unsupported format " + fmt);
    } else if (tok == "element") {
      size_t count = 0;
      ss >> element >> count;
      if (element == "vertex") n_vertices = count;
    } else if (tok == "property" && element == "vertex") {
      std::string type, name;
      ss >> type >> name;
      if (type != "float")
        throw std::runtime_error("read_ply: only float32 properties supported");
      vertex_props.push_back(name);
    } else if (tok == "end_header") {
      break;
    }
  }
  int ix = -1, iy = -1, iz = -1;
  for (size_t i = 0; i < vertex_props.size(); ++i) {
    if (vertex_props[i] == "x") ix = static_cast<int>(i);
    if (vertex_props[i] == "y") iy = static_cast<int>(i);
    if (vertex_props[i] == "z") iz = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0) throw std::runtime_error("read_ply: missing x/y/z properties");

  PointCloud cloud;
  cloud.frame = Frame::kWorld;
  cloud.points.reserve(n_vertices);
  std::vector<float> row(vertex_props.size());
  for (size_t v = 0; v < n_vertices; ++v) {
    if (binary) {
      in.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
      if (!in) throw std::runtime_error("read_ply: truncated binary data");
    } else {
      for (float& f : row)
        if (!(in >> f)) throw std::runtime_error("read_ply: truncated ascii data");
    }
    cloud.points.emplace_back(row[ix], row[iy], row[iz]);
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// SPFR rasters: magic "SPFR", u32 width, u32 height, u32 channel count,
// float32 little-endian row-major planes.

inline void write_spfr(const fs::path& path, const std::vector<const Raster*>& planes) {
  if (planes.empty()) throw std::invalid_argument("write_spfr: no planes");
  const int rows = planes[0]->rows, cols = planes[0]->cols;
  for (const Raster* p : planes)
    if (p->rows != rows || p->cols != cols)
      throw std::invalid_argument("write_spfr: plane shapes differ");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_spfr: cannot open " + path.string());
  const char magic[4] = {'S', 'P', 'F', 'R'};
  out.write(magic, 4);
  const uint32_t header[3] = {static_cast<uint32_t>(cols), static_cast<uint32_t>(rows),
                              static_cast<uint32_t>(planes.size())};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::vector<float> buf(static_cast<size_t>(rows) * cols);
  for (const Raster* p : planes) {
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(p->data[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
}

inline std::vector<Raster> read_spfr(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_spfr: cannot open " + path.string());
  char magic[4];
  uint32_t header[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(magic, "SPFR", 4) != 0)
    throw std::runtime_error("read_spfr: bad magic in " + path.string());
  const int cols = static_cast<int>(header[0]);
  const int rows = static_cast<int>(header[1]);
  const int channels = static_cast<int>(header[2]);
  std::vector<Raster> planes;
  std::vector<float> buf(static_cast<size_t>(rows) * cols);
  for (int ch = 0; ch < channels; ++ch) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw std::runtime_error("read_spfr: truncated data in " + path.string());
    Raster r(rows, cols);
    for (size_t i = 0; i < buf.size(); ++i) r.data[i] = buf[i];
    planes.push_back(std::move(r));
  }
  return planes;
}

inline void write_rgb(const fs::path& path, const RgbImage& rgb) {
  Raster r(rgb.rows, rgb.cols), g(rgb.rows, rgb.cols), b(rgb.rows, rgb.cols);
  for (int y = 0; y < rgb.rows; ++y)
    for (int x = 0; x < rgb.cols; ++x) {
      r.at(y, x) = rgb.at(0, y, x);
      g.at(y, x) = rgb.at(1, y, x);
      b.at(y, x) = rgb.at(2, y, x);
    }
  write_spfr(path, {&r, &g, &b});
}

inline RgbImage read_rgb(const fs::path& path) {
  const auto planes = read_spfr(path);
  if (planes.size() != 3) throw std::runtime_error("read_rgb: expected 3 channels");
  RgbImage rgb(planes[0].rows, planes[0].cols);
  for (int y = 0; y < rgb.rows; ++y)
    for (int x = 0; x < rgb.cols; ++x) {
      rgb.at(0, y, x) = planes[0].at(y, x);
      rgb.at(1, y, x) = planes[1].at(y, x);
      rgb.at(2, y, x) = planes[2].at(y, x);
    }
  return rgb;
}

inline void write_depth(const fs::path& path, const SparseDepthImage& img) {
  write_spfr(path, {&img.depth, &img.valid});
}

inline SparseDepthImage read_depth(const fs::path& path) {
  const auto planes = read_spfr(path);
  if (planes.size() != 2) throw std::runtime_error("read_depth: expected 2 channels");
  SparseDepthImage img;
  img.depth = planes[0];
  img.valid = planes[1];
  return img;
}

inline void write_ssde(const fs::path& path, const SsdeLabel& label) {
  write_spfr(path, {&label.depth, &label.variance, &label.valid});
}

inline SsdeLabel read_ssde(const fs::path& path) {
  const auto planes = read_spfr(path);
  if (planes.size() != 3) throw std::runtime_error("read_ssde: expected 3 channels");
  SsdeLabel label;
  label.depth = planes[0];
  label.variance = planes[1];
  label.valid = planes[2];
  return label;
}

inline void write_seg(const fs::path& path, const SegMask& seg) {
  Raster plane(seg.rows, seg.cols);
  for (int y = 0; y < seg.rows; ++y)
    for (int x = 0; x < seg.cols; ++x)
      plane.at(y, x) = seg.at(y, x) == SegClass::kSupport ? 1.0 : 0.0;
  write_spfr(path, {&plane});
}

inline SegMask read_seg(const fs::path& path) {
  const auto planes = read_spfr(path);
  if (planes.size() != 1) throw std::runtime_error("read_seg: expected 1 channel");
  SegMask seg(planes[0].rows, planes[0].cols);
  for (int y = 0; y < seg.rows; ++y)
    for (int x = 0; x < seg.cols; ++x)
      seg.at(y, x) = planes[0].at(y, x) != 0.0 ? SegClass::kSupport : SegClass::kRigid;
  return seg;
}

/// SurfaceMap = SPFR (height, variance, valid) + text sidecar with the grid
/// placement.
inline void write_surface(const fs::path& path, const SurfaceMap& map) {
  write_spfr(path, {&map.height, &map.variance, &map.valid});
  std::ofstream side(path.string() + ".txt");
  side.precision(17);
  side << "origin_x = " << map.geom.origin.x() << "\n"
       << "origin_y = " << map.geom.origin.y() << "\n"
       << "resolution = " << map.geom.resolution << "\n";
}

inline SurfaceMap read_surface(const fs::path& path) {
  const auto planes = read_spfr(path);
  if (planes.size() != 3) throw std::runtime_error("read_surface: expected 3 channels");
  SurfaceMap map;
  map.height = planes[0];
  map.variance = planes[1];
  map.valid = planes[2];
  map.geom.rows = planes[0].rows;
  map.geom.cols = planes[0].cols;
  std::ifstream side(path.string() + ".txt");
  if (!side) throw std::runtime_error("read_surface: missing sidecar for " + path.string());
  std::string key, eq;
  double value;
  while (side >> key >> eq >> value) {
    if (key == "origin_x") map.geom.origin.x() = value;
    else if (key == "origin_y") map.geom.origin.y() = value;
    else if (key == "resolution") map.geom.resolution = value;
  }
  map.geom.validate();
  return map;
}

// ---------------------------------------------------------------------------
// Foot trajectories: CSV `t,foot_id,x,y,z` with a header row.

inline void write_trajectories(const fs::path& path, const std::vector<FootTrajectory>& feet) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trajectories: cannot open " + path.string());
  out.precision(17);
  out << "t,foot_id,x,y,z\n";
  for (const FootTrajectory& foot : feet)
    for (const FootSample& s : foot.samples)
      out << s.t << "," << foot.foot_id << "," << s.position.x() << "," << s.position.y() << ","
          << s.position.z() << "\n";
}

inline std::vector<FootTrajectory> read_trajectories(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trajectories: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_trajectories: empty file");
  std::map<std::string, FootTrajectory> by_id;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string t_str, id, x_str, y_str, z_str;
    if (!std::getline(ss, t_str, ',') || !std::getline(ss, id, ',') ||
        !std::getline(ss, x_str, ',') || !std::getline(ss, y_str, ',') ||
        !std::getline(ss, z_str))
      throw std::runtime_error("read_trajectories: malformed row: " + line);
    if (by_id.find(id) == by_id.end()) {
      by_id[id].foot_id = id;
      order.push_back(id);
    }
    by_id[id].samples.push_back(
        {std::stod(t_str), Vec3(std::stod(x_str), std::stod(y_str), std::stod(z_str))});
  }
  std::vector<FootTrajectory> feet;
  for (const std::string& id : order) {
    auto& foot = by_id[id];
    std::sort(foot.samples.begin(), foot.samples.end(),
              [](const FootSample& a, const FootSample& b) { return a.t < b.t; });
    feet.push_back(std::move(foot));
  }
  return feet;
}

// ---------------------------------------------------------------------------
// Frame metadata: key = value text with intrinsics and poses.

struct FrameMeta {
  double t = 0.0;
  CameraIntrinsics intrinsics;
  Pose camera;
  Pose lidar;
  Pose robot;
};

inline void write_pose_line(std::ostream& out, const std::string& key, const Pose& pose) {
  out << key << " = " << pose.translation.x() << " " << pose.translation.y() << " "
      << pose.translation.z() << " " << pose.rotation.w() << " " << pose.rotation.x() << " "
      << pose.rotation.y() << " " << pose.rotation.z() << "\n";
}

inline void write_meta(const fs::path& path, const FrameMeta& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_meta: cannot open " + path.string());
  out.precision(17);
  out << "t = " << meta.t << "\n";
  out << "fx = " << meta.intrinsics.fx << "\nfy = " << meta.intrinsics.fy << "\n"
      << "cx = " << meta.intrinsics.cx << "\ncy = " << meta.intrinsics.cy << "\n"
      << "width = " << meta.intrinsics.width << "\nheight = " << meta.intrinsics.height << "\n";
  write_pose_line(out, "camera_pose", meta.camera);
  write_pose_line(out, "lidar_pose", meta.lidar);
  write_pose_line(out, "robot_pose", meta.robot);
}

inline FrameMeta read_meta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_meta: cannot open " + path.string());
  FrameMeta meta;
  std::string line;
  auto parse_pose = [](std::istringstream& ss) {
    Pose p;
    double w, x, y, z;
    ss >> p.translation.x() >> p.translation.y() >> p.translation.z() >> w >> x >> y >> z;
    p.rotation = Quat(w, x, y, z).normalized();
    return p;
  };
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key, eq;
    if (!(ss >> key >> eq) || eq != "=") continue;
    if (key == "t") ss >> meta.t;
    else if (key == "fx") ss >> meta.intrinsics.fx;
    else if (key == "fy") ss >> meta.intrinsics.fy;
    else if (key == "cx") ss >> meta.intrinsics.cx;
    else if (key == "cy") ss >> meta.intrinsics.cy;
    else if (key == "width") ss >> meta.intrinsics.width;
    else if (key == "height") ss >> meta.intrinsics.height;
    else if (key == "camera_pose") meta.camera = parse_pose(ss);
    else if (key == "lidar_pose") meta.lidar = parse_pose(ss);
    else if (key == "robot_pose") meta.robot = parse_pose(ss);
  }
  return meta;
}

// ---------------------------------------------------------------------------
// Dataset manifest: frame directories in trajectory order, relative paths.

inline void write_manifest(const fs::path& path, const std::vector<std::string>& frame_dirs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path.string());
  for (const std::string& dir : frame_dirs) out << dir << "\n";
}

inline std::vector<fs::path> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_manifest: cannot open " + path.string());
  std::vector<fs::path> dirs;
  std::string line;
  const fs::path base = path.parent_path();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    dirs.push_back(base / line);
  }
  return dirs;
}

// ---------------------------------------------------------------------------
// Model checkpoints: magic "SPFM", version, scales, layer table, float32
// parameters.

inline void save_checkpoint(const fs::path& path, const TinyConvNet& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
  const char magic[4] = {'S', 'P', 'F', 'M'};
  out.write(magic, 4);
  const uint32_t version = TinyConvNet::kVersion;
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&net.depth_scale), 8);
  out.write(reinterpret_cast<const char*>(&net.input_depth_scale), 8);
  const uint32_t n_layers = static_cast<uint32_t>(net.layers.size());
  out.write(reinterpret_cast<const char*>(&n_layers), 4);
  for (const ConvLayer& layer : net.layers) {
    const uint32_t dims[3] = {static_cast<uint32_t>(layer.in_c),
                              static_cast<uint32_t>(layer.out_c), static_cast<uint32_t>(layer.k)};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    std::vector<float> buf(layer.w.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(layer.w[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    buf.resize(layer.b.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(layer.b[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
}

inline TinyConvNet load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
  char magic[4];
  uint32_t version = 0, n_layers = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  TinyConvNet net;
  in.read(reinterpret_cast<char*>(&net.depth_scale), 8);
  in.read(reinterpret_cast<char*>(&net.input_depth_scale), 8);
  in.read(reinterpret_cast<char*>(&n_layers), 4);
  if (!in || std::memcmp(magic, "SPFM", 4) != 0)
    throw std::runtime_error("load_checkpoint: bad magic in " + path.string());
  if (version != TinyConvNet::kVersion)
    throw std::runtime_error("load_checkpoint: unsupported version");
  net.layers.clear();
  for (uint32_t li = 0; li < n_layers; ++li) {
    uint32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    ConvLayer layer;
    layer.in_c = static_cast<int>(dims[0]);
    layer.out_c = static_cast<int>(dims[1]);
    layer.k = static_cast<int>(dims[2]);
    layer.w.resize(static_cast<size_t>(layer.out_c) * layer.in_c * layer.k * layer.k);
    layer.b.resize(layer.out_c);
    std::vector<float> buf(layer.w.size());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    for (size_t i = 0; i < buf.size(); ++i) layer.w[i] = buf[i];
    buf.resize(layer.b.size());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    for (size_t i = 0; i < buf.size(); ++i) layer.b[i] = buf[i];
    if (!in) throw std::runtime_error("load_checkpoint: truncated file");
    net.layers.push_back(std::move(layer));
  }
  return net;
}

// ---------------------------------------------------------------------------
// Scene spec config: sectioned key = value text.

inline std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream ss(s);
  double v;
  while (ss >> v) out.push_back(v);
  return out;
}

inline SceneSpec read_scene_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_scene_spec: cannot open " + path.string());
  SceneSpec spec;
  spec.ground.clear();
  spec.waypoints.clear();
  std::string section, line;
  std::vector<double> amp, freq, dir, phase;
  while (std::getline(in, line)) {
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    if (line[0] == '[') {
      section = line.substr(1, line.find(']') - 1);
      if (section == "box") spec.obstacles.emplace_back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    const auto vfirst = value.find_first_not_of(" \t");
    value = vfirst == std::string::npos ? "" : value.substr(vfirst);

    auto num = [&value] { return std::stod(value); };
    if (section == "scene") {
      if (key == "seed") spec.seed = static_cast<uint64_t>(std::stoull(value));
      else if (key == "extent_min") {
        const auto v = parse_number_list(value);
        spec.extent_min = Vec2(v.at(0), v.at(1));
      } else if (key == "extent_max") {
        const auto v = parse_number_list(value);
        spec.extent_max = Vec2(v.at(0), v.at(1));
      } else if (key == "grid_resolution") spec.grid_resolution = num();
      else if (key == "body_height") spec.body_height = num();
      else if (key == "frame_interval") spec.frame_interval_s = num();
    } else if (section == "ground") {
      if (key == "amplitudes") amp = parse_number_list(value);
      else if (key == "frequencies") freq = parse_number_list(value);
      else if (key == "directions") dir = parse_number_list(value);
      else if (key == "phases") phase = parse_number_list(value);
    } else if (section == "vegetation") {
      if (key == "coverage") spec.veg_coverage = num();
      else if (key == "height_min") spec.veg_height_min = num();
      else if (key == "height_max") spec.veg_height_max = num();
      else if (key == "penetration") spec.veg_penetration = num();
      else if (key == "patch_size") spec.veg_patch_size = num();
    } else if (section == "box") {
      BoxObstacle& box = spec.obstacles.back();
      if (key == "center") {
        const auto v = parse_number_list(value);
        box.center = Vec2(v.at(0), v.at(1));
      } else if (key == "yaw") box.yaw = num();
      else if (key == "size") {
        const auto v = parse_number_list(value);
        box.size = Vec3(v.at(0), v.at(1), v.at(2));
      }
    } else if (section == "trajectory") {
      if (key == "waypoints") {
        std::istringstream pts(value);
        std::string pt;
        while (std::getline(pts, pt, ';')) {
          const auto v = parse_number_list(pt);
          if (v.size() >= 2) spec.waypoints.emplace_back(v[0], v[1]);
        }
      }
    } else if (section == "gait") {
      if (key == "stance") spec.gait.stance_s = num();
      else if (key == "swing") spec.gait.swing_s = num();
      else if (key == "step_length") spec.gait.step_length = num();
      else if (key == "clearance") spec.gait.clearance = num();
      else if (key == "sample_rate") spec.gait.sample_rate_hz = num();
      else if (key == "stance_width") spec.gait.stance_width = num();
      else if (key == "stance_length") spec.gait.stance_length = num();
    } else if (section == "camera") {
      if (key == "fx") spec.camera.intr.fx = num();
      else if (key == "fy") spec.camera.intr.fy = num();
      else if (key == "cx") spec.camera.intr.cx = num();
      else if (key == "cy") spec.camera.intr.cy = num();
      else if (key == "width") spec.camera.intr.width = static_cast<int>(num());
      else if (key == "height") spec.camera.intr.height = static_cast<int>(num());
      else if (key == "mount_height") spec.camera.mount_height = num();
      else if (key == "mount_forward") spec.camera.mount_forward = num();
      else if (key == "pitch") spec.camera.pitch = num();
      else if (key == "brightness_jitter") spec.camera.brightness_jitter = num();
    } else if (section == "lidar") {
      if (key == "rings") spec.lidar.rings = static_cast<int>(num());
      else if (key == "azimuth_steps") spec.lidar.azimuth_steps = static_cast<int>(num());
      else if (key == "elevation_min") spec.lidar.elevation_min = num();
      else if (key == "elevation_max") spec.lidar.elevation_max = num();
      else if (key == "noise_sigma") spec.lidar.range_noise_sigma = num();
      else if (key == "max_range") spec.lidar.max_range = num();
      else if (key == "mount_height") spec.lidar.mount_height = num();
    }
  }
  for (size_t i = 0; i < amp.size(); ++i) {
    SinusoidComponent s;
    s.amplitude = amp[i];
    s.frequency = i < freq.size() ? freq[i] : 0.0;
    s.direction = i < dir.size() ? dir[i] : 0.0;
    s.phase = i < phase.size() ? phase[i] : 0.0;
    spec.ground.push_back(s);
  }
  if (spec.waypoints.empty())
    spec.waypoints = {Vec2(0.0, 0.0), Vec2(10.0, 0.0)};
  return spec;
}

inline void write_scene_spec(const fs::path& path, const SceneSpec& spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_scene_spec: cannot open " + path.string());
  out.precision(17);
  out << "[scene]\n"
      << "seed = " << spec.seed << "\n"
      << "extent_min = " << spec.extent_min.x() << " " << spec.extent_min.y() << "\n"
      << "extent_max = " << spec.extent_max.x() << " " << spec.extent_max.y() << "\n"
      << "grid_resolution = " << spec.grid_resolution << "\n"
      << "body_height = " << spec.body_height << "\n"
      << "frame_interval = " << spec.frame_interval_s << "\n\n";
  out << "[ground]\namplitudes =";
  for (const auto& s : spec.ground) out << " " << s.amplitude;
  out << "\nfrequencies =";
  for (const auto& s : spec.ground) out << " " << s.frequency;
  out << "\ndirections =";
  for (const auto& s : spec.ground) out << " " << s.direction;
  out << "\nphases =";
  for (const auto& s : spec.ground) out << " " << s.phase;
  out << "\n\n[vegetation]\n"
      << "coverage = " << spec.veg_coverage << "\n"
      << "height_min = " << spec.veg_height_min << "\n"
      << "height_max = " << spec.veg_height_max << "\n"
      << "penetration = " << spec.veg_penetration << "\n"
      << "patch_size = " << spec.veg_patch_size << "\n";
  for (const BoxObstacle& box : spec.obstacles) {
    out << "\n[box]\n"
        << "center = " << box.center.x() << " " << box.center.y() << "\n"
        << "yaw = " << box.yaw << "\n"
        << "size = " << box.size.x() << " " << box.size.y() << " " << box.size.z() << "\n";
  }
  out << "\n[trajectory]\nwaypoints = ";
  for (size_t i = 0; i < spec.waypoints.size(); ++i)
    out << spec.waypoints[i].x() << " " << spec.waypoints[i].y()
        << (i + 1 < spec.waypoints.size() ? "; " : "\n");
  out << "\n[gait]\n"
      << "stance = " << spec.gait.stance_s << "\nswing = " << spec.gait.swing_s << "\n"
      << "step_length = " << spec.gait.step_length << "\nclearance = " << spec.gait.clearance
      << "\nsample_rate = " << spec.gait.sample_rate_hz << "\n"
      << "stance_width = " << spec.gait.stance_width
      << "\nstance_length = " << spec.gait.stance_length << "\n";
  out << "\n[camera]\n"
      << "fx = " << spec.camera.intr.fx << "\nfy = " << spec.camera.intr.fy << "\n"
      << "cx = " << spec.camera.intr.cx << "\ncy = " << spec.camera.intr.cy << "\n"
      << "width = " << spec.camera.intr.width << "\nheight = " << spec.camera.intr.height << "\n"
      << "mount_height = " << spec.camera.mount_height << "\n"
      << "mount_forward = " << spec.camera.mount_forward << "\n"
      << "pitch = " << spec.camera.pitch << "\n"
      << "brightness_jitter = " << spec.camera.brightness_jitter << "\n";
  out << "\n[lidar]\n"
      << "rings = " << spec.lidar.rings << "\nazimuth_steps = " << spec.lidar.azimuth_steps << "\n"
      << "elevation_min = " << spec.lidar.elevation_min
      << "\nelevation_max = " << spec.lidar.elevation_max << "\n"
      << "noise_sigma = " << spec.lidar.range_noise_sigma << "\n"
      << "max_range = " << spec.lidar.max_range << "\n"
      << "mount_height = " << spec.lidar.mount_height << "\n";
}

}  // namespace spf::io
