#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spf/filter.hpp"
#include "spf/io.hpp"
#include "spf/labels.hpp"
#include "spf/mapping.hpp"
#include "spf/metrics.hpp"
#include "spf/surface.hpp"
#include "spf/synth.hpp"
#include "spf/training.hpp"

namespace spf {

/// Shared knobs for the label-generation and mapping pipelines.
struct PipelineConfig {
  WindowParams window;          // foothold extraction
  GpParams gp;                  // surface reconstruction
  TilingConfig tiling;
  double surface_resolution = 0.1;
  double surface_margin = 1.0;  // beyond the foothold bounding box, meters
  double tau_max = 0.03;        // SSDE variance mask threshold
  double map_size = 8.0;
  double map_resolution = 0.04;
  int smooth_radius = 2;
  double measurement_variance = 0.01;
  int jobs = 1;
};

/// One rendered frame of a synthetic scene.
struct FrameRecord {
  SceneFrame frame;
  LidarScan scan;
  CameraRender render;
};

inline std::vector<FrameRecord> render_frames(const Scene& scene) {
  std::vector<FrameRecord> records;
  records.reserve(scene.frames.size());
  for (size_t i = 0; i < scene.frames.size(); ++i) {
    FrameRecord rec;
    rec.frame = scene.frames[i];
    rec.scan = simulate_lidar(scene, scene.frames[i].lidar, i);
    rec.render = simulate_camera(scene, scene.frames[i].camera, scene.spec.camera.intr, i);
    records.push_back(std::move(rec));
  }
  return records;
}

inline FootholdSet extract_all_footholds(const std::vector<FootTrajectory>& feet,
                                         const WindowParams& params) {
  FootholdSet set;
  for (const FootTrajectory& foot : feet) set.append(extract_footholds(foot, params).set);
  return set;
}

/// Grid geometry covering the foothold bounding box plus margin.
inline GridGeometry surface_grid_for(const FootholdSet& fh, double resolution, double margin) {
  if (fh.empty()) throw std::invalid_argument("surface_grid_for: no footholds");
  Vec2 lo(fh.footholds[0].x(), fh.footholds[0].y());
  Vec2 hi = lo;
  for (const Vec3& f : fh.footholds) {
    lo.x() = std::min(lo.x(), f.x());
    lo.y() = std::min(lo.y(), f.y());
    hi.x() = std::max(hi.x(), f.x());
    hi.y() = std::max(hi.y(), f.y());
  }
  GridGeometry geom;
  geom.resolution = resolution;
  geom.origin = lo - Vec2(margin, margin);
  geom.cols = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x() + 2.0 * margin) / resolution)));
  geom.rows = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y() + 2.0 * margin) / resolution)));
  return geom;
}

/// Everything the label-generation stage produces for one synthetic scene.
struct BuiltDataset {
  Scene scene;
  GaitResult gait;
  FootholdSet footholds;
  SurfaceMap gp_surface;
  std::vector<FrameRecord> frames;
  std::vector<TrainingSample> samples;
};

/// Full in-memory pipeline: scene -> gait -> footholds -> GP surface ->
/// per-frame training samples with SSDE labels and true segmentation masks.
inline BuiltDataset build_synthetic_dataset(const SceneSpec& spec, const PipelineConfig& cfg) {
  BuiltDataset ds;
  ds.scene = generate_scene(spec);
  ds.gait = simulate_gait(ds.scene);
  ds.footholds = extract_all_footholds(ds.gait.feet, cfg.window);
  if (!ds.footholds.empty()) {
    const GridGeometry geom =
        surface_grid_for(ds.footholds, cfg.surface_resolution, cfg.surface_margin);
    ds.gp_surface = reconstruct_surface(ds.footholds, cfg.tiling, cfg.gp, geom, cfg.jobs);
  }
  ds.frames = render_frames(ds.scene);
  for (const FrameRecord& rec : ds.frames) {
    TrainingSample sample =
        build_training_sample(rec.render.rgb, rec.scan.cloud, ds.gp_surface,
                              spec.camera.intr, rec.frame.camera, cfg.tau_max, rec.render.true_mask);
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Dataset directory layout: one directory per frame plus manifest and shared
// files, identical for synthetic and recorded data.

inline std::vector<std::string> save_dataset(const BuiltDataset& ds,
                                             const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  fs::create_directories(root);
  io::write_scene_spec(root / "scene.cfg", ds.scene.spec);
  io::write_trajectories(root / "trajectory.csv", ds.gait.feet);
  io::write_surface(root / "truth_surface.spfr", ds.scene.true_surface);
  if (ds.gp_surface.geom.rows > 0) io::write_surface(root / "gp_surface.spfr", ds.gp_surface);

  std::vector<std::string> frame_dirs;
  for (size_t i = 0; i < ds.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu", i);
    const fs::path dir = root / name;
    fs::create_directories(dir);
    const FrameRecord& rec = ds.frames[i];
    io::FrameMeta meta;
    meta.t = rec.frame.t;
    meta.intrinsics = ds.scene.spec.camera.intr;
    meta.camera = rec.frame.camera;
    meta.lidar = rec.frame.lidar;
    meta.robot = rec.frame.robot;
    io::write_meta(dir / "meta.txt", meta);
    io::write_ply(dir / "cloud.ply", rec.scan.cloud);
    io::write_rgb(dir / "rgb.spfr", rec.render.rgb);
    io::write_seg(dir / "seg.spfr", rec.render.true_mask);
    if (i < ds.samples.size()) {
      io::write_depth(dir / "xd.spfr", ds.samples[i].sparse_depth);
      io::write_ssde(dir / "ssde.spfr", ds.samples[i].ssde);
    }
    frame_dirs.push_back(name);
  }
  io::write_manifest(root / "manifest.txt", frame_dirs);
  return frame_dirs;
}

struct LoadedFrame {
  io::FrameMeta meta;
  PointCloud cloud;
  RgbImage rgb;
  std::optional<SegMask> seg;
  std::optional<SparseDepthImage> xd;
  std::optional<SsdeLabel> ssde;
};

inline LoadedFrame load_frame(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  LoadedFrame frame;
  frame.meta = io::read_meta(dir / "meta.txt");
  frame.cloud = io::read_ply(dir / "cloud.ply");
  frame.rgb = io::read_rgb(dir / "rgb.spfr");
  if (fs::exists(dir / "seg.spfr")) frame.seg = io::read_seg(dir / "seg.spfr");
  if (fs::exists(dir / "xd.spfr")) frame.xd = io::read_depth(dir / "xd.spfr");
  if (fs::exists(dir / "ssde.spfr")) frame.ssde = io::read_ssde(dir / "ssde.spfr");
  return frame;
}

inline TrainingSample sample_from_frame(const LoadedFrame& frame) {
  TrainingSample sample;
  sample.rgb = frame.rgb;
  if (frame.xd) {
    sample.sparse_depth = *frame.xd;
  } else {
    const PointCloud cam =
        transform_cloud(frame.cloud, frame.meta.camera.inverse(), Frame::kSensor);
    sample.sparse_depth = project_points(cam, frame.meta.intrinsics);
  }
  if (frame.ssde) sample.ssde = *frame.ssde;
  else sample.ssde = SsdeLabel(frame.rgb.rows, frame.rgb.cols);
  sample.seg = frame.seg;
  sample.validate();
  return sample;
}

// ---------------------------------------------------------------------------
// Mapping evaluation: feed per-frame clouds (raw / smoothed / filtered /
// foothold completion) into the robot-centric elevation map and accumulate
// errors against the true surface in the robot frame.

enum class MapSource { kRaw, kSmooth, kSpf, kFoothold };

inline MapSource map_source_from_string(const std::string& s) {
  if (s == "raw") return MapSource::kRaw;
  if (s == "smooth") return MapSource::kSmooth;
  if (s == "spf") return MapSource::kSpf;
  if (s == "foothold") return MapSource::kFoothold;
  throw std::invalid_argument("unknown map source: " + s);
}

struct MappingEvalResult {
  ErrorMapAccumulator accumulator;
  ElevationMap final_map;
  double rmse = 0.0;
};

/// Replay the frames in manifest order. The raw and smooth baselines see only
/// points inside the camera FoV; the SPF path filters the same FoV points.
/// The foothold baseline rebuilds a nearest-neighbor completion from the
/// footholds extracted so far at every frame.
inline MappingEvalResult run_mapping_eval(const Scene& scene,
                                          const std::vector<FrameRecord>& frames,
                                          MapSource source, const PipelineConfig& cfg,
                                          const Predictor* predictor = nullptr,
                                          const std::vector<FootTrajectory>* feet = nullptr) {
  if (source == MapSource::kSpf && predictor == nullptr)
    throw std::invalid_argument("run_mapping_eval: SPF source needs a predictor");
  if (source == MapSource::kFoothold && feet == nullptr)
    throw std::invalid_argument("run_mapping_eval: foothold source needs trajectories");

  MappingEvalResult result;
  result.accumulator = ErrorMapAccumulator::create(cfg.map_size, cfg.map_resolution);
  ElevationMap map = ElevationMap::create(cfg.map_size, cfg.map_resolution);
  const CameraIntrinsics& intr = scene.spec.camera.intr;

  for (const FrameRecord& rec : frames) {
    const Pose& robot = rec.frame.robot;
    if (source == MapSource::kFoothold) {
      // Only the trajectory walked so far is available to proprioception.
      std::vector<FootTrajectory> past;
      for (const FootTrajectory& foot : *feet) {
        FootTrajectory clipped;
        clipped.foot_id = foot.foot_id;
        for (const FootSample& s : foot.samples)
          if (s.t <= rec.frame.t) clipped.samples.push_back(s);
        past.push_back(std::move(clipped));
      }
      const FootholdSet fh = extract_all_footholds(past, cfg.window);
      if (fh.empty()) continue;
      map = ElevationMap::create(cfg.map_size, cfg.map_resolution);
      map.recenter(Vec2(robot.translation.x(), robot.translation.y()));
      map = foothold_nn_map(fh, map);
    } else {
      PointCloud cloud = points_in_fov(rec.scan.cloud, intr, rec.frame.camera);
      if (source == MapSource::kSpf) {
        const FilterOutput out =
            filter_pointcloud(cloud, rec.render.rgb, intr, rec.frame.camera, *predictor);
        cloud = out.cloud;
      }
      fuse_elevation(map, cloud, robot, cfg.measurement_variance);
    }
    if (source == MapSource::kSmooth) {
      ElevationMap smoothed = smooth_map(map, cfg.smooth_radius);
      result.accumulator.accumulate(smoothed, scene.true_surface, robot);
      result.final_map = std::move(smoothed);
    } else {
      result.accumulator.accumulate(map, scene.true_surface, robot);
      result.final_map = map;
    }
  }
  result.rmse = result.accumulator.total_rmse();
  return result;
}

/// Vertical RMSE of cloud points against the analytic ground, optionally
/// restricted by the return-type labels.
inline double cloud_to_surface_rmse(const Scene& scene, const PointCloud& cloud,
                                    const std::vector<ReturnType>* labels = nullptr,
                                    std::optional<ReturnType> only = std::nullopt) {
  double sq = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    if (labels && only && (*labels)[i] != *only) continue;
    const Vec3& p = cloud.points[i];
    const double e = p.z() - scene.ground_height(p.x(), p.y());
    sq += e * e;
    ++n;
  }
  return n > 0 ? std::sqrt(sq / n) : 0.0;
}

}  // namespace spf
