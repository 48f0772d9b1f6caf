#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "curvedraw/curve_model.hpp"
#include "curvedraw/geometry.hpp"

namespace curvedraw {

enum class PrimitiveKind { Segment, Arc, Helix, Polyline };

// One analytic 3D curve of the scene, evaluated by arc parameter u in [0,1].
struct CurvePrimitive {
  PrimitiveKind kind = PrimitiveKind::Segment;
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();      // segment start
  Eigen::Vector3d p1 = Eigen::Vector3d::UnitX();     // segment end
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // arc / helix
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();   // arc normal / helix axis
  double radius = 1.0;
  double angle0 = 0.0;                // arc start angle (radians)
  double angle1 = 2.0 * 3.14159265358979323846;  // arc end angle
  double pitch = 0.5;                 // helix rise per turn
  double turns = 2.0;
  std::vector<Eigen::Vector3d> points;  // polyline vertices

  Eigen::Vector3d point_at(double u) const;
};

// Camera ring around the scene.
struct RigSpec {
  int count = 8;
  double radius_factor = 5.0;     // ring radius as a multiple of scene diameter
  double elevation_deg = 20.0;
  bool alternate_elevation = true;  // odd cameras mirrored below the plane
  int width = 800;
  int height = 800;
  double focal = 0.0;             // pixels; 0 derives one from the scene size
  Eigen::Vector3d look_at = Eigen::Vector3d::Zero();
  bool auto_look_at = true;       // aim at the scene centroid
};

struct SceneSpec {
  std::vector<CurvePrimitive> curves;
  RigSpec rig;
  double noise_sigma = 0.0;       // 2D Gaussian noise, pixels
  double fragmentation = 0.0;     // break probability per coarse curve sample
  double dropout = 0.0;           // per-curve-per-view visibility dropout
  int outliers = 0;               // spurious 2D curves per view
  std::uint64_t seed = 0;
  double edgel_spacing_px = 1.0;
  int coarse_samples = 50;        // fragmentation resolution per curve

  void validate() const;  // throws InvalidSpec
};

struct SyntheticScene {
  std::vector<std::vector<Eigen::Vector3d>> ground_truth;  // sampled 3D curves
  std::vector<Camera> cameras;
  std::vector<ViewData> views;
  // Diagnostics: per view, per 2D curve, the generating ground-truth curve
  // (-1 for injected outliers) and per-edgel source parameter u.
  std::vector<std::vector<int>> fragment_source;
  std::vector<std::vector<std::vector<double>>> edgel_params;

  double diameter() const;  // ground-truth bounding-box diagonal
};

// Deterministic per seed: projects every curve into every visible view,
// applies noise, fragmentation, dropout and outlier injection.
SyntheticScene generate_scene(const SceneSpec& spec);

// Uniform resampling of the ground-truth curves for evaluation. A closed
// curve contributes its wrap-around sample once.
std::vector<Eigen::Vector3d> ground_truth_samples(
    const std::vector<std::vector<Eigen::Vector3d>>& gt_curves, double spacing);

// Ready-made scenes.
SceneSpec make_cube_scene(double edge = 1.0, int n_views = 8);
SceneSpec make_segment_scene(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                             int n_views = 2);

// JSON scene file round trip.
SceneSpec load_scene_spec(const std::string& path);
void save_scene_spec(const SceneSpec& spec, const std::string& path);

// Seed derivation for independent per-view streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace curvedraw
