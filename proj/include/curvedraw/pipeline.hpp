#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvedraw/config.hpp"
#include "curvedraw/consistency.hpp"
#include "curvedraw/curve_model.hpp"
#include "curvedraw/drawing.hpp"
#include "curvedraw/eval.hpp"
#include "curvedraw/geometry.hpp"
#include "curvedraw/synth.hpp"

namespace curvedraw {

enum class Stage {
  Load,
  Hypotheses,
  Verify,
  Fuse,
  Consistency,
  Evolve,
  Merge,
};

std::optional<Stage> stage_from_name(const std::string& name);
std::string stage_name(Stage stage);

struct PipelineInput {
  // Either a synthetic scene spec, or camera + fragment files.
  std::optional<SceneSpec> scene;
  std::string cameras_path;
  std::vector<std::string> fragment_paths;
};

struct StageStats {
  std::string stage;
  std::size_t count = 0;
  double wall_ms = 0.0;
};

struct PipelineResult {
  std::vector<Camera> cameras;
  std::vector<ViewData> views;
  std::size_t n_hypotheses = 0;
  std::vector<Curve3D> verified;
  std::vector<Curve3D> fused;
  std::vector<Curve3D> resampled;
  MCCN mccn;
  DrawingGraph drawing;
  double sample_spacing = 0.0;
  std::vector<std::vector<Eigen::Vector3d>> ground_truth;  // synthetic only
  std::vector<StageStats> stats;
  std::string log;
};

// Runs load -> hypotheses -> verify -> fuse -> consistency -> evolve/merge,
// stopping after `until` when given. With checkpoint_dir set, per-stage
// checkpoints are written there.
PipelineResult run_pipeline(const PipelineInput& input, const Params& params,
                            std::optional<Stage> until = std::nullopt,
                            const std::string& checkpoint_dir = "");

// Writes drawing.graph, drawing.ply and run.log under out_dir.
void write_outputs(const PipelineResult& result, const Params& params,
                   const std::string& out_dir);

struct SweepPoint {
  std::string param;
  double value = 0.0;
  bool failed = false;
  std::string error;
  PRResult pr;
  double arc_length = 0.0;
};

// Reruns the pipeline per parameter setting against the scene's ground
// truth (or a GT file) and reports precision/recall per point.
std::vector<SweepPoint> pr_sweep(const PipelineInput& input,
                                 const Params& base_params,
                                 const std::vector<int>& n_min_views_values,
                                 const std::vector<double>& tau_v_values,
                                 const std::vector<std::vector<Eigen::Vector3d>>&
                                     gt_override = {});

std::string sweep_to_csv(const std::vector<SweepPoint>& points);

}  // namespace curvedraw
