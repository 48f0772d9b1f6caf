#include "curvedraw/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "curvedraw/averaging.hpp"
#include "curvedraw/hypothesis.hpp"
#include "curvedraw/io.hpp"
#include "curvedraw/parallel.hpp"
#include "curvedraw/verification.hpp"

namespace curvedraw {

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

double reconstruction_diameter(const std::vector<Curve3D>& curves) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e300);
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(-1e300);
  bool any = false;
  for (const auto& c : curves) {
    for (const auto& s : c.samples) {
      lo = lo.cwiseMin(s.position);
      hi = hi.cwiseMax(s.position);
      any = true;
    }
  }
  return any ? (hi - lo).norm() : 1.0;
}

}  // namespace

std::optional<Stage> stage_from_name(const std::string& name) {
  if (name == "load") return Stage::Load;
  if (name == "hypotheses") return Stage::Hypotheses;
  if (name == "verify") return Stage::Verify;
  if (name == "fuse") return Stage::Fuse;
  if (name == "consistency") return Stage::Consistency;
  if (name == "evolve") return Stage::Evolve;
  if (name == "merge") return Stage::Merge;
  return std::nullopt;
}

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::Load: return "load";
    case Stage::Hypotheses: return "hypotheses";
    case Stage::Verify: return "verify";
    case Stage::Fuse: return "fuse";
    case Stage::Consistency: return "consistency";
    case Stage::Evolve: return "evolve";
    case Stage::Merge: return "merge";
  }
  return "?";
}

PipelineResult run_pipeline(const PipelineInput& input, const Params& params,
                            std::optional<Stage> until,
                            const std::string& checkpoint_dir) {
  namespace fs = std::filesystem;
  if (params.threads > 0) set_thread_budget(params.threads);

  PipelineResult result;
  std::ostringstream log;
  log << "config_hash " << config_hash(params) << "\n";
  log << "seed " << params.seed << "\n";

  auto record = [&](const std::string& stage, std::size_t count,
                    double t0) {
    StageStats s;
    s.stage = stage;
    s.count = count;
    s.wall_ms = now_ms() - t0;
    result.stats.push_back(s);
    log << "stage " << stage << " count " << count << " wall_ms "
        << s.wall_ms << "\n";
  };
  auto reached = [&](Stage stage) {
    return !until.has_value() ||
           static_cast<int>(stage) <= static_cast<int>(*until);
  };
  auto checkpoint = [&](const std::string& name, const auto& writer) {
    if (checkpoint_dir.empty()) return;
    fs::create_directories(checkpoint_dir);
    writer((fs::path(checkpoint_dir) / name).string());
  };

  // --- load ---------------------------------------------------------------
  double t0 = now_ms();
  if (input.scene) {
    SceneSpec spec = *input.scene;
    if (spec.seed == 0) spec.seed = params.seed;
    SyntheticScene scene = generate_scene(spec);
    result.cameras = std::move(scene.cameras);
    result.views = std::move(scene.views);
    result.ground_truth = std::move(scene.ground_truth);
  } else {
    result.cameras = load_cameras(input.cameras_path);
    for (const auto& path : input.fragment_paths) {
      result.views.push_back(load_fragments(path));
    }
    if (result.cameras.size() != result.views.size()) {
      throw InvalidSpec("camera count (" +
                        std::to_string(result.cameras.size()) +
                        ") does not match fragment file count (" +
                        std::to_string(result.views.size()) + ")");
    }
  }
  std::size_t n_edgels = 0;
  for (const auto& v : result.views) n_edgels += v.edgel_count();
  record("load", n_edgels, t0);
  if (!reached(Stage::Hypotheses)) {
    result.log = log.str();
    return result;
  }

  const EdgelIndex index(result.views, params.delta_d);

  // --- hypotheses -----------------------------------------------------------
  t0 = now_ms();
  const std::vector<CurvePairHypothesis> hypotheses =
      generate_all_hypotheses(result.views, result.cameras, params);
  result.n_hypotheses = hypotheses.size();
  record("hypotheses", hypotheses.size(), t0);
  checkpoint("hypotheses.txt", [&](const std::string& path) {
    std::ofstream out(path);
    for (const auto& h : hypotheses) {
      out << h.view1 << " " << h.view2 << " " << h.curve1_id << " "
          << h.curve2_id << " " << h.overlap_fraction << " "
          << h.reconstruction.size() << "\n";
    }
  });
  if (!reached(Stage::Verify)) {
    result.log = log.str();
    return result;
  }

  // --- verify ---------------------------------------------------------------
  t0 = now_ms();
  result.verified = verify_all(hypotheses, result.cameras, index, params);
  record("verify", result.verified.size(), t0);
  checkpoint("verified.curves", [&](const std::string& path) {
    save_curves3d(result.verified, path);
  });
  if (!reached(Stage::Fuse)) {
    result.log = log.str();
    return result;
  }

  // --- fuse -----------------------------------------------------------------
  t0 = now_ms();
  result.fused = fuse_redundant(result.verified, index, params);
  record("fuse", result.fused.size(), t0);
  checkpoint("fused.curves", [&](const std::string& path) {
    save_curves3d(result.fused, path);
  });

  // Sample spacing for the drawing stages.
  result.sample_spacing =
      params.sample_spacing > 0.0
          ? params.sample_spacing
          : reconstruction_diameter(result.fused) / params.spacing_divisor;
  if (result.sample_spacing <= 0.0) result.sample_spacing = 1e-3;

  result.resampled.clear();
  for (const auto& curve : result.fused) {
    if (arc_length(curve) <= result.sample_spacing) continue;
    Curve3D re = resample_uniform(curve, result.sample_spacing);
    re.curve_id = static_cast<int>(result.resampled.size());
    result.resampled.push_back(std::move(re));
  }
  if (!reached(Stage::Consistency)) {
    result.log = log.str();
    return result;
  }

  // --- consistency ------------------------------------------------------------
  t0 = now_ms();
  MLN mln = build_mln(result.resampled);
  result.mccn = build_mccn(mln, static_cast<int>(result.resampled.size()),
                           params.tau_eps, params.tau_sl);
  mln = gap_fill(mln, result.mccn, params.g_max);
  record("consistency", result.mccn.links.size(), t0);
  checkpoint("mccn.txt", [&](const std::string& path) {
    std::ofstream out(path);
    for (const auto& [pair_key, count] : result.mccn.strong_counts) {
      out << pair_key.first << " " << pair_key.second << " " << count << "\n";
    }
  });
  if (!reached(Stage::Evolve)) {
    result.log = log.str();
    return result;
  }

  // --- evolve + merge --------------------------------------------------------
  t0 = now_ms();
  result.drawing = build_drawing(result.resampled, result.mccn, params,
                                 result.sample_spacing);
  record("merge", result.drawing.links.size(), t0);

  result.log = log.str();
  return result;
}

void write_outputs(const PipelineResult& result, const Params& params,
                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  save_drawing(result.drawing, (fs::path(out_dir) / "drawing.graph").string());
  export_ply(result.drawing, (fs::path(out_dir) / "drawing.ply").string());
  std::ofstream log((fs::path(out_dir) / "run.log").string());
  log << result.log;
  std::ofstream cfg((fs::path(out_dir) / "run.cfg").string());
  cfg << config_to_text(params);
}

std::vector<SweepPoint> pr_sweep(
    const PipelineInput& input, const Params& base_params,
    const std::vector<int>& n_min_views_values,
    const std::vector<double>& tau_v_values,
    const std::vector<std::vector<Eigen::Vector3d>>& gt_override) {
  std::vector<SweepPoint> points;
  struct Setting {
    std::string param;
    double value;
    Params params;
  };
  std::vector<Setting> settings;
  for (int v : n_min_views_values) {
    Params p = base_params;
    p.n_min_views = v;
    settings.push_back({"n_min_views", static_cast<double>(v), p});
  }
  for (double t : tau_v_values) {
    Params p = base_params;
    p.tau_v = t;
    settings.push_back({"tau_v", t, p});
  }

  for (const auto& setting : settings) {
    SweepPoint point;
    point.param = setting.param;
    point.value = setting.value;
    try {
      PipelineResult run = run_pipeline(input, setting.params);
      const auto gt = !gt_override.empty() ? gt_override : run.ground_truth;
      if (gt.empty()) throw EmptyGroundTruth("sweep needs ground truth");
      const double diag = polyline_set_diagonal(gt);
      const double tau = setting.params.tau_prox > 0.0
                             ? setting.params.tau_prox
                             : setting.params.tau_prox_frac * diag;
      point.pr = evaluate(graph_polylines(run.drawing), gt, tau,
                          run.sample_spacing > 0 ? run.sample_spacing
                                                 : tau * 0.5);
      point.arc_length = run.drawing.total_arc_length();
    } catch (const std::exception& e) {
      point.failed = true;
      point.error = e.what();
    }
    points.push_back(std::move(point));
  }
  return points;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "param,value,precision,recall,tp,fp,fn,arc_length,status\n";
  for (const auto& p : points) {
    out << p.param << "," << p.value << ",";
    if (p.failed) {
      out << ",,,,,,failed: " << p.error << "\n";
    } else {
      out << p.pr.precision << "," << p.pr.recall << "," << p.pr.tp_recon
          << "," << p.pr.fp << "," << p.pr.fn << "," << p.arc_length
          << ",ok\n";
    }
  }
  return out.str();
}

}  // namespace curvedraw
