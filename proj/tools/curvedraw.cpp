// curvedraw: multiview curve-fragment reconstruction pipeline.
//
// Subcommands:
//   synth       generate a synthetic dataset from a scene spec
//   run         run the reconstruction pipeline
//   eval        precision/recall of a reconstruction against ground truth
//   sweep       rerun the pipeline over a parameter sweep, CSV output
//   export-ply  convert a drawing graph to PLY

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "curvedraw/io.hpp"
#include "curvedraw/parallel.hpp"
#include "curvedraw/pipeline.hpp"

namespace fs = std::filesystem;
using namespace curvedraw;

namespace {

struct CommonOpts {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool checkpoint = false;
  std::string stage;
  double tau_v = -1.0;
  int min_views = -1;
  double tau_prox = -1.0;
};

Params resolve_params(const CommonOpts& opts) {
  Params params;
  if (!opts.config.empty()) params = parse_config(opts.config);
  if (opts.seed_set) params.seed = opts.seed;
  if (opts.threads > 0) params.threads = opts.threads;
  if (opts.tau_v >= 0.0) params.tau_v = opts.tau_v;
  if (opts.min_views >= 0) params.n_min_views = opts.min_views;
  if (opts.tau_prox >= 0.0) params.tau_prox = opts.tau_prox;
  return params;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config, "pipeline config file");
  cmd->add_option("--out", opts.out, "output directory");
  cmd->add_option("--seed", opts.seed, "run seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--threads", opts.threads, "worker thread budget");
  cmd->add_flag("--checkpoint", opts.checkpoint, "write per-stage checkpoints");
  cmd->add_option("--stage", opts.stage,
                  "stop after stage (load|hypotheses|verify|fuse|"
                  "consistency|evolve|merge)");
  cmd->add_option("--tau-v", opts.tau_v, "per-view support threshold");
  cmd->add_option("--min-views", opts.min_views, "simultaneous view gate");
  cmd->add_option("--tau-prox", opts.tau_prox, "evaluation proximity");
}

PipelineInput input_from(const std::string& scene_path,
                         const std::string& data_dir) {
  PipelineInput input;
  if (!scene_path.empty()) {
    input.scene = load_scene_spec(scene_path);
    return input;
  }
  if (data_dir.empty()) {
    throw InvalidSpec("either --scene or --data is required");
  }
  input.cameras_path = (fs::path(data_dir) / "cameras.txt").string();
  if (!fs::exists(input.cameras_path)) {
    throw IoError("missing camera file: " + input.cameras_path);
  }
  for (int v = 0;; ++v) {
    const fs::path frag = fs::path(data_dir) /
                          ("curves_" + std::to_string(v) + ".txt");
    if (!fs::exists(frag)) break;
    input.fragment_paths.push_back(frag.string());
  }
  if (input.fragment_paths.empty()) {
    throw IoError("no curves_<view>.txt files under " + data_dir);
  }
  return input;
}

int cmd_synth(const std::string& spec_path, const CommonOpts& opts) {
  const Params params = resolve_params(opts);
  SceneSpec spec = load_scene_spec(spec_path);
  if (opts.seed_set) spec.seed = params.seed;
  SyntheticScene scene = generate_scene(spec);

  fs::create_directories(opts.out);
  save_cameras(scene.cameras, (fs::path(opts.out) / "cameras.txt").string());
  for (const auto& view : scene.views) {
    save_fragments(view,
                   (fs::path(opts.out) /
                    ("curves_" + std::to_string(view.view_id) + ".txt"))
                       .string());
  }
  save_polylines(scene.ground_truth,
                 (fs::path(opts.out) / "gt.curves").string());
  std::cout << "synth: " << scene.views.size() << " views, "
            << scene.ground_truth.size() << " ground-truth curves -> "
            << opts.out << "\n";
  return 0;
}

int cmd_run(const std::string& scene_path, const std::string& data_dir,
            const CommonOpts& opts) {
  const Params params = resolve_params(opts);
  const PipelineInput input = input_from(scene_path, data_dir);
  std::optional<Stage> until;
  if (!opts.stage.empty()) {
    until = stage_from_name(opts.stage);
    if (!until) {
      std::cerr << "unknown stage: " << opts.stage << "\n";
      return 2;
    }
  }
  const std::string checkpoint_dir = opts.checkpoint ? opts.out : "";
  PipelineResult result = run_pipeline(input, params, until, checkpoint_dir);
  std::cout << result.log;
  if (!until || *until == Stage::Merge) {
    write_outputs(result, params, opts.out);
    std::cout << "drawing: " << result.drawing.nodes.size() << " nodes, "
              << result.drawing.links.size() << " links, "
              << result.drawing.junction_count() << " junctions -> "
              << opts.out << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& recon_path, const std::string& gt_path,
             const CommonOpts& opts) {
  const Params params = resolve_params(opts);
  const auto recon = load_any_curves(recon_path);
  const auto gt = load_any_curves(gt_path);
  const double diag = polyline_set_diagonal(gt);
  const double tau =
      params.tau_prox > 0.0 ? params.tau_prox : params.tau_prox_frac * diag;
  const PRResult pr = evaluate(recon, gt, tau, tau * 0.5);
  std::cout << "precision=" << pr.precision << " recall=" << pr.recall
            << " tp=" << pr.tp_recon << " fp=" << pr.fp << " fn=" << pr.fn
            << " tau_prox=" << pr.tau_prox << "\n";
  return 0;
}

int cmd_sweep(const std::string& scene_path, const std::string& data_dir,
              const std::string& min_views_list, const std::string& tau_v_list,
              const std::string& gt_path, const CommonOpts& opts) {
  const Params params = resolve_params(opts);
  const PipelineInput input = input_from(scene_path, data_dir);

  auto parse_list = [](const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) values.push_back(std::stod(item));
    }
    return values;
  };
  std::vector<int> min_views;
  for (double v : parse_list(min_views_list)) {
    min_views.push_back(static_cast<int>(v));
  }
  const std::vector<double> tau_vs = parse_list(tau_v_list);

  std::vector<std::vector<Eigen::Vector3d>> gt;
  if (!gt_path.empty()) gt = load_any_curves(gt_path);

  const auto points = pr_sweep(input, params, min_views, tau_vs, gt);
  const std::string csv = sweep_to_csv(points);
  std::cout << csv;
  if (opts.out != ".") {
    fs::create_directories(opts.out);
    std::ofstream out((fs::path(opts.out) / "sweep.csv").string());
    out << csv;
  }
  return 0;
}

int cmd_export_ply(const std::string& in_path, const std::string& out_path) {
  export_ply(load_drawing(in_path), out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiview 2D curve fragments to a 3D curve drawing"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string scene_path, data_dir, spec_path, recon_path, gt_path;
  std::string min_views_list = "2,3,4,5,6", tau_v_list;
  std::string ply_in, ply_out = "drawing.ply";

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--spec", spec_path, "scene spec (JSON)")->required();
  add_common(synth, opts);

  auto* run = app.add_subcommand("run", "run the reconstruction pipeline");
  run->add_option("--scene", scene_path, "synthetic scene spec (JSON)");
  run->add_option("--data", data_dir, "dataset directory (cameras + curves)");
  add_common(run, opts);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a reconstruction");
  eval_cmd->add_option("--recon", recon_path, "reconstruction file")
      ->required();
  eval_cmd->add_option("--gt", gt_path, "ground-truth curves")->required();
  add_common(eval_cmd, opts);

  auto* sweep = app.add_subcommand("sweep", "precision/recall sweep");
  sweep->add_option("--scene", scene_path, "synthetic scene spec (JSON)");
  sweep->add_option("--data", data_dir, "dataset directory");
  sweep->add_option("--min-views-list", min_views_list,
                    "comma-separated n_min_views values");
  sweep->add_option("--tau-v-list", tau_v_list,
                    "comma-separated tau_v values");
  sweep->add_option("--gt", gt_path, "ground-truth curve file");
  add_common(sweep, opts);

  auto* export_cmd = app.add_subcommand("export-ply", "drawing graph to PLY");
  export_cmd->add_option("--in", ply_in, "drawing graph file")->required();
  export_cmd->add_option("--out", ply_out, "PLY output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (opts.threads > 0) set_thread_budget(opts.threads);

  try {
    if (synth->parsed()) return cmd_synth(spec_path, opts);
    if (run->parsed()) return cmd_run(scene_path, data_dir, opts);
    if (eval_cmd->parsed()) return cmd_eval(recon_path, gt_path, opts);
    if (sweep->parsed()) {
      return cmd_sweep(scene_path, data_dir, min_views_list, tau_v_list,
                       gt_path, opts);
    }
    if (export_cmd->parsed()) return cmd_export_ply(ply_in, ply_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
