#pragma once

#include <cstdint>
#include <string>

namespace curvedraw {

// Every algorithmic constant of the pipeline, with its default. Loaded from
// a flat key=value config file with [section] headers; unknown keys are
// rejected so configs stay an exact record of a run.
struct Params {
  // [geometry]
  double eps_depth = 1e-8;
  double eps_angle_deg = 0.5;

  // [hypothesis]
  double tau_overlap = 0.5;     // min epipolar overlap fraction
  int min_curve_edgels = 5;     // curves shorter than this are not paired
  std::string pair_strategy = "exhaustive";  // or "window"
  int pair_window = 1;

  // [verification]
  double delta_d = 2.0;          // support distance gate, pixels
  double delta_theta_deg = 15.0;  // support orientation gate
  int n_min_views = 3;           // simultaneous supporting views required
  int min_run = 5;               // shortest kept supported run, samples
  double tau_v = 0.0;            // per-view support threshold (Iverson gate)
  double reliability_floor = 0.1;  // tangency weight below this is unreliable

  // [averaging]
  int bucket_gap = 3;  // max uncovered primary edgels bridged inside one curve

  // [consistency]
  int tau_eps = 3;   // min shared-view weight of a strong local link
  int tau_sl = 5;    // min strong local links for a curve-level link
  int g_max = 5;     // max gap (samples) closed by gap filling

  // [drawing]
  double alpha = 1.0;        // evolution step: 1 moves to the average
  int max_iters = 50;
  double sample_spacing = 0.0;     // 0 derives diameter / spacing_divisor
  double spacing_divisor = 2000.0;
  double merge_factor = 2.0;   // d_merge = merge_factor * sample spacing
  double snap_factor = 3.0;    // endpoint snap radius, in sample spacings
  double tol_factor = 0.01;    // evolution tol = tol_factor * sample spacing

  // [eval]
  double tau_prox = 0.0;          // 0 derives tau_prox_frac * GT diagonal
  double tau_prox_frac = 0.005;

  // [run]
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = library default
};

// Parse / serialize the [section] key=value format. parse_config throws
// IoError on missing files and InvalidSpec on malformed or unknown keys.
Params parse_config(const std::string& path);
Params parse_config_text(const std::string& text, const std::string& origin);
std::string config_to_text(const Params& params);
void write_config(const Params& params, const std::string& path);

// FNV-1a over the canonical serialized form; logged for reproducibility.
std::uint64_t config_hash(const Params& params);

}  // namespace curvedraw
