#pragma once

#include <vector>

#include "curvedraw/config.hpp"
#include "curvedraw/curve_model.hpp"
#include "curvedraw/geometry.hpp"
#include "curvedraw/hypothesis.hpp"

namespace curvedraw {

// Edge support of one reprojected sample in one confirmation view.
struct EdgeSupport {
  double phi = 0.0;            // 1 when a close, aligned edgel exists
  std::vector<int> edgel_ids;  // all edgels passing both gates, sorted
};

// Support gathered by one hypothesis from one confirmation view.
struct ViewSupportEntry {
  int view_id = -1;
  std::vector<double> values;     // per-sample integrand: phi * tangency
  std::vector<double> tangency;   // per-sample epipolar tangency weight
  std::vector<char> supported;    // phi > 0
  std::vector<int> nearest_edgel; // closest supporting edgel, -1 when none
  double total = 0.0;             // S^v: trapezoidal integral of values
};

// Full support profile of a hypothesis over its confirmation views.
struct SupportProfile {
  std::vector<ViewSupportEntry> views;
  // Per sample: number of confirmation views with phi > 0 and tangency
  // weight at or above the reliability floor (and S^v above tau_v).
  std::vector<int> view_count;
  // Per sample: min over confirmation views of the tangency weight,
  // combined with the hypothesis-time reliability.
  std::vector<double> reliability;
};

// phi = 1 iff an edgel lies within delta_d pixels and delta_theta radians
// (orientation mod pi) of the reprojected sample.
EdgeSupport edge_support(const Eigen::Vector2d& sample_reproj,
                         const Eigen::Vector2d& sample_tangent, int view_id,
                         const EdgelIndex& index, double delta_d,
                         double delta_theta_rad);

ViewSupportEntry view_support(const CurvePairHypothesis& hyp, int view_id,
                              const std::vector<Camera>& cameras,
                              const EdgelIndex& index, const Params& params);

SupportProfile support_profile(const CurvePairHypothesis& hyp,
                               const std::vector<Camera>& cameras,
                               const EdgelIndex& index, const Params& params);

// Sum of S^v over views with S^v strictly above tau_v.
double aggregate_support(const SupportProfile& profile, double tau_v);

// Maximal runs of samples supported in at least n_min_views confirmation
// views. Samples below the reliability floor bridge runs (kept for
// topology) but never qualify themselves; runs are trimmed to qualified
// endpoints and dropped when shorter than min_run samples.
std::vector<Curve3D> localize_supported_portions(const CurvePairHypothesis& hyp,
                                                 const SupportProfile& profile,
                                                 const Params& params);

// The enhanced-curve-sketch verification pass over all hypotheses.
std::vector<Curve3D> verify_all(const std::vector<CurvePairHypothesis>& hyps,
                                const std::vector<Camera>& cameras,
                                const EdgelIndex& index, const Params& params);

// Serial reference of verify_all, kept for testing the parallel kernel.
std::vector<Curve3D> verify_all_serial(
    const std::vector<CurvePairHypothesis>& hyps,
    const std::vector<Camera>& cameras, const EdgelIndex& index,
    const Params& params);

}  // namespace curvedraw
