#pragma once

#include <string>
#include <utility>
#include <vector>

#include "curvedraw/config.hpp"
#include "curvedraw/curve_model.hpp"
#include "curvedraw/geometry.hpp"

namespace curvedraw {

// Pairing of one 2D curve from each hypothesis view with its pointwise
// triangulation. The first view is the primary hypothesis view.
struct CurvePairHypothesis {
  int view1 = -1;
  int view2 = -1;
  int curve1_id = -1;
  int curve2_id = -1;
  // Correspondence (index into curve1, fractional index into curve2),
  // monotone non-decreasing in both coordinates. When the curves run in
  // opposite directions the curve2 coordinate is stored against the
  // reversed indexing, marked by curve2_reversed.
  std::vector<std::pair<int, double>> correspondence;
  bool curve2_reversed = false;
  double overlap_fraction = 0.0;
  Curve3D reconstruction;
};

struct OverlapResult {
  double overlap_fraction = 0.0;
  std::vector<std::pair<int, double>> correspondence;
  bool curve2_reversed = false;
};

// Fraction of c1's edgels whose epipolar line meets c2, with the longest
// order-consistent chain of intersections.
OverlapResult epipolar_overlap(const Curve2D& c1, const Curve2D& c2,
                               const Camera& cam1, const Camera& cam2);

// All curve pair hypotheses between two views whose epipolar overlap
// reaches params.tau_overlap, reconstructed by pointwise triangulation.
// Samples near epipolar tangency are kept with low reliability.
std::vector<CurvePairHypothesis> generate_hypotheses(
    const ViewData& view1, const ViewData& view2, const Camera& cam1,
    const Camera& cam2, const Params& params);

// Hypothesis-view pair schedule. strategy: "exhaustive" for all C(n,2)
// pairs, "window" for |v1 - v2| <= window.
std::vector<std::pair<int, int>> enumerate_view_pairs(
    int n_views, const std::string& strategy, int window = 1);

// Hypotheses for every scheduled view pair, concatenated in deterministic
// (view1, view2, curve1_id, curve2_id) order with sequential curve ids.
std::vector<CurvePairHypothesis> generate_all_hypotheses(
    const std::vector<ViewData>& views, const std::vector<Camera>& cameras,
    const Params& params);

}  // namespace curvedraw
