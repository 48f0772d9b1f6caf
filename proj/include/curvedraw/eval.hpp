#pragma once

#include <Eigen/Core>
#include <vector>

#include "curvedraw/drawing.hpp"

namespace curvedraw {

struct PRResult {
  double precision = 0.0;
  double recall = 0.0;
  long tp_recon = 0;  // reconstruction samples within tau_prox of GT
  long fp = 0;        // reconstruction samples farther than tau_prox
  long tp_gt = 0;     // GT samples covered by the reconstruction
  long fn = 0;        // GT samples left uncovered
  double tau_prox = 0.0;
};

// Sample-level precision/recall at proximity threshold tau_prox. Distances
// are point-to-polyline on both sides; each GT sample counts once, so
// duplicated reconstructions earn no extra recall. Both sides are
// resampled at sample_spacing before counting. Throws EmptyGroundTruth.
PRResult evaluate(const std::vector<std::vector<Eigen::Vector3d>>& recon,
                  const std::vector<std::vector<Eigen::Vector3d>>& gt,
                  double tau_prox, double sample_spacing);

// Brute-force distance reference for the grid-accelerated evaluate.
PRResult evaluate_brute(const std::vector<std::vector<Eigen::Vector3d>>& recon,
                        const std::vector<std::vector<Eigen::Vector3d>>& gt,
                        double tau_prox, double sample_spacing);

// Link geometries of a drawing as bare polylines.
std::vector<std::vector<Eigen::Vector3d>> graph_polylines(
    const DrawingGraph& graph);

// Bounding-box diagonal of a polyline set (tau_prox defaults scale on it).
double polyline_set_diagonal(
    const std::vector<std::vector<Eigen::Vector3d>>& curves);

}  // namespace curvedraw
