#pragma once

#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "curvedraw/config.hpp"
#include "curvedraw/consistency.hpp"
#include "curvedraw/curve_model.hpp"

namespace curvedraw {

// ---------------------------------------------------------------------------
// Closest-point machinery shared by evolution, masks and merging.

struct ClosestPoint {
  double distance = std::numeric_limits<double>::max();
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  int segment = -1;   // index of the polyline segment realizing the minimum
  double t = 0.0;     // clamped parameter along that segment
  // The minimizer is the curve's first/last vertex with the unclamped
  // parameter falling outside the segment: the query point overhangs.
  bool clamped = false;
};

// Brute-force closest point on a polyline; ties resolve to the lowest
// segment index. Serial reference for PolylineGrid.
ClosestPoint closest_point_brute(const std::vector<Eigen::Vector3d>& poly,
                                 const Eigen::Vector3d& p);

// Grid resolution matched to the polyline's sampling density.
double default_grid_cell(const std::vector<Eigen::Vector3d>& poly);

// Uniform-grid accelerated closest point; exact (matches the brute force).
class PolylineGrid {
 public:
  PolylineGrid() = default;
  PolylineGrid(const std::vector<Eigen::Vector3d>& poly, double cell);
  ClosestPoint query(const Eigen::Vector3d& p) const;

 private:
  const std::vector<Eigen::Vector3d>* poly_ = nullptr;
  double cell_ = 1.0;
  double max_seg_ = 0.0;
  Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<std::vector<int>> cells_;  // vertex indices per cell

  void gather(const Eigen::Vector3d& p, double radius,
              std::vector<int>& segs) const;
};

// ---------------------------------------------------------------------------
// Iterative closest-point averaging over an MCCN cluster (synchronous
// update; curves move to the average of their linked closest points).

struct ClusterAdjacency {
  // Neighbor curve slots per curve slot, sorted; slots address the curves
  // vector passed to evolve_cluster.
  std::vector<std::vector<int>> neighbors;
};

struct EvolveResult {
  std::vector<Curve3D> curves;
  bool converged = false;
  int iterations = 0;
};

EvolveResult evolve_cluster(const std::vector<Curve3D>& curves,
                            const ClusterAdjacency& adjacency, double alpha,
                            int max_iters, double tol);

// Serial reference using brute-force closest points; results are identical.
EvolveResult evolve_cluster_serial(const std::vector<Curve3D>& curves,
                                   const ClusterAdjacency& adjacency,
                                   double alpha, int max_iters, double tol);

// ---------------------------------------------------------------------------
// Overlap masks and merging primitives.

// mask[(i,j)][s] is true when sample s of curve i lies within d_merge of
// linked curve j. True runs shorter than 3 samples are eroded.
using OverlapMasks = std::map<std::pair<int, int>, std::vector<char>>;

OverlapMasks compute_overlap_masks(const std::vector<Curve3D>& curves,
                                   const ClusterAdjacency& adjacency,
                                   double d_merge);

enum class MergePrimitive {
  HeadOverlap,        // end of i on an end of j
  TailOverlap,
  EndInterior,        // end of one curve on the interior of the other
  InteriorInterior,   // interior-interior (full overlap degenerates here)
  Bridge,             // two overlap runs joined by a novel span
  MultiAttach         // one end meeting several existing curves
};

// Decomposes the pairwise interaction into primitives by scanning the
// maximal true runs of mask_i.
std::vector<MergePrimitive> classify_merge_primitive(
    const std::vector<char>& mask_i, const std::vector<char>& mask_j);

// ---------------------------------------------------------------------------
// Drawing graph.

struct DrawingNode {
  int id = -1;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  int degree = 0;
  int cluster_id = -1;
};

struct DrawingLink {
  int id = -1;
  int node_a = -1;
  int node_b = -1;
  std::vector<Eigen::Vector3d> samples;
  int cluster_id = -1;
};

struct DrawingGraph {
  std::vector<DrawingNode> nodes;
  std::vector<DrawingLink> links;

  double total_arc_length() const;
  int junction_count() const;
  // Checks degree bookkeeping, endpoint/junction degrees and that link
  // geometries start/end at their nodes. Throws std::logic_error.
  void validate() const;
};

// Incremental merge of one converged cluster, longest curve first.
DrawingGraph merge_cluster(const std::vector<Curve3D>& curves,
                           const OverlapMasks& masks, double d_merge,
                           double snap_dist);

// Full drawing over all clusters: per-cluster evolution + merge, endpoint
// coalescing across clusters, degree-2 splicing, deterministic numbering.
DrawingGraph build_drawing(const std::vector<Curve3D>& curves,
                           const MCCN& mccn, const Params& params,
                           double sample_spacing);

// Endpoint nodes within snap_dist are fused (junctions arise where three
// or more links meet); chains meeting at degree-2 nodes are spliced.
void coalesce_endpoints(DrawingGraph& graph, double snap_dist);

}  // namespace curvedraw
