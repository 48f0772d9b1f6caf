#pragma once

#include <map>
#include <utility>
#include <vector>

#include "curvedraw/config.hpp"
#include "curvedraw/curve_model.hpp"

namespace curvedraw {

// Samples bucketed by the primary-view edgel they correspond to.
using PrimaryEdgeBuckets =
    std::map<std::pair<int, int>, std::vector<Sample3D>>;

// Groups every sample of every curve by (primary_view, primary edgel id).
// Throws MissingPrimarySupport when a sample lacks its primary-view link.
PrimaryEdgeBuckets group_by_primary_edge(const std::vector<Curve3D>& curves);

// Outlier-rejecting average: a Gaussian is fit to the pairwise distance
// population and members whose mean distance to the others exceeds the
// 2-sigma bound are discarded before taking the centroid. Buckets of one
// or two points reduce to the plain centroid.
Eigen::Vector3d robust_average(const std::vector<Eigen::Vector3d>& bucket);

// Reconciles redundant reconstructions sharing a primary 2D curve: buckets
// are robust-averaged and surviving coverage is stitched back into curves
// ordered by primary-view edgel order, elongating partial reconstructions
// into single curves. Needs the edgel index to order edgels along their
// primary curve.
std::vector<Curve3D> fuse_redundant(const std::vector<Curve3D>& curves,
                                    const EdgelIndex& index,
                                    const Params& params);

}  // namespace curvedraw
