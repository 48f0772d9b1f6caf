#pragma once

#include <Eigen/Core>
#include <map>
#include <vector>

#include "curvedraw/errors.hpp"

namespace curvedraw {

// One oriented edge element. Orientation is the undirected tangent
// direction, kept in [0, pi).
struct Edgel2D {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double orientation = 0.0;
  int view_id = -1;
  int edgel_id = -1;
};

// Ordered polyline of edgels in one view.
struct Curve2D {
  std::vector<Edgel2D> edgels;
  int curve_id = -1;
  int view_id = -1;

  int size() const { return static_cast<int>(edgels.size()); }
  // Unit tangent at edgel i from neighboring positions.
  Eigen::Vector2d tangent_at(int i) const;
  // Interpolated position at fractional index t in [0, size-1].
  Eigen::Vector2d position_at(double t) const;
};

// All curves of one image, with edgel ids assigned contiguously across
// curves so (view_id, edgel_id) addresses a unique edgel.
struct ViewData {
  int view_id = -1;
  int width = 0;
  int height = 0;
  std::vector<Curve2D> curves;

  // Flattened edgel count; also one past the largest edgel_id.
  int edgel_count() const;
  // Reassigns curve view ids and contiguous edgel ids. Call after edits.
  void renumber();
};

// Where an edgel id lives: curve slot and index along that curve.
struct EdgelLocation {
  int curve_index = -1;
  int index_in_curve = -1;
};

// One 3D curve sample with its 2D evidence. support maps view_id to the
// sorted ids of the edgels that supported this sample.
struct Sample3D {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::map<int, std::vector<int>> support;
  double reliability = 1.0;

  void add_support(int view, int edgel);
  bool has_support(int view) const { return support.count(view) != 0; }
};

// Ordered polyline of 3D samples reconstructed from a hypothesis pair.
struct Curve3D {
  std::vector<Sample3D> samples;
  int curve_id = -1;
  int primary_view = -1;
  // Curve id of the generating 2D curve in the primary view (-1 when the
  // curve no longer maps to a single primary curve).
  int primary_curve = -1;

  int size() const { return static_cast<int>(samples.size()); }
};

double arc_length(const Curve3D& curve);
double arc_length(const Curve2D& curve);
double arc_length(const std::vector<Eigen::Vector2d>& polyline);
double arc_length(const std::vector<Eigen::Vector3d>& polyline);

// Resamples at uniform arc-length intervals, preserving both endpoints.
// Support links and reliability are inherited from the nearest original
// sample. Throws SpacingTooLarge when spacing exceeds the arc length.
Curve3D resample_uniform(const Curve3D& curve, double spacing);

std::vector<Eigen::Vector3d> resample_polyline(
    const std::vector<Eigen::Vector3d>& points, double spacing);

// Uniform-grid spatial index over the edgels of a set of views. Queries are
// exact: results match a linear scan. Edgels are copied, so the index does
// not depend on the source views' lifetime.
class EdgelIndex {
 public:
  EdgelIndex() = default;
  explicit EdgelIndex(const std::vector<ViewData>& views, double cell_size);

  bool has_view(int view_id) const;
  // Sorted ids of all edgels within Euclidean distance radius of p.
  std::vector<int> query(int view_id, const Eigen::Vector2d& p,
                         double radius) const;
  const Edgel2D& edgel(int view_id, int edgel_id) const;
  EdgelLocation locate(int view_id, int edgel_id) const;

 private:
  struct ViewGrid {
    std::vector<Edgel2D> edgels;           // by edgel_id
    std::vector<EdgelLocation> locations;  // by edgel_id
    std::vector<std::vector<int>> cells;
    double origin_x = 0, origin_y = 0, cell = 1;
    int nx = 0, ny = 0;
  };
  const ViewGrid& grid_for(int view_id) const;

  std::map<int, ViewGrid> grids_;
};

}  // namespace curvedraw
