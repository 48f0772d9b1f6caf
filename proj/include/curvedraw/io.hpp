#pragma once

#include <string>
#include <vector>

#include "curvedraw/curve_model.hpp"
#include "curvedraw/drawing.hpp"
#include "curvedraw/geometry.hpp"

namespace curvedraw {

// Camera files: 3 rows x 4 whitespace-separated decimals per camera.
// Multi-camera files separate blocks with "# view <id>" headers; a file
// without headers holds a single camera.
std::vector<Camera> load_cameras(const std::string& path);
Camera load_camera(const std::string& path, int view_id);
void save_cameras(const std::vector<Camera>& cameras, const std::string& path);

// Curve-fragment file, one per view:
//   view <id> <width> <height>
//   curve <id> <n>
//   x y theta            (n edgel lines, theta in [0, pi))
ViewData load_fragments(const std::string& path);
void save_fragments(const ViewData& view, const std::string& path);

// 3D curve checkpoint format:
//   curves3d <count>
//   curve <id> <primary_view> <primary_curve> <n>
//   x y z reliability k v1 e1 v2 e2 ...   (k support pairs)
std::vector<Curve3D> load_curves3d(const std::string& path);
void save_curves3d(const std::vector<Curve3D>& curves, const std::string& path);

// Ground-truth / plain polyline sets:
//   polylines <count>
//   curve <id> <n>
//   x y z
std::vector<std::vector<Eigen::Vector3d>> load_polylines(
    const std::string& path);
void save_polylines(const std::vector<std::vector<Eigen::Vector3d>>& curves,
                    const std::string& path);

// Drawing graph:
//   drawing <n_nodes> <n_links>
//   node <id> <x> <y> <z> <degree> <cluster>
//   link <id> <node_a> <node_b> <cluster> <n>
//   x y z                (n sample lines)
DrawingGraph load_drawing(const std::string& path);
void save_drawing(const DrawingGraph& graph, const std::string& path);

// ASCII PLY with per-link colored polyline edges and junction nodes as
// white marker vertices.
void export_ply(const DrawingGraph& graph, const std::string& path);

// Reconstruction loader for evaluation: accepts drawing, curves3d and
// polylines files (dispatch on the header token).
std::vector<std::vector<Eigen::Vector3d>> load_any_curves(
    const std::string& path);

}  // namespace curvedraw
