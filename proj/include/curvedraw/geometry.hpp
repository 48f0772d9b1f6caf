#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "curvedraw/errors.hpp"

namespace curvedraw {

// Depth below this is treated as "on the principal plane" and rejected.
inline constexpr double kEpsDepth = 1e-8;
// Triangulation rays closer than this angle (degrees) are degenerate.
inline constexpr double kEpsAngleDeg = 0.5;

// Finite projective camera, stored as the raw 3x4 world-to-pixel mapping.
struct Camera {
  Eigen::Matrix<double, 3, 4> projection = Eigen::Matrix<double, 3, 4>::Zero();
  int view_id = -1;

  // Camera center (right null vector of the projection, dehomogenized).
  Eigen::Vector3d center() const;
};

// Homogeneous 2D line a*x + b*y + c = 0 with a^2 + b^2 = 1.
struct EpipolarLine {
  Eigen::Vector3d coefficients = Eigen::Vector3d::Zero();

  double signed_distance(const Eigen::Vector2d& p) const {
    return coefficients[0] * p[0] + coefficients[1] * p[1] + coefficients[2];
  }
  Eigen::Vector2d direction() const {
    return {-coefficients[1], coefficients[0]};
  }
};

// Pixel coordinates of a 3D point. Throws DepthTooSmall at or behind the
// principal plane.
Eigen::Vector2d project(const Camera& camera, const Eigen::Vector3d& point);

// Non-throwing variant for hot loops; empty when the depth gate fails.
std::optional<Eigen::Vector2d> try_project(const Camera& camera,
                                           const Eigen::Vector3d& point);

// Depth of a point w.r.t. the camera (third homogeneous coordinate).
double point_depth(const Camera& camera, const Eigen::Vector3d& point);

// Epipole of cam_src in cam_dst's image (projection of cam_src's center).
Eigen::Vector3d epipole_in(const Camera& cam_src, const Camera& cam_dst);

// Line in cam_dst traced by the viewing ray of point_src in cam_src.
EpipolarLine epipolar_line(const Camera& cam_src, const Camera& cam_dst,
                           const Eigen::Vector2d& point_src);

// Fundamental matrix mapping src pixels to dst epipolar lines
// (l_dst = F * x_src). Throws DegenerateCameraPair for coincident cameras.
Eigen::Matrix3d fundamental_matrix(const Camera& cam_src, const Camera& cam_dst);

// Epipolar line from a precomputed fundamental matrix, with the same
// epipole-degenerate fallback as epipolar_line.
EpipolarLine epipolar_line_from_f(const Eigen::Matrix3d& f,
                                  const Eigen::Vector3d& epipole_dst,
                                  const Eigen::Vector2d& point_src);

// DLT least-squares two-view triangulation.
Eigen::Vector3d triangulate(const Camera& cam1, const Camera& cam2,
                            const Eigen::Vector2d& p1,
                            const Eigen::Vector2d& p2,
                            double eps_angle_deg = kEpsAngleDeg);

// Angle (degrees) between the two back-projected viewing rays.
double triangulation_angle_deg(const Camera& cam1, const Camera& cam2,
                               const Eigen::Vector2d& p1,
                               const Eigen::Vector2d& p2);

// sin^2 of the angle between a unit curve tangent and an epipolar line:
// 0 at epipolar tangency, 1 when the curve crosses the line perpendicularly.
double tangency_weight(const Eigen::Vector2d& curve_tangent,
                       const EpipolarLine& epi_line);

}  // namespace curvedraw
