#include "curvedraw/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

namespace curvedraw {

Eigen::Vector3d Camera::center() const {
  // Right null vector of P via full SVD of the 3x4 matrix.
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(projection,
                                                    Eigen::ComputeFullV);
  Eigen::Vector4d c = svd.matrixV().col(3);
  if (std::abs(c[3]) < 1e-15) {
    // Camera at infinity; return the direction as-is scaled large.
    return c.head<3>() * 1e15;
  }
  return c.head<3>() / c[3];
}

double point_depth(const Camera& camera, const Eigen::Vector3d& point) {
  return camera.projection.row(2).head<3>().dot(point) +
         camera.projection(2, 3);
}

Eigen::Vector2d project(const Camera& camera, const Eigen::Vector3d& point) {
  const double w = point_depth(camera, point);
  if (w <= kEpsDepth) {
    throw DepthTooSmall("point depth " + std::to_string(w) +
                        " is at or behind the principal plane of view " +
                        std::to_string(camera.view_id));
  }
  const Eigen::Vector3d h =
      camera.projection * point.homogeneous();
  return {h[0] / h[2], h[1] / h[2]};
}

std::optional<Eigen::Vector2d> try_project(const Camera& camera,
                                           const Eigen::Vector3d& point) {
  const double w = point_depth(camera, point);
  if (w <= kEpsDepth) return std::nullopt;
  const Eigen::Vector3d h = camera.projection * point.homogeneous();
  return Eigen::Vector2d{h[0] / h[2], h[1] / h[2]};
}

Eigen::Vector3d epipole_in(const Camera& cam_src, const Camera& cam_dst) {
  return cam_dst.projection * cam_src.center().homogeneous();
}

namespace {

bool cameras_coincide(const Camera& a, const Camera& b) {
  const double na = a.projection.norm();
  const double nb = b.projection.norm();
  if (na == 0.0 || nb == 0.0) return true;
  const Eigen::Matrix<double, 3, 4> pa = a.projection / na;
  const Eigen::Matrix<double, 3, 4> pb = b.projection / nb;
  return std::min((pa - pb).norm(), (pa + pb).norm()) < 1e-12;
}

EpipolarLine normalize_line(Eigen::Vector3d l) {
  const double n = l.head<2>().norm();
  return EpipolarLine{l / n};
}

}  // namespace

Eigen::Matrix3d fundamental_matrix(const Camera& cam_src,
                                   const Camera& cam_dst) {
  if (cameras_coincide(cam_src, cam_dst)) {
    throw DegenerateCameraPair("epipolar geometry undefined: cameras " +
                               std::to_string(cam_src.view_id) + " and " +
                               std::to_string(cam_dst.view_id) +
                               " coincide up to scale");
  }
  const Eigen::Vector3d e = epipole_in(cam_src, cam_dst);
  Eigen::Matrix3d e_cross;
  e_cross << 0, -e[2], e[1], e[2], 0, -e[0], -e[1], e[0], 0;
  const Eigen::Matrix<double, 4, 3> pinv =
      cam_src.projection.completeOrthogonalDecomposition().pseudoInverse();
  return e_cross * (cam_dst.projection * pinv);
}

EpipolarLine epipolar_line_from_f(const Eigen::Matrix3d& f,
                                  const Eigen::Vector3d& epipole_dst,
                                  const Eigen::Vector2d& point_src) {
  Eigen::Vector3d l = f * point_src.homogeneous();
  if (l.head<2>().norm() < 1e-12 * std::max(1.0, l.norm())) {
    // point_src sits on (or at) the epipole; any line through the dst
    // epipole is valid.
    const Eigen::Vector3d& e = epipole_dst;
    Eigen::Vector3d axis = std::abs(e[0]) > std::abs(e[1])
                               ? Eigen::Vector3d(0, 1, 0)
                               : Eigen::Vector3d(1, 0, 0);
    l = e.cross(axis);
    if (l.head<2>().norm() < 1e-12) l = e.cross(Eigen::Vector3d(0, 0, 1));
  }
  return normalize_line(l);
}

EpipolarLine epipolar_line(const Camera& cam_src, const Camera& cam_dst,
                           const Eigen::Vector2d& point_src) {
  return epipolar_line_from_f(fundamental_matrix(cam_src, cam_dst),
                              epipole_in(cam_src, cam_dst), point_src);
}

namespace {

// Direction of the viewing ray through pixel p (finite cameras).
Eigen::Vector3d ray_direction(const Camera& cam, const Eigen::Vector2d& p) {
  const Eigen::Matrix3d m = cam.projection.leftCols<3>();
  return (m.inverse() * p.homogeneous()).normalized();
}

}  // namespace

double triangulation_angle_deg(const Camera& cam1, const Camera& cam2,
                               const Eigen::Vector2d& p1,
                               const Eigen::Vector2d& p2) {
  const Eigen::Vector3d d1 = ray_direction(cam1, p1);
  const Eigen::Vector3d d2 = ray_direction(cam2, p2);
  const double c = std::min(1.0, std::abs(d1.dot(d2)));
  return std::acos(c) * 180.0 / M_PI;
}

Eigen::Vector3d triangulate(const Camera& cam1, const Camera& cam2,
                            const Eigen::Vector2d& p1,
                            const Eigen::Vector2d& p2, double eps_angle_deg) {
  const double angle = triangulation_angle_deg(cam1, cam2, p1, p2);
  if (angle < eps_angle_deg) {
    throw RaysNearParallel("triangulation angle " + std::to_string(angle) +
                           " deg below " + std::to_string(eps_angle_deg));
  }
  Eigen::Matrix4d a;
  a.row(0) = p1[0] * cam1.projection.row(2) - cam1.projection.row(0);
  a.row(1) = p1[1] * cam1.projection.row(2) - cam1.projection.row(1);
  a.row(2) = p2[0] * cam2.projection.row(2) - cam2.projection.row(0);
  a.row(3) = p2[1] * cam2.projection.row(2) - cam2.projection.row(1);
  // Condition the system: unit rows keep the algebraic residual comparable.
  for (int r = 0; r < 4; ++r) {
    const double n = a.row(r).norm();
    if (n > 0) a.row(r) /= n;
  }
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(a, Eigen::ComputeFullV);
  Eigen::Vector4d x = svd.matrixV().col(3);
  if (std::abs(x[3]) < 1e-15) {
    throw RaysNearParallel("triangulated point at infinity");
  }
  return x.head<3>() / x[3];
}

double tangency_weight(const Eigen::Vector2d& curve_tangent,
                       const EpipolarLine& epi_line) {
  const Eigen::Vector2d d = epi_line.direction();
  const double c = curve_tangent.dot(d) / curve_tangent.norm();
  const double s2 = 1.0 - c * c;
  return s2 < 0.0 ? 0.0 : (s2 > 1.0 ? 1.0 : s2);
}

}  // namespace curvedraw
