#include "curvedraw/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvedraw/parallel.hpp"

namespace curvedraw {

namespace {

double orientation_gap(double theta_a, double theta_b) {
  double d = std::fmod(std::abs(theta_a - theta_b), M_PI);
  return std::min(d, M_PI - d);
}

}  // namespace

EdgeSupport edge_support(const Eigen::Vector2d& sample_reproj,
                         const Eigen::Vector2d& sample_tangent, int view_id,
                         const EdgelIndex& index, double delta_d,
                         double delta_theta_rad) {
  EdgeSupport out;
  const double theta_t = std::atan2(sample_tangent.y(), sample_tangent.x());
  for (int id : index.query(view_id, sample_reproj, delta_d)) {
    if (orientation_gap(index.edgel(view_id, id).orientation, theta_t) <=
        delta_theta_rad) {
      out.edgel_ids.push_back(id);
    }
  }
  out.phi = out.edgel_ids.empty() ? 0.0 : 1.0;
  return out;
}

ViewSupportEntry view_support(const CurvePairHypothesis& hyp, int view_id,
                              const std::vector<Camera>& cameras,
                              const EdgelIndex& index, const Params& params) {
  const Curve3D& curve = hyp.reconstruction;
  const int n = curve.size();
  ViewSupportEntry entry;
  entry.view_id = view_id;
  entry.values.assign(n, 0.0);
  entry.tangency.assign(n, 0.0);
  entry.supported.assign(n, 0);
  entry.nearest_edgel.assign(n, -1);

  const Camera& cam = cameras[view_id];
  const Camera& cam_primary = cameras[hyp.view1];
  const Eigen::Matrix3d f = fundamental_matrix(cam_primary, cam);
  const Eigen::Vector3d epi = epipole_in(cam_primary, cam);
  const double delta_theta = params.delta_theta_deg * M_PI / 180.0;

  std::vector<std::optional<Eigen::Vector2d>> reproj(n);
  for (int i = 0; i < n; ++i) {
    reproj[i] = try_project(cam, curve.samples[i].position);
  }

  for (int i = 0; i < n; ++i) {
    if (!reproj[i]) continue;  // depth failure: contributes 0, stays flagged
    // Tangent of the reprojected curve from the nearest valid neighbors.
    int a = i, b = i;
    if (i > 0 && reproj[i - 1]) a = i - 1;
    if (i + 1 < n && reproj[i + 1]) b = i + 1;
    if (a == b) continue;
    Eigen::Vector2d tangent = *reproj[b] - *reproj[a];
    const double len = tangent.norm();
    if (len < 1e-12) continue;
    tangent /= len;

    const EdgeSupport sup = edge_support(*reproj[i], tangent, view_id, index,
                                         params.delta_d, delta_theta);
    // Epipolar line induced by the primary-view evidence of this sample.
    const auto primary_it = curve.samples[i].support.find(hyp.view1);
    Eigen::Vector2d primary_px;
    if (primary_it != curve.samples[i].support.end() &&
        !primary_it->second.empty()) {
      primary_px = index.edgel(hyp.view1, primary_it->second.front()).position;
    } else {
      const auto p = try_project(cam_primary, curve.samples[i].position);
      if (!p) continue;
      primary_px = *p;
    }
    const double w =
        tangency_weight(tangent, epipolar_line_from_f(f, epi, primary_px));
    entry.tangency[i] = w;
    entry.supported[i] = sup.phi > 0.0 ? 1 : 0;
    entry.values[i] = sup.phi * w;
    if (!sup.edgel_ids.empty()) {
      double best = std::numeric_limits<double>::max();
      for (int id : sup.edgel_ids) {
        const double d2 =
            (index.edgel(view_id, id).position - *reproj[i]).squaredNorm();
        if (d2 < best) {
          best = d2;
          entry.nearest_edgel[i] = id;
        }
      }
    }
  }

  // Trapezoidal Eq-1 integral over the reprojected arc length.
  double total = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    if (!reproj[i] || !reproj[i + 1]) continue;
    const double ds = (*reproj[i + 1] - *reproj[i]).norm();
    total += 0.5 * (entry.values[i] + entry.values[i + 1]) * ds;
  }
  entry.total = total;
  return entry;
}

SupportProfile support_profile(const CurvePairHypothesis& hyp,
                               const std::vector<Camera>& cameras,
                               const EdgelIndex& index, const Params& params) {
  const int n = hyp.reconstruction.size();
  SupportProfile profile;
  profile.view_count.assign(n, 0);
  profile.reliability.resize(n);
  for (int i = 0; i < n; ++i) {
    profile.reliability[i] = hyp.reconstruction.samples[i].reliability;
  }

  for (const Camera& cam : cameras) {
    if (cam.view_id == hyp.view1 || cam.view_id == hyp.view2) continue;
    if (!index.has_view(cam.view_id)) continue;
    profile.views.push_back(view_support(hyp, cam.view_id, cameras, index,
                                         params));
  }

  for (const auto& entry : profile.views) {
    const bool supporting_view = entry.total > params.tau_v;
    for (int i = 0; i < n; ++i) {
      profile.reliability[i] = std::min(profile.reliability[i],
                                        entry.tangency[i]);
      if (supporting_view && entry.supported[i] &&
          entry.tangency[i] >= params.reliability_floor) {
        ++profile.view_count[i];
      }
    }
  }
  return profile;
}

double aggregate_support(const SupportProfile& profile, double tau_v) {
  double sum = 0.0;
  for (const auto& entry : profile.views) {
    if (entry.total > tau_v) sum += entry.total;
  }
  return sum;
}

std::vector<Curve3D> localize_supported_portions(const CurvePairHypothesis& hyp,
                                                 const SupportProfile& profile,
                                                 const Params& params) {
  const Curve3D& curve = hyp.reconstruction;
  const int n = curve.size();
  std::vector<char> qualified(n, 0), connective(n, 0);
  for (int i = 0; i < n; ++i) {
    qualified[i] = profile.view_count[i] >= params.n_min_views;
    // Near-tangency samples bridge qualified runs: topologically correct,
    // geometrically unreliable.
    connective[i] =
        qualified[i] || profile.reliability[i] < params.reliability_floor;
  }

  std::vector<Curve3D> out;
  int i = 0;
  while (i < n) {
    if (!connective[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && connective[j]) ++j;
    // Trim the run to its qualified core.
    int a = i, b = j - 1;
    while (a <= b && !qualified[a]) ++a;
    while (b >= a && !qualified[b]) --b;
    if (a <= b && b - a + 1 >= params.min_run) {
      Curve3D piece;
      piece.primary_view = curve.primary_view;
      piece.primary_curve = curve.primary_curve;
      for (int k = a; k <= b; ++k) {
        Sample3D s = curve.samples[k];
        s.reliability = profile.reliability[k];
        for (const auto& entry : profile.views) {
          if (entry.nearest_edgel[k] >= 0) {
            s.add_support(entry.view_id, entry.nearest_edgel[k]);
          }
        }
        piece.samples.push_back(std::move(s));
      }
      out.push_back(std::move(piece));
    }
    i = j;
  }
  return out;
}

namespace {

std::vector<Curve3D> collect_verified(
    std::vector<std::vector<Curve3D>>& per_hyp) {
  std::vector<Curve3D> out;
  for (auto& batch : per_hyp) {
    for (auto& c : batch) {
      c.curve_id = static_cast<int>(out.size());
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace

std::vector<Curve3D> verify_all(const std::vector<CurvePairHypothesis>& hyps,
                                const std::vector<Camera>& cameras,
                                const EdgelIndex& index, const Params& params) {
  std::vector<std::vector<Curve3D>> per_hyp(hyps.size());
  parallel_for(static_cast<std::int64_t>(hyps.size()), [&](std::int64_t k) {
    const SupportProfile profile =
        support_profile(hyps[k], cameras, index, params);
    if (params.tau_v > 0.0 && aggregate_support(profile, params.tau_v) <= 0.0) {
      return;
    }
    per_hyp[k] = localize_supported_portions(hyps[k], profile, params);
  });
  return collect_verified(per_hyp);
}

std::vector<Curve3D> verify_all_serial(
    const std::vector<CurvePairHypothesis>& hyps,
    const std::vector<Camera>& cameras, const EdgelIndex& index,
    const Params& params) {
  std::vector<std::vector<Curve3D>> per_hyp(hyps.size());
  for (size_t k = 0; k < hyps.size(); ++k) {
    const SupportProfile profile =
        support_profile(hyps[k], cameras, index, params);
    if (params.tau_v > 0.0 && aggregate_support(profile, params.tau_v) <= 0.0) {
      continue;
    }
    per_hyp[k] = localize_supported_portions(hyps[k], profile, params);
  }
  return collect_verified(per_hyp);
}

}  // namespace curvedraw
