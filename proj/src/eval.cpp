#include "curvedraw/eval.hpp"

#include <algorithm>
#include <cmath>

#include "curvedraw/parallel.hpp"
#include "curvedraw/synth.hpp"

namespace curvedraw {

namespace {

std::vector<Eigen::Vector3d> sample_set(
    const std::vector<std::vector<Eigen::Vector3d>>& curves, double spacing) {
  return ground_truth_samples(curves, spacing);
}

double min_distance_brute(const std::vector<std::vector<Eigen::Vector3d>>& set,
                          const Eigen::Vector3d& p) {
  double best = std::numeric_limits<double>::max();
  for (const auto& poly : set) {
    if (poly.size() < 2) continue;
    const ClosestPoint cp = closest_point_brute(poly, p);
    best = std::min(best, cp.distance);
  }
  return best;
}

long count_within(const std::vector<Eigen::Vector3d>& samples,
                  const std::vector<std::vector<Eigen::Vector3d>>& target,
                  double tau, bool use_grid) {
  std::vector<PolylineGrid> grids;
  if (use_grid) {
    grids.reserve(target.size());
    for (const auto& poly : target) {
      grids.emplace_back(poly, default_grid_cell(poly));
    }
  }
  std::vector<char> hit(samples.size(), 0);
  parallel_for(static_cast<std::int64_t>(samples.size()), [&](std::int64_t i) {
    double best = std::numeric_limits<double>::max();
    if (use_grid) {
      for (size_t t = 0; t < target.size(); ++t) {
        if (target[t].size() < 2) continue;
        const ClosestPoint cp = grids[t].query(samples[i]);
        best = std::min(best, cp.distance);
      }
    } else {
      best = min_distance_brute(target, samples[i]);
    }
    hit[i] = best <= tau ? 1 : 0;
  });
  long n = 0;
  for (char h : hit) n += h;
  return n;
}

PRResult evaluate_impl(const std::vector<std::vector<Eigen::Vector3d>>& recon,
                       const std::vector<std::vector<Eigen::Vector3d>>& gt,
                       double tau_prox, double spacing, bool use_grid) {
  bool gt_has_curve = false;
  for (const auto& c : gt) gt_has_curve |= c.size() >= 2;
  if (!gt_has_curve) {
    throw EmptyGroundTruth("evaluation requires ground-truth curves");
  }

  const std::vector<Eigen::Vector3d> recon_samples = sample_set(recon, spacing);
  const std::vector<Eigen::Vector3d> gt_samples = sample_set(gt, spacing);

  PRResult r;
  r.tau_prox = tau_prox;
  r.tp_recon = count_within(recon_samples, gt, tau_prox, use_grid);
  r.fp = static_cast<long>(recon_samples.size()) - r.tp_recon;
  r.tp_gt = count_within(gt_samples, recon, tau_prox, use_grid);
  r.fn = static_cast<long>(gt_samples.size()) - r.tp_gt;
  r.precision = recon_samples.empty()
                    ? 0.0
                    : static_cast<double>(r.tp_recon) / recon_samples.size();
  r.recall = gt_samples.empty()
                 ? 0.0
                 : static_cast<double>(r.tp_gt) / gt_samples.size();
  return r;
}

}  // namespace

PRResult evaluate(const std::vector<std::vector<Eigen::Vector3d>>& recon,
                  const std::vector<std::vector<Eigen::Vector3d>>& gt,
                  double tau_prox, double sample_spacing) {
  return evaluate_impl(recon, gt, tau_prox, sample_spacing, true);
}

PRResult evaluate_brute(const std::vector<std::vector<Eigen::Vector3d>>& recon,
                        const std::vector<std::vector<Eigen::Vector3d>>& gt,
                        double tau_prox, double sample_spacing) {
  return evaluate_impl(recon, gt, tau_prox, sample_spacing, false);
}

std::vector<std::vector<Eigen::Vector3d>> graph_polylines(
    const DrawingGraph& graph) {
  std::vector<std::vector<Eigen::Vector3d>> out;
  out.reserve(graph.links.size());
  for (const auto& link : graph.links) out.push_back(link.samples);
  return out;
}

double polyline_set_diagonal(
    const std::vector<std::vector<Eigen::Vector3d>>& curves) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e300);
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(-1e300);
  bool any = false;
  for (const auto& c : curves) {
    for (const auto& p : c) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
      any = true;
    }
  }
  return any ? (hi - lo).norm() : 0.0;
}

}  // namespace curvedraw
