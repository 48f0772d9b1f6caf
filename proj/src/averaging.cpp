#include "curvedraw/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curvedraw {

namespace {

int primary_edgel_of(const Sample3D& sample, int primary_view) {
  const auto it = sample.support.find(primary_view);
  if (it == sample.support.end() || it->second.empty()) {
    throw MissingPrimarySupport(
        "sample lacks an edgel link in its primary view " +
        std::to_string(primary_view));
  }
  return it->second.front();
}

Eigen::Vector3d centroid(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

}  // namespace

PrimaryEdgeBuckets group_by_primary_edge(const std::vector<Curve3D>& curves) {
  PrimaryEdgeBuckets buckets;
  for (const auto& curve : curves) {
    for (const auto& sample : curve.samples) {
      const int edgel = primary_edgel_of(sample, curve.primary_view);
      buckets[{curve.primary_view, edgel}].push_back(sample);
    }
  }
  return buckets;
}

Eigen::Vector3d robust_average(const std::vector<Eigen::Vector3d>& bucket) {
  const int n = static_cast<int>(bucket.size());
  if (n == 0) return Eigen::Vector3d::Zero();
  if (n <= 2) return centroid(bucket);

  // Mean pairwise distance per member, and the population mean.
  std::vector<double> mean_dist(n, 0.0);
  double mu = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = (bucket[i] - bucket[j]).norm();
      mean_dist[i] += d;
      mean_dist[j] += d;
      mu += d;
    }
  }
  mu /= n * (n - 1) / 2.0;
  for (double& m : mean_dist) m /= (n - 1);

  double var = 0.0;
  for (double m : mean_dist) var += (m - mu) * (m - mu);
  const double sigma = std::sqrt(var / n);
  if (sigma == 0.0) return centroid(bucket);

  std::vector<Eigen::Vector3d> survivors;
  for (int i = 0; i < n; ++i) {
    if (mean_dist[i] <= mu + 2.0 * sigma) survivors.push_back(bucket[i]);
  }
  if (survivors.empty()) return centroid(bucket);
  return centroid(survivors);
}

std::vector<Curve3D> fuse_redundant(const std::vector<Curve3D>& curves,
                                    const EdgelIndex& index,
                                    const Params& params) {
  // Group curves by their generating primary 2D curve.
  std::map<std::pair<int, int>, std::vector<const Curve3D*>> groups;
  for (const auto& curve : curves) {
    groups[{curve.primary_view, curve.primary_curve}].push_back(&curve);
  }

  std::vector<Curve3D> out;
  for (const auto& [key, members] : groups) {
    const auto [view, primary_curve] = key;
    // Buckets keyed by the edgel's index along the primary curve, so
    // coverage from different hypothesis pairs stitches in 2D order.
    std::map<int, std::vector<const Sample3D*>> buckets;
    for (const Curve3D* curve : members) {
      for (const auto& sample : curve->samples) {
        const int edgel = primary_edgel_of(sample, view);
        buckets[index.locate(view, edgel).index_in_curve].push_back(&sample);
      }
    }
    if (buckets.empty()) continue;

    // Robust-average each bucket, merging support links.
    std::map<int, Sample3D> fused;
    for (const auto& [pos, samples] : buckets) {
      std::vector<Eigen::Vector3d> pts;
      pts.reserve(samples.size());
      for (const auto* s : samples) pts.push_back(s->position);
      Sample3D merged;
      merged.position = robust_average(pts);
      merged.reliability = 0.0;
      for (const auto* s : samples) {
        merged.reliability = std::max(merged.reliability, s->reliability);
        for (const auto& [v, ids] : s->support) {
          for (int id : ids) merged.add_support(v, id);
        }
      }
      fused.emplace(pos, std::move(merged));
    }

    // Contiguous coverage runs become output curves; holes wider than
    // bucket_gap split them.
    Curve3D current;
    current.primary_view = view;
    current.primary_curve = primary_curve;
    int prev_pos = std::numeric_limits<int>::min();
    auto flush = [&]() {
      if (current.size() >= 2) {
        current.curve_id = static_cast<int>(out.size());
        out.push_back(std::move(current));
      }
      current = Curve3D{};
      current.primary_view = view;
      current.primary_curve = primary_curve;
    };
    for (auto& [pos, sample] : fused) {
      if (prev_pos != std::numeric_limits<int>::min() &&
          pos - prev_pos > params.bucket_gap + 1) {
        flush();
      }
      if (!current.samples.empty() &&
          (current.samples.back().position - sample.position).norm() < 1e-12) {
        prev_pos = pos;
        continue;
      }
      current.samples.push_back(std::move(sample));
      prev_pos = pos;
    }
    flush();
  }
  return out;
}

}  // namespace curvedraw
