#include "curvedraw/hypothesis.hpp"

#include <algorithm>
#include <cmath>

#include "curvedraw/parallel.hpp"

namespace curvedraw {

namespace {

// Longest chain over (a, b) candidates with strictly increasing a and
// non-decreasing b. Candidates must be sorted by a. Returns candidate
// indices along the chain.
std::vector<int> longest_monotone_chain(
    const std::vector<std::pair<int, double>>& cand) {
  const int n = static_cast<int>(cand.size());
  if (n == 0) return {};
  std::vector<double> tails;       // minimal last-b per chain length
  std::vector<int> tail_idx;       // candidate achieving that tail
  std::vector<int> parent(n, -1);
  std::vector<int> len_of(n, 0);

  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && cand[j].first == cand[i].first) ++j;
    // Compute lengths for the whole a-group against the current tails,
    // then apply, so a group never chains within itself.
    struct Update {
      int idx;
      int len;
      int par;
    };
    std::vector<Update> updates;
    for (int k = i; k < j; ++k) {
      const double b = cand[k].second;
      // Longest existing chain whose tail is <= b.
      const auto it = std::upper_bound(tails.begin(), tails.end(), b);
      const int len = static_cast<int>(it - tails.begin()) + 1;
      const int par = len >= 2 ? tail_idx[len - 2] : -1;
      updates.push_back({k, len, par});
    }
    for (const auto& u : updates) {
      len_of[u.idx] = u.len;
      parent[u.idx] = u.par;
      const double b = cand[u.idx].second;
      if (u.len - 1 == static_cast<int>(tails.size())) {
        tails.push_back(b);
        tail_idx.push_back(u.idx);
      } else if (b < tails[u.len - 1]) {
        tails[u.len - 1] = b;
        tail_idx[u.len - 1] = u.idx;
      }
    }
    i = j;
  }

  int best = 0;
  for (int k = 1; k < n; ++k) {
    if (len_of[k] > len_of[best]) best = k;
  }
  std::vector<int> chain;
  for (int k = best; k >= 0; k = parent[k]) chain.push_back(k);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

}  // namespace

OverlapResult epipolar_overlap(const Curve2D& c1, const Curve2D& c2,
                               const Camera& cam1, const Camera& cam2) {
  const Eigen::Matrix3d f12 = fundamental_matrix(cam1, cam2);
  const Eigen::Vector3d epi2 = epipole_in(cam1, cam2);
  const int n1 = c1.size();
  const int n2 = c2.size();

  // Signed distances of c2's edgels to each epipolar line are recomputed
  // per line; precompute positions once.
  std::vector<std::pair<int, double>> cand;
  for (int a = 0; a < n1; ++a) {
    const EpipolarLine l =
        epipolar_line_from_f(f12, epi2, c1.edgels[a].position);
    double d_prev = l.signed_distance(c2.edgels[0].position);
    for (int j = 0; j + 1 < n2; ++j) {
      const double d_next = l.signed_distance(c2.edgels[j + 1].position);
      if ((d_prev <= 0.0 && d_next > 0.0) || (d_prev >= 0.0 && d_next < 0.0) ||
          d_prev == 0.0) {
        const double denom = d_prev - d_next;
        const double t = std::abs(denom) > 1e-15 ? d_prev / denom : 0.0;
        if (t >= 0.0 && t <= 1.0) {
          cand.emplace_back(a, j + t);
        }
      }
      d_prev = d_next;
    }
  }

  OverlapResult out;
  if (cand.empty()) return out;

  const std::vector<int> forward = longest_monotone_chain(cand);
  // Reversed c2 direction: rerun against mirrored indices.
  std::vector<std::pair<int, double>> mirrored = cand;
  for (auto& m : mirrored) m.second = (n2 - 1) - m.second;
  const std::vector<int> backward = longest_monotone_chain(mirrored);

  const bool reversed = backward.size() > forward.size();
  const std::vector<int>& chain = reversed ? backward : forward;
  out.curve2_reversed = reversed;
  out.correspondence.reserve(chain.size());
  for (int idx : chain) {
    out.correspondence.push_back(reversed ? mirrored[idx] : cand[idx]);
  }
  out.overlap_fraction = static_cast<double>(chain.size()) / n1;
  return out;
}

std::vector<CurvePairHypothesis> generate_hypotheses(
    const ViewData& view1, const ViewData& view2, const Camera& cam1,
    const Camera& cam2, const Params& params) {
  const Eigen::Matrix3d f12 = fundamental_matrix(cam1, cam2);
  const Eigen::Matrix3d f21 = fundamental_matrix(cam2, cam1);
  const Eigen::Vector3d epi2 = epipole_in(cam1, cam2);
  const Eigen::Vector3d epi1 = epipole_in(cam2, cam1);

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(view1.curves.size()); ++i) {
    if (view1.curves[i].size() < params.min_curve_edgels) continue;
    for (int j = 0; j < static_cast<int>(view2.curves.size()); ++j) {
      if (view2.curves[j].size() < params.min_curve_edgels) continue;
      pairs.emplace_back(i, j);
    }
  }

  std::vector<CurvePairHypothesis> slots(pairs.size());
  std::vector<char> keep(pairs.size(), 0);
  parallel_for(static_cast<std::int64_t>(pairs.size()), [&](std::int64_t k) {
    const Curve2D& c1 = view1.curves[pairs[k].first];
    const Curve2D& c2 = view2.curves[pairs[k].second];
    OverlapResult overlap = epipolar_overlap(c1, c2, cam1, cam2);
    if (overlap.overlap_fraction < params.tau_overlap) return;

    CurvePairHypothesis hyp;
    hyp.view1 = view1.view_id;
    hyp.view2 = view2.view_id;
    hyp.curve1_id = c1.curve_id;
    hyp.curve2_id = c2.curve_id;
    hyp.curve2_reversed = overlap.curve2_reversed;
    hyp.overlap_fraction = overlap.overlap_fraction;
    hyp.reconstruction.primary_view = view1.view_id;
    hyp.reconstruction.primary_curve = c1.curve_id;

    const int n2 = c2.size();
    for (const auto& [a, b_stored] : overlap.correspondence) {
      const double b = overlap.curve2_reversed ? (n2 - 1) - b_stored : b_stored;
      const Eigen::Vector2d p1 = c1.edgels[a].position;
      const Eigen::Vector2d p2 = c2.position_at(b);
      Eigen::Vector3d x;
      try {
        x = triangulate(cam1, cam2, p1, p2, params.eps_angle_deg);
      } catch (const RaysNearParallel&) {
        continue;
      }
      if (point_depth(cam1, x) <= params.eps_depth ||
          point_depth(cam2, x) <= params.eps_depth) {
        continue;
      }

      // Reliability from the epipolar tangency in both hypothesis views.
      const int bi = std::clamp(static_cast<int>(std::lround(b)), 0, n2 - 1);
      const double w2 = tangency_weight(
          c2.tangent_at(bi), epipolar_line_from_f(f12, epi2, p1));
      const double w1 = tangency_weight(
          c1.tangent_at(a), epipolar_line_from_f(f21, epi1, p2));

      Sample3D sample;
      sample.position = x;
      sample.reliability = std::min(w1, w2);
      sample.add_support(view1.view_id, c1.edgels[a].edgel_id);
      sample.add_support(view2.view_id, c2.edgels[bi].edgel_id);
      if (!hyp.reconstruction.samples.empty() &&
          (hyp.reconstruction.samples.back().position - x).norm() < 1e-12) {
        continue;
      }
      hyp.reconstruction.samples.push_back(std::move(sample));
      hyp.correspondence.emplace_back(a, b_stored);
    }

    if (hyp.reconstruction.size() >= 2) {
      slots[k] = std::move(hyp);
      keep[k] = 1;
    }
  });

  std::vector<CurvePairHypothesis> out;
  for (size_t k = 0; k < slots.size(); ++k) {
    if (keep[k]) out.push_back(std::move(slots[k]));
  }
  return out;
}

std::vector<std::pair<int, int>> enumerate_view_pairs(
    int n_views, const std::string& strategy, int window) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n_views; ++i) {
    for (int j = i + 1; j < n_views; ++j) {
      if (strategy == "window" && j - i > window) continue;
      pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

std::vector<CurvePairHypothesis> generate_all_hypotheses(
    const std::vector<ViewData>& views, const std::vector<Camera>& cameras,
    const Params& params) {
  const auto schedule = enumerate_view_pairs(
      static_cast<int>(views.size()), params.pair_strategy, params.pair_window);

  std::vector<std::vector<CurvePairHypothesis>> per_pair(schedule.size());
  // Curve pairs inside each view pair already run in parallel; the outer
  // loop stays serial to keep slot writes simple.
  for (size_t k = 0; k < schedule.size(); ++k) {
    const auto [v1, v2] = schedule[k];
    per_pair[k] = generate_hypotheses(views[v1], views[v2], cameras[v1],
                                      cameras[v2], params);
  }

  std::vector<CurvePairHypothesis> out;
  for (auto& batch : per_pair) {
    for (auto& h : batch) out.push_back(std::move(h));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.view1, a.view2, a.curve1_id, a.curve2_id) <
           std::tie(b.view1, b.view2, b.curve1_id, b.curve2_id);
  });
  for (size_t i = 0; i < out.size(); ++i) {
    out[i].reconstruction.curve_id = static_cast<int>(i);
  }
  return out;
}

}  // namespace curvedraw
