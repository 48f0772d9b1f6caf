#include "curvedraw/drawing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "curvedraw/parallel.hpp"

namespace curvedraw {

// ---------------------------------------------------------------------------
// Closest point

namespace {

struct SegmentHit {
  double dist2 = std::numeric_limits<double>::max();
  double t = 0.0;
  double t_unclamped = 0.0;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
};

SegmentHit segment_closest(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                           const Eigen::Vector3d& p) {
  SegmentHit hit;
  const Eigen::Vector3d d = b - a;
  const double l2 = d.squaredNorm();
  hit.t_unclamped = l2 > 0.0 ? (p - a).dot(d) / l2 : 0.0;
  hit.t = std::clamp(hit.t_unclamped, 0.0, 1.0);
  hit.point = a + hit.t * d;
  hit.dist2 = (p - hit.point).squaredNorm();
  return hit;
}

ClosestPoint evaluate_segments(const std::vector<Eigen::Vector3d>& poly,
                               const Eigen::Vector3d& p,
                               const std::vector<int>& segments) {
  ClosestPoint best;
  double best_unclamped = 0.0;
  for (int k : segments) {
    const SegmentHit hit = segment_closest(poly[k], poly[k + 1], p);
    if (hit.dist2 < best.distance) {
      best.distance = hit.dist2;
      best.segment = k;
      best.t = hit.t;
      best.point = hit.point;
      best_unclamped = hit.t_unclamped;
    }
  }
  if (best.segment >= 0) {
    best.distance = std::sqrt(best.distance);
    const int last = static_cast<int>(poly.size()) - 2;
    if (best.segment == 0 && best.t == 0.0 && best_unclamped < -1e-12) {
      best.clamped = true;
    }
    if (best.segment == last && best.t == 1.0 && best_unclamped > 1.0 + 1e-12) {
      best.clamped = true;
    }
  }
  return best;
}

}  // namespace

double default_grid_cell(const std::vector<Eigen::Vector3d>& poly) {
  if (poly.size() < 2) return 1.0;
  double len = 0.0;
  for (size_t i = 1; i < poly.size(); ++i) len += (poly[i] - poly[i - 1]).norm();
  const double avg = len / (poly.size() - 1);
  return std::max(4.0 * avg, 1e-9);
}

ClosestPoint closest_point_brute(const std::vector<Eigen::Vector3d>& poly,
                                 const Eigen::Vector3d& p) {
  const int n = static_cast<int>(poly.size());
  if (n < 2) {
    ClosestPoint cp;
    if (n == 1) {
      cp.distance = (p - poly[0]).norm();
      cp.point = poly[0];
      cp.segment = 0;
    }
    return cp;
  }
  std::vector<int> all(n - 1);
  std::iota(all.begin(), all.end(), 0);
  return evaluate_segments(poly, p, all);
}

PolylineGrid::PolylineGrid(const std::vector<Eigen::Vector3d>& poly,
                           double cell)
    : poly_(&poly), cell_(std::max(cell, 1e-12)) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e300);
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(-1e300);
  for (const auto& p : poly) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  if (poly.empty()) {
    lo.setZero();
    hi.setZero();
  }
  origin_ = lo - Eigen::Vector3d::Constant(cell_);
  nx_ = std::max(1, static_cast<int>((hi.x() - origin_.x()) / cell_) + 2);
  ny_ = std::max(1, static_cast<int>((hi.y() - origin_.y()) / cell_) + 2);
  nz_ = std::max(1, static_cast<int>((hi.z() - origin_.z()) / cell_) + 2);
  cells_.assign(static_cast<size_t>(nx_) * ny_ * nz_, {});
  for (int i = 0; i < static_cast<int>(poly.size()); ++i) {
    const Eigen::Vector3d r = (poly[i] - origin_) / cell_;
    const int cx = std::clamp(static_cast<int>(r.x()), 0, nx_ - 1);
    const int cy = std::clamp(static_cast<int>(r.y()), 0, ny_ - 1);
    const int cz = std::clamp(static_cast<int>(r.z()), 0, nz_ - 1);
    cells_[(static_cast<size_t>(cz) * ny_ + cy) * nx_ + cx].push_back(i);
  }
  max_seg_ = 0.0;
  for (size_t i = 1; i < poly.size(); ++i) {
    max_seg_ = std::max(max_seg_, (poly[i] - poly[i - 1]).norm());
  }
}

void PolylineGrid::gather(const Eigen::Vector3d& p, double radius,
                          std::vector<int>& segs) const {
  segs.clear();
  const int n = static_cast<int>(poly_->size());
  const double r2 = radius * radius;
  const auto lo = ((p - Eigen::Vector3d::Constant(radius)) - origin_) / cell_;
  const auto hi = ((p + Eigen::Vector3d::Constant(radius)) - origin_) / cell_;
  const int x0 = std::clamp(static_cast<int>(lo.x()), 0, nx_ - 1);
  const int x1 = std::clamp(static_cast<int>(hi.x()), 0, nx_ - 1);
  const int y0 = std::clamp(static_cast<int>(lo.y()), 0, ny_ - 1);
  const int y1 = std::clamp(static_cast<int>(hi.y()), 0, ny_ - 1);
  const int z0 = std::clamp(static_cast<int>(lo.z()), 0, nz_ - 1);
  const int z1 = std::clamp(static_cast<int>(hi.z()), 0, nz_ - 1);
  for (int cz = z0; cz <= z1; ++cz) {
    for (int cy = y0; cy <= y1; ++cy) {
      for (int cx = x0; cx <= x1; ++cx) {
        for (int v : cells_[(static_cast<size_t>(cz) * ny_ + cy) * nx_ + cx]) {
          if (((*poly_)[v] - p).squaredNorm() > r2) continue;
          if (v > 0) segs.push_back(v - 1);
          if (v < n - 1) segs.push_back(v);
        }
      }
    }
  }
  std::sort(segs.begin(), segs.end());
  segs.erase(std::unique(segs.begin(), segs.end()), segs.end());
}

ClosestPoint PolylineGrid::query(const Eigen::Vector3d& p) const {
  if (!poly_ || poly_->size() < 2) {
    return poly_ ? closest_point_brute(*poly_, p) : ClosestPoint{};
  }
  const double whole =
      Eigen::Vector3d(nx_, ny_, nz_).norm() * cell_ + max_seg_;
  std::vector<int> segs;
  double radius = cell_;
  while (true) {
    gather(p, radius, segs);
    if (segs.empty()) {
      if (radius > whole) return closest_point_brute(*poly_, p);
      radius *= 2.0;
      continue;
    }
    const ClosestPoint candidate = evaluate_segments(*poly_, p, segs);
    // A nearer segment can only hide with an endpoint within this bound.
    const double safe = candidate.distance + 0.5 * max_seg_ + 1e-12;
    if (safe <= radius) return candidate;
    gather(p, safe, segs);
    return evaluate_segments(*poly_, p, segs);
  }
}

// ---------------------------------------------------------------------------
// Evolution

namespace {

std::vector<std::vector<Eigen::Vector3d>> extract_positions(
    const std::vector<Curve3D>& curves) {
  std::vector<std::vector<Eigen::Vector3d>> pos(curves.size());
  for (size_t i = 0; i < curves.size(); ++i) {
    pos[i].reserve(curves[i].samples.size());
    for (const auto& s : curves[i].samples) pos[i].push_back(s.position);
  }
  return pos;
}


EvolveResult evolve_impl(const std::vector<Curve3D>& curves,
                         const ClusterAdjacency& adjacency, double alpha,
                         int max_iters, double tol, bool use_grid) {
  EvolveResult result;
  result.curves = curves;
  const int n_curves = static_cast<int>(curves.size());
  auto positions = extract_positions(curves);
  auto next = positions;

  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<PolylineGrid> grids;
    if (use_grid) {
      grids.reserve(n_curves);
      for (int i = 0; i < n_curves; ++i) {
        grids.emplace_back(positions[i], default_grid_cell(positions[i]));
      }
    }

    std::vector<double> max_disp(n_curves, 0.0);
    parallel_for(n_curves, [&](std::int64_t i) {
      const auto& neighbors = adjacency.neighbors[i];
      for (size_t s = 0; s < positions[i].size(); ++s) {
        const Eigen::Vector3d& p = positions[i][s];
        Eigen::Vector3d sum = p;  // the average includes the sample itself
        int count = 1;
        for (int j : neighbors) {
          const ClosestPoint cp = use_grid
                                      ? grids[j].query(p)
                                      : closest_point_brute(positions[j], p);
          if (cp.segment < 0 || cp.clamped) continue;  // overhanging tail
          sum += cp.point;
          ++count;
        }
        const Eigen::Vector3d target = sum / count;
        next[i][s] = p + alpha * (target - p);
        max_disp[i] = std::max(max_disp[i], (next[i][s] - p).norm());
      }
    });

    std::swap(positions, next);
    result.iterations = iter + 1;
    const double disp = *std::max_element(max_disp.begin(), max_disp.end());
    if (disp < tol) {
      result.converged = true;
      break;
    }
  }

  for (int i = 0; i < n_curves; ++i) {
    for (size_t s = 0; s < positions[i].size(); ++s) {
      result.curves[i].samples[s].position = positions[i][s];
    }
  }
  return result;
}

}  // namespace

EvolveResult evolve_cluster(const std::vector<Curve3D>& curves,
                            const ClusterAdjacency& adjacency, double alpha,
                            int max_iters, double tol) {
  return evolve_impl(curves, adjacency, alpha, max_iters, tol, true);
}

EvolveResult evolve_cluster_serial(const std::vector<Curve3D>& curves,
                                   const ClusterAdjacency& adjacency,
                                   double alpha, int max_iters, double tol) {
  return evolve_impl(curves, adjacency, alpha, max_iters, tol, false);
}

// ---------------------------------------------------------------------------
// Overlap masks and primitives

namespace {

void erode_short_runs(std::vector<char>& mask, int min_len) {
  const int n = static_cast<int>(mask.size());
  int i = 0;
  while (i < n) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && mask[j]) ++j;
    if (j - i < min_len) std::fill(mask.begin() + i, mask.begin() + j, 0);
    i = j;
  }
}

struct Run {
  int begin = 0;
  int end = 0;  // inclusive
};

std::vector<Run> true_runs(const std::vector<char>& mask) {
  std::vector<Run> runs;
  const int n = static_cast<int>(mask.size());
  int i = 0;
  while (i < n) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && mask[j]) ++j;
    runs.push_back({i, j - 1});
    i = j;
  }
  return runs;
}

}  // namespace

OverlapMasks compute_overlap_masks(const std::vector<Curve3D>& curves,
                                   const ClusterAdjacency& adjacency,
                                   double d_merge) {
  OverlapMasks masks;
  const auto positions = extract_positions(curves);
  std::vector<PolylineGrid> grids;
  grids.reserve(curves.size());
  for (const auto& pos : positions) {
    grids.emplace_back(pos, default_grid_cell(pos));
  }
  for (int i = 0; i < static_cast<int>(curves.size()); ++i) {
    for (int j : adjacency.neighbors[i]) {
      std::vector<char> mask(positions[i].size(), 0);
      for (size_t s = 0; s < positions[i].size(); ++s) {
        const ClosestPoint cp = grids[j].query(positions[i][s]);
        mask[s] = (cp.segment >= 0 && cp.distance <= d_merge) ? 1 : 0;
      }
      erode_short_runs(mask, 3);
      masks[{i, j}] = std::move(mask);
    }
  }
  return masks;
}

std::vector<MergePrimitive> classify_merge_primitive(
    const std::vector<char>& mask_i, const std::vector<char>& mask_j) {
  std::vector<MergePrimitive> out;
  const auto runs = true_runs(mask_i);
  if (runs.empty()) return out;
  const int n = static_cast<int>(mask_i.size());
  const bool j_head = !mask_j.empty() && mask_j.front();
  const bool j_tail = !mask_j.empty() && mask_j.back();

  for (size_t k = 0; k < runs.size(); ++k) {
    if (k > 0) out.push_back(MergePrimitive::Bridge);
    const bool i_head = runs[k].begin == 0;
    const bool i_tail = runs[k].end == n - 1;
    if (i_head && i_tail) {
      // Full overlap of i; identity merge is the degenerate
      // interior-interior case.
      out.push_back(MergePrimitive::InteriorInterior);
    } else if (i_head || i_tail) {
      if (j_head || j_tail) {
        out.push_back(i_head ? MergePrimitive::HeadOverlap
                             : MergePrimitive::TailOverlap);
      } else {
        out.push_back(MergePrimitive::EndInterior);
      }
    } else {
      out.push_back((j_head || j_tail) ? MergePrimitive::EndInterior
                                       : MergePrimitive::InteriorInterior);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Drawing graph

double DrawingGraph::total_arc_length() const {
  double len = 0.0;
  for (const auto& link : links) len += arc_length(link.samples);
  return len;
}

int DrawingGraph::junction_count() const {
  int n = 0;
  for (const auto& node : nodes) n += node.degree >= 3 ? 1 : 0;
  return n;
}

void DrawingGraph::validate() const {
  std::vector<int> degree(nodes.size(), 0);
  std::vector<int> loop_count(nodes.size(), 0);
  for (const auto& link : links) {
    if (link.node_a < 0 || link.node_b < 0 ||
        link.node_a >= static_cast<int>(nodes.size()) ||
        link.node_b >= static_cast<int>(nodes.size())) {
      throw std::logic_error("drawing link references a missing node");
    }
    if (link.samples.size() < 2) {
      throw std::logic_error("drawing link has fewer than 2 samples");
    }
    ++degree[link.node_a];
    ++degree[link.node_b];
    if (link.node_a == link.node_b) ++loop_count[link.node_a];
    const double da = (link.samples.front() - nodes[link.node_a].position).norm();
    const double db = (link.samples.back() - nodes[link.node_b].position).norm();
    if (da > 1e-9 || db > 1e-9) {
      throw std::logic_error("drawing link geometry detached from its nodes");
    }
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].degree != degree[i]) {
      throw std::logic_error("drawing node degree out of sync");
    }
    if (degree[i] == 0) {
      throw std::logic_error("drawing node without incident links");
    }
    if (degree[i] == 2 && loop_count[i] == 0) {
      throw std::logic_error("non-loop degree-2 node survived splicing");
    }
  }
}

namespace {

// Incremental graph under construction; supports splitting links and
// weighted sample averaging.
struct GraphBuilder {
  struct Node {
    Eigen::Vector3d pos;
    std::vector<int> links;
    bool alive = true;
  };
  struct Link {
    int a = -1, b = -1;
    std::vector<Eigen::Vector3d> samples;
    std::vector<double> weights;
    bool alive = true;
  };
  std::vector<Node> nodes;
  std::vector<Link> links;

  int add_node(const Eigen::Vector3d& p) {
    nodes.push_back({p, {}, true});
    return static_cast<int>(nodes.size()) - 1;
  }

  int add_link(int a, int b, std::vector<Eigen::Vector3d> samples) {
    Link link;
    link.a = a;
    link.b = b;
    link.samples = std::move(samples);
    link.weights.assign(link.samples.size(), 1.0);
    links.push_back(std::move(link));
    const int id = static_cast<int>(links.size()) - 1;
    nodes[a].links.push_back(id);
    nodes[b].links.push_back(id);
    return id;
  }

  struct SampleHit {
    int link = -1;
    int sample = -1;
    double dist = std::numeric_limits<double>::max();
  };

  // Closest link sample over all alive links (deterministic: lowest
  // link/sample index wins ties).
  SampleHit closest_sample(const Eigen::Vector3d& p) const {
    SampleHit best;
    for (int l = 0; l < static_cast<int>(links.size()); ++l) {
      if (!links[l].alive) continue;
      for (int s = 0; s < static_cast<int>(links[l].samples.size()); ++s) {
        const double d = (links[l].samples[s] - p).norm();
        if (d < best.dist) best = {l, s, d};
      }
    }
    return best;
  }

  int nearest_node(const Eigen::Vector3d& p, double max_dist) const {
    int best = -1;
    double best_d = max_dist;
    for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
      if (!nodes[n].alive) continue;
      const double d = (nodes[n].pos - p).norm();
      if (d <= best_d) {
        best_d = d;
        best = n;
      }
    }
    return best;
  }

  void detach(int link_id, int node_id) {
    auto& ls = nodes[node_id].links;
    ls.erase(std::remove(ls.begin(), ls.end(), link_id), ls.end());
  }

  // Splits a link at an interior sample; the junction takes the centroid
  // of the split sample and the diverging boundary sample.
  int split_link(int link_id, int sample_idx,
                 const Eigen::Vector3d& boundary_sample) {
    Link& link = links[link_id];
    const Eigen::Vector3d junction_pos =
        0.5 * (link.samples[sample_idx] + boundary_sample);
    const int j = add_node(junction_pos);

    Link left, right;
    left.a = link.a;
    left.b = j;
    left.samples.assign(link.samples.begin(),
                        link.samples.begin() + sample_idx + 1);
    left.weights.assign(link.weights.begin(),
                        link.weights.begin() + sample_idx + 1);
    left.samples.back() = junction_pos;
    right.a = j;
    right.b = link.b;
    right.samples.assign(link.samples.begin() + sample_idx,
                         link.samples.end());
    right.weights.assign(link.weights.begin() + sample_idx,
                         link.weights.end());
    right.samples.front() = junction_pos;

    link.alive = false;
    detach(link_id, link.a);
    detach(link_id, link.b);
    const int left_id = static_cast<int>(links.size());
    links.push_back(std::move(left));
    nodes[links[left_id].a].links.push_back(left_id);
    nodes[j].links.push_back(left_id);
    const int right_id = static_cast<int>(links.size());
    links.push_back(std::move(right));
    nodes[j].links.push_back(right_id);
    nodes[links[right_id].b].links.push_back(right_id);
    return j;
  }

  // Node where a novel branch should connect, given the last overlapping
  // sample before the divergence.
  int attach_point(const Eigen::Vector3d& boundary_sample, double snap_dist) {
    const int node = nearest_node(boundary_sample, snap_dist);
    if (node >= 0) return node;
    const SampleHit hit = closest_sample(boundary_sample);
    if (hit.link < 0) return add_node(boundary_sample);
    const Link& link = links[hit.link];
    if (hit.sample == 0) return link.a;
    if (hit.sample == static_cast<int>(link.samples.size()) - 1) return link.b;
    // Snap to the link's nodes when the split would leave a sliver.
    if ((link.samples[hit.sample] - nodes[link.a].pos).norm() <= snap_dist) {
      return link.a;
    }
    if ((link.samples[hit.sample] - nodes[link.b].pos).norm() <= snap_dist) {
      return link.b;
    }
    return split_link(hit.link, hit.sample, boundary_sample);
  }

  // Weighted running average of an overlapping sample into the closest
  // existing link sample. Link end samples stay put (they are node
  // positions).
  void average_into(const Eigen::Vector3d& p, double d_merge) {
    const SampleHit hit = closest_sample(p);
    if (hit.link < 0 || hit.dist > d_merge) return;
    Link& link = links[hit.link];
    if (hit.sample == 0 ||
        hit.sample == static_cast<int>(link.samples.size()) - 1) {
      return;
    }
    double& w = link.weights[hit.sample];
    link.samples[hit.sample] = (link.samples[hit.sample] * w + p) / (w + 1.0);
    w += 1.0;
  }

  // Degree bookkeeping and geometry consistency, checked after every
  // incremental merge.
  void check_consistency() const {
    for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
      if (!nodes[n].alive) continue;
      for (int l : nodes[n].links) {
        if (!links[l].alive || (links[l].a != n && links[l].b != n)) {
          throw std::logic_error("graph builder: stale link reference");
        }
      }
    }
    for (int l = 0; l < static_cast<int>(links.size()); ++l) {
      if (!links[l].alive) continue;
      const Link& link = links[l];
      if ((link.samples.front() - nodes[link.a].pos).norm() > 1e-9 ||
          (link.samples.back() - nodes[link.b].pos).norm() > 1e-9) {
        throw std::logic_error("graph builder: link detached from node");
      }
    }
  }

  DrawingGraph finish() const {
    DrawingGraph graph;
    std::vector<int> node_map(nodes.size(), -1);
    for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
      if (!nodes[n].alive || nodes[n].links.empty()) continue;
      DrawingNode out;
      out.id = static_cast<int>(graph.nodes.size());
      out.position = nodes[n].pos;
      node_map[n] = out.id;
      graph.nodes.push_back(out);
    }
    for (int l = 0; l < static_cast<int>(links.size()); ++l) {
      if (!links[l].alive) continue;
      DrawingLink out;
      out.id = static_cast<int>(graph.links.size());
      out.node_a = node_map[links[l].a];
      out.node_b = node_map[links[l].b];
      out.samples = links[l].samples;
      graph.links.push_back(std::move(out));
    }
    for (const auto& link : graph.links) {
      ++graph.nodes[link.node_a].degree;
      ++graph.nodes[link.node_b].degree;
    }
    return graph;
  }
};

// Fills enclosed false gaps shorter than 3 samples so they do not spawn
// degenerate bridges.
void close_small_gaps(std::vector<char>& mask) {
  const int n = static_cast<int>(mask.size());
  int i = 0;
  while (i < n) {
    if (mask[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && !mask[j]) ++j;
    if (i > 0 && j < n && j - i < 3) {
      std::fill(mask.begin() + i, mask.begin() + j, 1);
    }
    i = j;
  }
}

// Splices chains through non-loop degree-2 nodes.
void splice_degree2(DrawingGraph& graph) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<int>> incident(graph.nodes.size());
    for (int l = 0; l < static_cast<int>(graph.links.size()); ++l) {
      incident[graph.links[l].node_a].push_back(l);
      if (graph.links[l].node_b != graph.links[l].node_a) {
        incident[graph.links[l].node_b].push_back(l);
      }
    }
    for (int n = 0; n < static_cast<int>(graph.nodes.size()); ++n) {
      if (incident[n].size() != 2) continue;
      const int l1 = incident[n][0];
      const int l2 = incident[n][1];
      if (l1 == l2) continue;  // loop stays
      DrawingLink& a = graph.links[l1];
      DrawingLink& b = graph.links[l2];
      // Orient a to end at n and b to start at n.
      std::vector<Eigen::Vector3d> samples = a.samples;
      if (a.node_a == n) std::reverse(samples.begin(), samples.end());
      const int start = a.node_a == n ? a.node_b : a.node_a;
      std::vector<Eigen::Vector3d> tail = b.samples;
      if (b.node_b == n) std::reverse(tail.begin(), tail.end());
      const int end = b.node_b == n ? b.node_a : b.node_b;
      samples.insert(samples.end(), tail.begin() + 1, tail.end());
      a.node_a = start;
      a.node_b = end;
      a.samples = std::move(samples);
      // Remove l2 and the spliced node.
      graph.links.erase(graph.links.begin() + l2);
      graph.nodes.erase(graph.nodes.begin() + n);
      for (auto& link : graph.links) {
        if (link.node_a > n) --link.node_a;
        if (link.node_b > n) --link.node_b;
      }
      changed = true;
      break;
    }
  }
  // Renumber and refresh degrees.
  for (int n = 0; n < static_cast<int>(graph.nodes.size()); ++n) {
    graph.nodes[n].id = n;
    graph.nodes[n].degree = 0;
  }
  for (int l = 0; l < static_cast<int>(graph.links.size()); ++l) {
    graph.links[l].id = l;
    ++graph.nodes[graph.links[l].node_a].degree;
    ++graph.nodes[graph.links[l].node_b].degree;
  }
}

}  // namespace

DrawingGraph merge_cluster(const std::vector<Curve3D>& curves,
                           const OverlapMasks& masks, double d_merge,
                           double snap_dist) {
  GraphBuilder builder;
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(curves.size()); ++i) {
    if (curves[i].size() >= 2) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double la = arc_length(curves[a]);
    const double lb = arc_length(curves[b]);
    if (la != lb) return la > lb;
    return a < b;
  });

  std::vector<char> merged(curves.size(), 0);
  for (size_t oi = 0; oi < order.size(); ++oi) {
    const int c = order[oi];
    const auto positions = [&] {
      std::vector<Eigen::Vector3d> p;
      p.reserve(curves[c].samples.size());
      for (const auto& s : curves[c].samples) p.push_back(s.position);
      return p;
    }();
    const int n = static_cast<int>(positions.size());

    // Union of overlap against already-merged curves.
    std::vector<char> mask(n, 0);
    for (int j = 0; j < static_cast<int>(curves.size()); ++j) {
      if (!merged[j]) continue;
      const auto it = masks.find({c, j});
      if (it == masks.end()) continue;
      for (int s = 0; s < n; ++s) mask[s] |= it->second[s];
    }
    close_small_gaps(mask);

    const bool any_overlap =
        std::any_of(mask.begin(), mask.end(), [](char m) { return m != 0; });
    if (!any_overlap) {
      const int a = builder.add_node(positions.front());
      const int b = builder.add_node(positions.back());
      builder.add_link(a, b, positions);
    } else {
      // Overlapping runs reinforce existing geometry.
      for (int s = 0; s < n; ++s) {
        if (mask[s]) builder.average_into(positions[s], 2.0 * d_merge);
      }
      // Novel runs become branches anchored at junctions.
      int s = 0;
      while (s < n) {
        if (mask[s]) {
          ++s;
          continue;
        }
        int e = s;
        while (e < n && !mask[e]) ++e;  // novel run [s, e)
        if (e - s >= 2) {
          std::vector<Eigen::Vector3d> geometry(positions.begin() + s,
                                                positions.begin() + e);
          int node_a, node_b;
          if (s > 0) {
            node_a = builder.attach_point(positions[s - 1], snap_dist);
            geometry.insert(geometry.begin(), builder.nodes[node_a].pos);
          } else {
            node_a = builder.add_node(geometry.front());
          }
          if (e < n) {
            node_b = builder.attach_point(positions[e], snap_dist);
            geometry.push_back(builder.nodes[node_b].pos);
          } else {
            node_b = builder.add_node(geometry.back());
          }
          // Guard against zero-length geometry after anchoring.
          geometry.erase(std::unique(geometry.begin(), geometry.end(),
                                     [](const Eigen::Vector3d& a,
                                        const Eigen::Vector3d& b) {
                                       return (a - b).norm() < 1e-12;
                                     }),
                         geometry.end());
          if (geometry.size() >= 2 && node_a != node_b) {
            builder.add_link(node_a, node_b, std::move(geometry));
          } else if (geometry.size() >= 3 && node_a == node_b) {
            builder.add_link(node_a, node_b, std::move(geometry));
          }
        }
        s = e;
      }
    }
    merged[c] = 1;
    builder.check_consistency();
  }

  DrawingGraph graph = builder.finish();
  splice_degree2(graph);
  return graph;
}

void coalesce_endpoints(DrawingGraph& graph, double snap_dist) {
  const int n = static_cast<int>(graph.nodes.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (graph.nodes[i].degree != 1 && graph.nodes[j].degree != 1) continue;
      if ((graph.nodes[i].position - graph.nodes[j].position).norm() >
          snap_dist) {
        continue;
      }
      const int ri = find(i), rj = find(j);
      if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
    }
  }

  // Collapse groups to centroid nodes.
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<int> remap(n, -1);
  DrawingGraph out;
  for (const auto& [root, members] : groups) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int m : members) centroid += graph.nodes[m].position;
    centroid /= static_cast<double>(members.size());
    DrawingNode node;
    node.id = static_cast<int>(out.nodes.size());
    node.position = centroid;
    node.cluster_id = graph.nodes[members.front()].cluster_id;
    for (int m : members) remap[m] = node.id;
    out.nodes.push_back(node);
  }
  for (const auto& link : graph.links) {
    DrawingLink l = link;
    l.id = static_cast<int>(out.links.size());
    l.node_a = remap[link.node_a];
    l.node_b = remap[link.node_b];
    l.samples.front() = out.nodes[l.node_a].position;
    l.samples.back() = out.nodes[l.node_b].position;
    out.links.push_back(std::move(l));
  }
  for (const auto& link : out.links) {
    ++out.nodes[link.node_a].degree;
    ++out.nodes[link.node_b].degree;
  }
  splice_degree2(out);
  graph = std::move(out);
}

DrawingGraph build_drawing(const std::vector<Curve3D>& curves,
                           const MCCN& mccn, const Params& params,
                           double sample_spacing) {
  const double d_merge = params.merge_factor * sample_spacing;
  const double snap = params.snap_factor * sample_spacing;
  const double tol = params.tol_factor * sample_spacing;

  const int n_clusters = static_cast<int>(mccn.clusters.size());
  std::vector<DrawingGraph> components(n_clusters);
  parallel_for(n_clusters, [&](std::int64_t ci) {
    const auto& members = mccn.clusters[ci];
    std::vector<Curve3D> cluster_curves;
    cluster_curves.reserve(members.size());
    for (int m : members) cluster_curves.push_back(curves[m]);

    ClusterAdjacency adjacency;
    adjacency.neighbors.resize(members.size());
    for (size_t a = 0; a < members.size(); ++a) {
      for (size_t b = 0; b < members.size(); ++b) {
        if (a != b && mccn.linked(members[a], members[b])) {
          adjacency.neighbors[a].push_back(static_cast<int>(b));
        }
      }
    }

    const EvolveResult evolved = evolve_cluster(
        cluster_curves, adjacency, params.alpha, params.max_iters, tol);
    const OverlapMasks masks =
        compute_overlap_masks(evolved.curves, adjacency, d_merge);
    components[ci] = merge_cluster(evolved.curves, masks, d_merge, snap);
  });

  DrawingGraph graph;
  for (int ci = 0; ci < n_clusters; ++ci) {
    const int node_offset = static_cast<int>(graph.nodes.size());
    for (const auto& node : components[ci].nodes) {
      DrawingNode n = node;
      n.id += node_offset;
      n.cluster_id = ci;
      graph.nodes.push_back(n);
    }
    for (const auto& link : components[ci].links) {
      DrawingLink l = link;
      l.id = static_cast<int>(graph.links.size());
      l.node_a += node_offset;
      l.node_b += node_offset;
      l.cluster_id = ci;
      graph.links.push_back(std::move(l));
    }
  }
  coalesce_endpoints(graph, snap);
  graph.validate();
  return graph;
}

}  // namespace curvedraw
