#include "curvedraw/curve_model.hpp"

#include <algorithm>
#include <cmath>

namespace curvedraw {

Eigen::Vector2d Curve2D::tangent_at(int i) const {
  const int n = size();
  const int a = std::max(0, i - 1);
  const int b = std::min(n - 1, i + 1);
  Eigen::Vector2d d = edgels[b].position - edgels[a].position;
  const double len = d.norm();
  if (len < 1e-15) return {1.0, 0.0};
  return d / len;
}

Eigen::Vector2d Curve2D::position_at(double t) const {
  const int n = size();
  if (t <= 0.0) return edgels.front().position;
  if (t >= n - 1) return edgels.back().position;
  const int i = static_cast<int>(t);
  const double f = t - i;
  return (1.0 - f) * edgels[i].position + f * edgels[i + 1].position;
}

int ViewData::edgel_count() const {
  int n = 0;
  for (const auto& c : curves) n += c.size();
  return n;
}

void ViewData::renumber() {
  int next = 0;
  int cid = 0;
  for (auto& c : curves) {
    c.view_id = view_id;
    if (c.curve_id < 0) c.curve_id = cid;
    ++cid;
    for (auto& e : c.edgels) {
      e.view_id = view_id;
      e.edgel_id = next++;
    }
  }
}

void Sample3D::add_support(int view, int edgel) {
  auto& ids = support[view];
  auto it = std::lower_bound(ids.begin(), ids.end(), edgel);
  if (it == ids.end() || *it != edgel) ids.insert(it, edgel);
}

namespace {

template <typename Pt>
double polyline_length(const std::vector<Pt>& pts) {
  double len = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
  return len;
}

}  // namespace

double arc_length(const Curve3D& curve) {
  double len = 0.0;
  for (size_t i = 1; i < curve.samples.size(); ++i) {
    len += (curve.samples[i].position - curve.samples[i - 1].position).norm();
  }
  return len;
}

double arc_length(const Curve2D& curve) {
  double len = 0.0;
  for (size_t i = 1; i < curve.edgels.size(); ++i) {
    len += (curve.edgels[i].position - curve.edgels[i - 1].position).norm();
  }
  return len;
}

double arc_length(const std::vector<Eigen::Vector2d>& polyline) {
  return polyline_length(polyline);
}

double arc_length(const std::vector<Eigen::Vector3d>& polyline) {
  return polyline_length(polyline);
}

std::vector<Eigen::Vector3d> resample_polyline(
    const std::vector<Eigen::Vector3d>& points, double spacing) {
  const double total = polyline_length(points);
  if (points.size() < 2 || total <= 0.0) return points;
  const int segments = std::max(1, static_cast<int>(std::lround(total / spacing)));
  const double step = total / segments;

  std::vector<Eigen::Vector3d> out;
  out.reserve(segments + 1);
  out.push_back(points.front());
  size_t seg = 0;
  double seg_start = 0.0;
  double seg_len = (points[1] - points[0]).norm();
  for (int k = 1; k < segments; ++k) {
    const double s = k * step;
    while (seg + 2 < points.size() && seg_start + seg_len < s) {
      seg_start += seg_len;
      ++seg;
      seg_len = (points[seg + 1] - points[seg]).norm();
    }
    const double f = seg_len > 0 ? (s - seg_start) / seg_len : 0.0;
    out.push_back(points[seg] + f * (points[seg + 1] - points[seg]));
  }
  out.push_back(points.back());
  return out;
}

Curve3D resample_uniform(const Curve3D& curve, double spacing) {
  if (spacing <= 0.0) throw InvalidSpec("resample spacing must be positive");
  const double total = arc_length(curve);
  if (spacing > total) {
    throw SpacingTooLarge("spacing " + std::to_string(spacing) +
                          " exceeds curve arc length " + std::to_string(total));
  }
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(curve.samples.size());
  for (const auto& s : curve.samples) pts.push_back(s.position);
  const std::vector<Eigen::Vector3d> re = resample_polyline(pts, spacing);

  // Arc positions of the original samples, for nearest-sample inheritance.
  std::vector<double> orig_s(pts.size(), 0.0);
  for (size_t i = 1; i < pts.size(); ++i) {
    orig_s[i] = orig_s[i - 1] + (pts[i] - pts[i - 1]).norm();
  }

  Curve3D out;
  out.curve_id = curve.curve_id;
  out.primary_view = curve.primary_view;
  out.primary_curve = curve.primary_curve;
  out.samples.reserve(re.size());
  const double step = total / (re.size() - 1);
  for (size_t k = 0; k < re.size(); ++k) {
    const double s = std::min(total, k * step);
    const auto it = std::lower_bound(orig_s.begin(), orig_s.end(), s);
    size_t j = static_cast<size_t>(it - orig_s.begin());
    if (j > 0 &&
        (j == orig_s.size() || orig_s[j] - s > s - orig_s[j - 1])) {
      --j;
    }
    Sample3D sample = curve.samples[j];
    sample.position = re[k];
    out.samples.push_back(std::move(sample));
  }
  return out;
}

EdgelIndex::EdgelIndex(const std::vector<ViewData>& views, double cell_size) {
  for (const auto& v : views) {
    ViewGrid g;
    g.cell = std::max(1e-9, cell_size);
    const int n_edgels = v.edgel_count();
    g.edgels.assign(n_edgels, Edgel2D{});
    g.locations.assign(n_edgels, {});
    double min_x = 0, min_y = 0, max_x = v.width, max_y = v.height;
    for (size_t ci = 0; ci < v.curves.size(); ++ci) {
      for (const auto& e : v.curves[ci].edgels) {
        min_x = std::min(min_x, e.position.x());
        min_y = std::min(min_y, e.position.y());
        max_x = std::max(max_x, e.position.x());
        max_y = std::max(max_y, e.position.y());
      }
    }
    g.origin_x = min_x - g.cell;
    g.origin_y = min_y - g.cell;
    g.nx = std::max(1, static_cast<int>((max_x - g.origin_x) / g.cell) + 2);
    g.ny = std::max(1, static_cast<int>((max_y - g.origin_y) / g.cell) + 2);
    g.cells.assign(static_cast<size_t>(g.nx) * g.ny, {});
    for (size_t ci = 0; ci < v.curves.size(); ++ci) {
      const auto& curve = v.curves[ci];
      for (size_t k = 0; k < curve.edgels.size(); ++k) {
        const Edgel2D& e = curve.edgels[k];
        g.edgels[e.edgel_id] = e;
        g.locations[e.edgel_id] = {static_cast<int>(ci), static_cast<int>(k)};
        const int cx = std::clamp(
            static_cast<int>((e.position.x() - g.origin_x) / g.cell), 0,
            g.nx - 1);
        const int cy = std::clamp(
            static_cast<int>((e.position.y() - g.origin_y) / g.cell), 0,
            g.ny - 1);
        g.cells[static_cast<size_t>(cy) * g.nx + cx].push_back(e.edgel_id);
      }
    }
    grids_.emplace(v.view_id, std::move(g));
  }
}

bool EdgelIndex::has_view(int view_id) const {
  return grids_.count(view_id) != 0;
}

const EdgelIndex::ViewGrid& EdgelIndex::grid_for(int view_id) const {
  auto it = grids_.find(view_id);
  if (it == grids_.end()) {
    throw UnknownView("view " + std::to_string(view_id) +
                      " is not covered by the edgel index");
  }
  return it->second;
}

std::vector<int> EdgelIndex::query(int view_id, const Eigen::Vector2d& p,
                                   double radius) const {
  const ViewGrid& g = grid_for(view_id);
  std::vector<int> out;
  const double r2 = radius * radius;
  const int cx0 = std::clamp(
      static_cast<int>((p.x() - radius - g.origin_x) / g.cell), 0, g.nx - 1);
  const int cx1 = std::clamp(
      static_cast<int>((p.x() + radius - g.origin_x) / g.cell), 0, g.nx - 1);
  const int cy0 = std::clamp(
      static_cast<int>((p.y() - radius - g.origin_y) / g.cell), 0, g.ny - 1);
  const int cy1 = std::clamp(
      static_cast<int>((p.y() + radius - g.origin_y) / g.cell), 0, g.ny - 1);
  for (int cy = cy0; cy <= cy1; ++cy) {
    for (int cx = cx0; cx <= cx1; ++cx) {
      for (int id : g.cells[static_cast<size_t>(cy) * g.nx + cx]) {
        if ((g.edgels[id].position - p).squaredNorm() <= r2) {
          out.push_back(id);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

const Edgel2D& EdgelIndex::edgel(int view_id, int edgel_id) const {
  return grid_for(view_id).edgels.at(edgel_id);
}

EdgelLocation EdgelIndex::locate(int view_id, int edgel_id) const {
  return grid_for(view_id).locations.at(edgel_id);
}

}  // namespace curvedraw
