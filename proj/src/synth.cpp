#include "curvedraw/synth.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

namespace curvedraw {

namespace {

Eigen::Vector3d orthonormal_to(const Eigen::Vector3d& axis) {
  Eigen::Vector3d a = axis.normalized();
  Eigen::Vector3d ref = std::abs(a.z()) < 0.9 ? Eigen::Vector3d::UnitZ()
                                              : Eigen::Vector3d::UnitX();
  return a.cross(ref).normalized();
}

}  // namespace

Eigen::Vector3d CurvePrimitive::point_at(double u) const {
  switch (kind) {
    case PrimitiveKind::Segment:
      return p0 + u * (p1 - p0);
    case PrimitiveKind::Arc: {
      const Eigen::Vector3d e1 = orthonormal_to(axis);
      const Eigen::Vector3d e2 = axis.normalized().cross(e1);
      const double a = angle0 + u * (angle1 - angle0);
      return center + radius * (std::cos(a) * e1 + std::sin(a) * e2);
    }
    case PrimitiveKind::Helix: {
      const Eigen::Vector3d e1 = orthonormal_to(axis);
      const Eigen::Vector3d ax = axis.normalized();
      const Eigen::Vector3d e2 = ax.cross(e1);
      const double a = u * turns * 2.0 * M_PI;
      return center + radius * (std::cos(a) * e1 + std::sin(a) * e2) +
             ax * (u * turns * pitch);
    }
    case PrimitiveKind::Polyline: {
      const int n = static_cast<int>(points.size());
      const double t = u * (n - 1);
      const int i = std::min(n - 2, static_cast<int>(t));
      const double f = t - i;
      return (1.0 - f) * points[i] + f * points[i + 1];
    }
  }
  return Eigen::Vector3d::Zero();
}

void SceneSpec::validate() const {
  if (curves.empty()) throw InvalidSpec("scene has no curves");
  if (rig.count < 2) throw InvalidSpec("rig needs at least 2 cameras");
  auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in01(fragmentation) || !in01(dropout)) {
    throw InvalidSpec("probabilities must lie in [0,1]");
  }
  if (noise_sigma < 0.0 || outliers < 0) {
    throw InvalidSpec("noise sigma and outlier count must be non-negative");
  }
  for (const auto& c : curves) {
    if (c.kind == PrimitiveKind::Polyline && c.points.size() < 2) {
      throw InvalidSpec("polyline primitive needs at least 2 points");
    }
    if ((c.kind == PrimitiveKind::Arc || c.kind == PrimitiveKind::Helix) &&
        c.radius <= 0.0) {
      throw InvalidSpec("arc/helix radius must be positive");
    }
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SyntheticScene::diameter() const {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e300);
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(-1e300);
  for (const auto& c : ground_truth) {
    for (const auto& p : c) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  if (ground_truth.empty()) return 0.0;
  return (hi - lo).norm();
}

namespace {

struct GtBounds {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  double diameter = 1.0;
};

GtBounds gt_bounds(const std::vector<std::vector<Eigen::Vector3d>>& gt) {
  GtBounds b;
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e300);
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(-1e300);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  std::int64_t n = 0;
  for (const auto& c : gt) {
    for (const auto& p : c) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
      sum += p;
      ++n;
    }
  }
  if (n > 0) {
    b.centroid = sum / double(n);
    b.diameter = std::max(1e-12, (hi - lo).norm());
  }
  return b;
}

Camera make_look_at_camera(const Eigen::Vector3d& position,
                           const Eigen::Vector3d& target, double focal,
                           int width, int height, int view_id) {
  Eigen::Vector3d forward = (target - position).normalized();
  Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  if (std::abs(forward.dot(up)) > 0.99) up = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d right = forward.cross(up).normalized();
  const Eigen::Vector3d down = forward.cross(right).normalized();
  Eigen::Matrix3d rot;
  rot.row(0) = right;
  rot.row(1) = down;
  rot.row(2) = forward;
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = focal;
  k(1, 1) = focal;
  k(0, 2) = width / 2.0;
  k(1, 2) = height / 2.0;
  Camera cam;
  cam.view_id = view_id;
  cam.projection.leftCols<3>() = k * rot;
  cam.projection.col(3) = k * (-rot * position);
  return cam;
}

// One projected, visible, finely sampled piece of a 3D curve.
struct ProjectedPiece {
  std::vector<Eigen::Vector2d> pts;
  std::vector<double> params;
};

// Resampled at ~1px spacing, carrying source params along.
struct EdgelChain {
  std::vector<Eigen::Vector2d> pts;
  std::vector<double> params;
};

EdgelChain resample_piece(const ProjectedPiece& piece, double spacing) {
  EdgelChain out;
  double total = 0.0;
  for (size_t i = 1; i < piece.pts.size(); ++i) {
    total += (piece.pts[i] - piece.pts[i - 1]).norm();
  }
  if (piece.pts.size() < 2 || total < spacing) return out;
  const int segments = std::max(1, static_cast<int>(std::lround(total / spacing)));
  const double step = total / segments;
  size_t seg = 0;
  double seg_start = 0.0;
  double seg_len = (piece.pts[1] - piece.pts[0]).norm();
  for (int k = 0; k <= segments; ++k) {
    const double s = std::min(total, k * step);
    while (seg + 2 < piece.pts.size() && seg_start + seg_len < s) {
      seg_start += seg_len;
      ++seg;
      seg_len = (piece.pts[seg + 1] - piece.pts[seg]).norm();
    }
    const double f = seg_len > 0 ? (s - seg_start) / seg_len : 0.0;
    out.pts.push_back(piece.pts[seg] + f * (piece.pts[seg + 1] - piece.pts[seg]));
    out.params.push_back(piece.params[seg] +
                         f * (piece.params[seg + 1] - piece.params[seg]));
  }
  return out;
}

double wrap_orientation(double theta) {
  while (theta < 0.0) theta += M_PI;
  while (theta >= M_PI) theta -= M_PI;
  return theta;
}

// Builds a fragment from an edgel chain; orientations from noisy neighbors.
Curve2D chain_to_curve(const EdgelChain& chain, size_t begin, size_t end,
                       int view_id) {
  Curve2D c;
  c.view_id = view_id;
  for (size_t i = begin; i < end; ++i) {
    Edgel2D e;
    e.position = chain.pts[i];
    const size_t a = i > begin ? i - 1 : i;
    const size_t b = i + 1 < end ? i + 1 : i;
    const Eigen::Vector2d d = chain.pts[b] - chain.pts[a];
    e.orientation = wrap_orientation(std::atan2(d.y(), d.x()));
    e.view_id = view_id;
    c.edgels.push_back(e);
  }
  return c;
}

}  // namespace

SyntheticScene generate_scene(const SceneSpec& spec) {
  spec.validate();
  SyntheticScene scene;

  // Ground truth: fine fixed sampling of every primitive.
  const int gt_samples = 1024;
  for (const auto& prim : spec.curves) {
    std::vector<Eigen::Vector3d> c;
    c.reserve(gt_samples + 1);
    for (int k = 0; k <= gt_samples; ++k) {
      c.push_back(prim.point_at(double(k) / gt_samples));
    }
    scene.ground_truth.push_back(std::move(c));
  }

  const GtBounds bounds = gt_bounds(scene.ground_truth);
  const Eigen::Vector3d target =
      spec.rig.auto_look_at ? bounds.centroid : spec.rig.look_at;
  const double ring_radius = spec.rig.radius_factor * bounds.diameter;
  const double focal =
      spec.rig.focal > 0.0
          ? spec.rig.focal
          : 0.35 * std::min(spec.rig.width, spec.rig.height) * ring_radius /
                bounds.diameter;

  for (int v = 0; v < spec.rig.count; ++v) {
    const double azimuth = 2.0 * M_PI * v / spec.rig.count;
    double elev = spec.rig.elevation_deg * M_PI / 180.0;
    if (spec.rig.alternate_elevation && (v % 2 == 1)) elev = -elev;
    const Eigen::Vector3d pos =
        target + ring_radius * Eigen::Vector3d(std::cos(azimuth) * std::cos(elev),
                                               std::sin(azimuth) * std::cos(elev),
                                               std::sin(elev));
    scene.cameras.push_back(make_look_at_camera(pos, target, focal,
                                                spec.rig.width,
                                                spec.rig.height, v));
  }

  scene.views.resize(spec.rig.count);
  scene.fragment_source.resize(spec.rig.count);
  scene.edgel_params.resize(spec.rig.count);

  const int fine = std::max(4 * spec.coarse_samples, 512);
  for (int v = 0; v < spec.rig.count; ++v) {
    ViewData& view = scene.views[v];
    view.view_id = v;
    view.width = spec.rig.width;
    view.height = spec.rig.height;
    const Camera& cam = scene.cameras[v];
    std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(v)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    for (size_t ci = 0; ci < spec.curves.size(); ++ci) {
      // Draw the per-curve randomness unconditionally so dropout does not
      // shift the stream of later curves.
      const bool dropped = uni(rng) < spec.dropout;
      std::vector<double> breaks;
      for (int k = 1; k < spec.coarse_samples; ++k) {
        if (uni(rng) < spec.fragmentation) {
          breaks.push_back(double(k) / spec.coarse_samples);
        }
      }
      if (dropped) continue;

      // Project the fine sampling, splitting at visibility boundaries.
      std::vector<ProjectedPiece> pieces;
      ProjectedPiece cur;
      for (int k = 0; k <= fine; ++k) {
        const double u = double(k) / fine;
        const Eigen::Vector3d x = spec.curves[ci].point_at(u);
        const auto px = try_project(cam, x);
        const bool visible = px && px->x() >= 0 && px->x() < view.width &&
                             px->y() >= 0 && px->y() < view.height;
        if (visible) {
          cur.pts.push_back(*px);
          cur.params.push_back(u);
        } else if (!cur.pts.empty()) {
          pieces.push_back(std::move(cur));
          cur = {};
        }
      }
      if (!cur.pts.empty()) pieces.push_back(std::move(cur));

      for (auto& piece : pieces) {
        EdgelChain chain = resample_piece(piece, spec.edgel_spacing_px);
        if (chain.pts.size() < 2) continue;
        // Pixel noise, then orientations from the noisy polyline.
        for (auto& p : chain.pts) {
          p.x() += spec.noise_sigma * gauss(rng);
          p.y() += spec.noise_sigma * gauss(rng);
        }
        // Cut at fragmentation break params.
        std::vector<size_t> cut_at;
        cut_at.push_back(0);
        for (double b : breaks) {
          const auto it = std::lower_bound(chain.params.begin(),
                                           chain.params.end(), b);
          const size_t idx = static_cast<size_t>(it - chain.params.begin());
          if (idx > 0 && idx < chain.pts.size()) cut_at.push_back(idx);
        }
        cut_at.push_back(chain.pts.size());
        std::sort(cut_at.begin(), cut_at.end());
        cut_at.erase(std::unique(cut_at.begin(), cut_at.end()), cut_at.end());
        for (size_t s = 0; s + 1 < cut_at.size(); ++s) {
          const size_t b0 = cut_at[s], b1 = cut_at[s + 1];
          if (b1 - b0 < 2) continue;
          Curve2D frag = chain_to_curve(chain, b0, b1, v);
          frag.curve_id = static_cast<int>(view.curves.size());
          view.curves.push_back(std::move(frag));
          scene.fragment_source[v].push_back(static_cast<int>(ci));
          scene.edgel_params[v].push_back(std::vector<double>(
              chain.params.begin() + b0, chain.params.begin() + b1));
        }
      }
    }

    // Outliers: random smooth arcs, uncorrelated across views. Redraw
    // until the arc lands inside the image so the requested count holds.
    for (int o = 0; o < spec.outliers; ++o) {
      for (int attempt = 0; attempt < 64; ++attempt) {
        const double cx = (0.2 + 0.6 * uni(rng)) * view.width;
        const double cy = (0.2 + 0.6 * uni(rng)) * view.height;
        const double r = (0.0625 + 0.125 * uni(rng)) * view.width;
        const double a0 = uni(rng) * 2.0 * M_PI;
        const double span = M_PI / 3.0 + uni(rng) * (2.0 * M_PI / 3.0);
        EdgelChain chain;
        const int n =
            std::max(8, static_cast<int>(r * span / spec.edgel_spacing_px));
        for (int k = 0; k <= n; ++k) {
          const double a = a0 + span * k / n;
          Eigen::Vector2d p(cx + r * std::cos(a), cy + r * std::sin(a));
          if (p.x() < 0 || p.x() >= view.width || p.y() < 0 ||
              p.y() >= view.height) {
            continue;
          }
          chain.pts.push_back(p);
          chain.params.push_back(double(k) / n);
        }
        if (chain.pts.size() < 5) continue;
        Curve2D frag = chain_to_curve(chain, 0, chain.pts.size(), v);
        frag.curve_id = static_cast<int>(view.curves.size());
        view.curves.push_back(std::move(frag));
        scene.fragment_source[v].push_back(-1);
        scene.edgel_params[v].push_back(chain.params);
        break;
      }
    }

    view.renumber();
  }
  return scene;
}

std::vector<Eigen::Vector3d> ground_truth_samples(
    const std::vector<std::vector<Eigen::Vector3d>>& gt_curves,
    double spacing) {
  std::vector<Eigen::Vector3d> out;
  for (const auto& c : gt_curves) {
    if (c.size() < 2) continue;
    std::vector<Eigen::Vector3d> re = resample_polyline(c, spacing);
    const bool closed = (c.front() - c.back()).norm() < 1e-12;
    const size_t n = closed && re.size() > 1 ? re.size() - 1 : re.size();
    out.insert(out.end(), re.begin(), re.begin() + n);
  }
  return out;
}

SceneSpec make_cube_scene(double edge, int n_views) {
  SceneSpec spec;
  const double h = edge / 2.0;
  const Eigen::Vector3d corners[8] = {
      {-h, -h, -h}, {h, -h, -h}, {h, h, -h}, {-h, h, -h},
      {-h, -h, h},  {h, -h, h},  {h, h, h},  {-h, h, h}};
  const int edges[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                            {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  for (const auto& e : edges) {
    CurvePrimitive prim;
    prim.kind = PrimitiveKind::Segment;
    prim.p0 = corners[e[0]];
    prim.p1 = corners[e[1]];
    spec.curves.push_back(prim);
  }
  spec.rig.count = n_views;
  return spec;
}

SceneSpec make_segment_scene(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                             int n_views) {
  SceneSpec spec;
  CurvePrimitive prim;
  prim.kind = PrimitiveKind::Segment;
  prim.p0 = a;
  prim.p1 = b;
  spec.curves.push_back(prim);
  spec.rig.count = n_views;
  return spec;
}

namespace {

using nlohmann::json;

json vec3_to_json(const Eigen::Vector3d& v) { return json{v.x(), v.y(), v.z()}; }

Eigen::Vector3d vec3_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

void save_scene_spec(const SceneSpec& spec, const std::string& path) {
  json j;
  for (const auto& c : spec.curves) {
    json jc;
    switch (c.kind) {
      case PrimitiveKind::Segment:
        jc["type"] = "segment";
        jc["p0"] = vec3_to_json(c.p0);
        jc["p1"] = vec3_to_json(c.p1);
        break;
      case PrimitiveKind::Arc:
        jc["type"] = "arc";
        jc["center"] = vec3_to_json(c.center);
        jc["axis"] = vec3_to_json(c.axis);
        jc["radius"] = c.radius;
        jc["angle0"] = c.angle0;
        jc["angle1"] = c.angle1;
        break;
      case PrimitiveKind::Helix:
        jc["type"] = "helix";
        jc["center"] = vec3_to_json(c.center);
        jc["axis"] = vec3_to_json(c.axis);
        jc["radius"] = c.radius;
        jc["pitch"] = c.pitch;
        jc["turns"] = c.turns;
        break;
      case PrimitiveKind::Polyline: {
        jc["type"] = "polyline";
        json pts = json::array();
        for (const auto& p : c.points) pts.push_back(vec3_to_json(p));
        jc["points"] = pts;
        break;
      }
    }
    j["curves"].push_back(jc);
  }
  j["rig"] = {{"count", spec.rig.count},
              {"radius_factor", spec.rig.radius_factor},
              {"elevation_deg", spec.rig.elevation_deg},
              {"alternate_elevation", spec.rig.alternate_elevation},
              {"width", spec.rig.width},
              {"height", spec.rig.height},
              {"focal", spec.rig.focal}};
  if (!spec.rig.auto_look_at) j["rig"]["look_at"] = vec3_to_json(spec.rig.look_at);
  j["noise_sigma"] = spec.noise_sigma;
  j["fragmentation"] = spec.fragmentation;
  j["dropout"] = spec.dropout;
  j["outliers"] = spec.outliers;
  j["seed"] = spec.seed;
  j["edgel_spacing_px"] = spec.edgel_spacing_px;
  j["coarse_samples"] = spec.coarse_samples;

  std::ofstream out(path);
  if (!out) throw IoError("cannot write scene spec: " + path);
  out << j.dump(2) << "\n";
}

SceneSpec load_scene_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scene spec: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidSpec("scene spec parse error in " + path + ": " + e.what());
  }
  SceneSpec spec;
  try {
    for (const auto& jc : j.at("curves")) {
      CurvePrimitive c;
      const std::string type = jc.at("type").get<std::string>();
      if (type == "segment") {
        c.kind = PrimitiveKind::Segment;
        c.p0 = vec3_from_json(jc.at("p0"));
        c.p1 = vec3_from_json(jc.at("p1"));
      } else if (type == "arc") {
        c.kind = PrimitiveKind::Arc;
        c.center = vec3_from_json(jc.at("center"));
        c.axis = vec3_from_json(jc.at("axis"));
        c.radius = jc.at("radius").get<double>();
        c.angle0 = jc.at("angle0").get<double>();
        c.angle1 = jc.at("angle1").get<double>();
      } else if (type == "helix") {
        c.kind = PrimitiveKind::Helix;
        c.center = vec3_from_json(jc.at("center"));
        c.axis = vec3_from_json(jc.at("axis"));
        c.radius = jc.at("radius").get<double>();
        c.pitch = jc.at("pitch").get<double>();
        c.turns = jc.at("turns").get<double>();
      } else if (type == "polyline") {
        c.kind = PrimitiveKind::Polyline;
        for (const auto& jp : jc.at("points")) {
          c.points.push_back(vec3_from_json(jp));
        }
      } else {
        throw InvalidSpec("unknown primitive type: " + type);
      }
      spec.curves.push_back(c);
    }
    if (j.contains("rig")) {
      const auto& r = j["rig"];
      if (r.contains("count")) spec.rig.count = r["count"].get<int>();
      if (r.contains("radius_factor"))
        spec.rig.radius_factor = r["radius_factor"].get<double>();
      if (r.contains("elevation_deg"))
        spec.rig.elevation_deg = r["elevation_deg"].get<double>();
      if (r.contains("alternate_elevation"))
        spec.rig.alternate_elevation = r["alternate_elevation"].get<bool>();
      if (r.contains("width")) spec.rig.width = r["width"].get<int>();
      if (r.contains("height")) spec.rig.height = r["height"].get<int>();
      if (r.contains("focal")) spec.rig.focal = r["focal"].get<double>();
      if (r.contains("look_at")) {
        spec.rig.look_at = vec3_from_json(r["look_at"]);
        spec.rig.auto_look_at = false;
      }
    }
    if (j.contains("noise_sigma")) spec.noise_sigma = j["noise_sigma"].get<double>();
    if (j.contains("fragmentation"))
      spec.fragmentation = j["fragmentation"].get<double>();
    if (j.contains("dropout")) spec.dropout = j["dropout"].get<double>();
    if (j.contains("outliers")) spec.outliers = j["outliers"].get<int>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("edgel_spacing_px"))
      spec.edgel_spacing_px = j["edgel_spacing_px"].get<double>();
    if (j.contains("coarse_samples"))
      spec.coarse_samples = j["coarse_samples"].get<int>();
  } catch (const json::exception& e) {
    throw InvalidSpec("scene spec field error in " + path + ": " + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace curvedraw
