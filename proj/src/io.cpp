#include "curvedraw/io.hpp"

#include <array>

#include "curvedraw/eval.hpp"
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace curvedraw {

namespace {

// All numeric output goes through %.17g so round trips are bit-exact and
// locale-independent.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& token, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str()) {
    throw IoError(where + ": expected a number, got '" + token + "'");
  }
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  return out;
}

std::string first_token(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string tok;
  in >> tok;
  return tok;
}

}  // namespace

std::vector<Camera> load_cameras(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<Camera> cameras;
  std::vector<double> numbers;
  int pending_view = -1;
  bool have_header = false;
  std::string line;
  auto flush = [&]() {
    if (numbers.empty()) return;
    if (numbers.size() != 12) {
      throw IoError(path + ": camera block has " +
                    std::to_string(numbers.size()) + " values, expected 12");
    }
    Camera cam;
    cam.view_id = have_header ? pending_view
                              : static_cast<int>(cameras.size());
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        cam.projection(r, c) = numbers[r * 4 + c];
      }
    }
    cameras.push_back(cam);
    numbers.clear();
  };
  while (std::getline(in, line)) {
    if (line.rfind("# view", 0) == 0) {
      flush();
      have_header = true;
      pending_view = std::atoi(line.c_str() + 6);
      continue;
    }
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) numbers.push_back(parse_double(tok, path));
  }
  flush();
  if (cameras.empty()) throw IoError(path + ": no cameras found");
  return cameras;
}

Camera load_camera(const std::string& path, int view_id) {
  std::vector<Camera> cams = load_cameras(path);
  if (cams.size() != 1) {
    throw IoError(path + ": expected a single camera");
  }
  cams[0].view_id = view_id;
  return cams[0];
}

void save_cameras(const std::vector<Camera>& cameras,
                  const std::string& path) {
  std::ofstream out = open_out(path);
  for (const auto& cam : cameras) {
    out << "# view " << cam.view_id << "\n";
    for (int r = 0; r < 3; ++r) {
      out << fmt(cam.projection(r, 0)) << " " << fmt(cam.projection(r, 1))
          << " " << fmt(cam.projection(r, 2)) << " "
          << fmt(cam.projection(r, 3)) << "\n";
    }
  }
}

ViewData load_fragments(const std::string& path) {
  std::ifstream in = open_in(path);
  ViewData view;
  std::string tok;
  if (!(in >> tok) || tok != "view") {
    throw IoError(path + ": expected 'view' header");
  }
  in >> view.view_id >> view.width >> view.height;
  while (in >> tok) {
    if (tok != "curve") throw IoError(path + ": expected 'curve' block");
    Curve2D curve;
    int n = 0;
    in >> curve.curve_id >> n;
    if (n < 2) throw IoError(path + ": curve with fewer than 2 edgels");
    curve.view_id = view.view_id;
    curve.edgels.resize(n);
    for (int i = 0; i < n; ++i) {
      std::string sx, sy, st;
      if (!(in >> sx >> sy >> st)) {
        throw IoError(path + ": truncated curve block");
      }
      curve.edgels[i].position = {parse_double(sx, path),
                                  parse_double(sy, path)};
      curve.edgels[i].orientation = parse_double(st, path);
      curve.edgels[i].view_id = view.view_id;
    }
    view.curves.push_back(std::move(curve));
  }
  view.renumber();
  return view;
}

void save_fragments(const ViewData& view, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "view " << view.view_id << " " << view.width << " " << view.height
      << "\n";
  for (const auto& curve : view.curves) {
    out << "curve " << curve.curve_id << " " << curve.size() << "\n";
    for (const auto& e : curve.edgels) {
      out << fmt(e.position.x()) << " " << fmt(e.position.y()) << " "
          << fmt(e.orientation) << "\n";
    }
  }
}

std::vector<Curve3D> load_curves3d(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string tok;
  int count = 0;
  if (!(in >> tok >> count) || tok != "curves3d") {
    throw IoError(path + ": expected 'curves3d' header");
  }
  std::vector<Curve3D> curves;
  curves.reserve(count);
  for (int c = 0; c < count; ++c) {
    Curve3D curve;
    int n = 0;
    if (!(in >> tok >> curve.curve_id >> curve.primary_view >>
          curve.primary_curve >> n) ||
        tok != "curve") {
      throw IoError(path + ": expected 'curve' block");
    }
    curve.samples.resize(n);
    for (int i = 0; i < n; ++i) {
      Sample3D& s = curve.samples[i];
      std::string sx, sy, sz, sr;
      int k = 0;
      if (!(in >> sx >> sy >> sz >> sr >> k)) {
        throw IoError(path + ": truncated sample line");
      }
      s.position = {parse_double(sx, path), parse_double(sy, path),
                    parse_double(sz, path)};
      s.reliability = parse_double(sr, path);
      for (int q = 0; q < k; ++q) {
        int v = 0, e = 0;
        if (!(in >> v >> e)) throw IoError(path + ": truncated support list");
        s.add_support(v, e);
      }
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

void save_curves3d(const std::vector<Curve3D>& curves,
                   const std::string& path) {
  std::ofstream out = open_out(path);
  out << "curves3d " << curves.size() << "\n";
  for (const auto& curve : curves) {
    out << "curve " << curve.curve_id << " " << curve.primary_view << " "
        << curve.primary_curve << " " << curve.size() << "\n";
    for (const auto& s : curve.samples) {
      int k = 0;
      for (const auto& [v, ids] : s.support) k += static_cast<int>(ids.size());
      out << fmt(s.position.x()) << " " << fmt(s.position.y()) << " "
          << fmt(s.position.z()) << " " << fmt(s.reliability) << " " << k;
      for (const auto& [v, ids] : s.support) {
        for (int id : ids) out << " " << v << " " << id;
      }
      out << "\n";
    }
  }
}

std::vector<std::vector<Eigen::Vector3d>> load_polylines(
    const std::string& path) {
  std::ifstream in = open_in(path);
  std::string tok;
  int count = 0;
  if (!(in >> tok >> count) || tok != "polylines") {
    throw IoError(path + ": expected 'polylines' header");
  }
  std::vector<std::vector<Eigen::Vector3d>> curves;
  curves.reserve(count);
  for (int c = 0; c < count; ++c) {
    int id = 0, n = 0;
    if (!(in >> tok >> id >> n) || tok != "curve") {
      throw IoError(path + ": expected 'curve' block");
    }
    std::vector<Eigen::Vector3d> pts(n);
    for (int i = 0; i < n; ++i) {
      std::string sx, sy, sz;
      if (!(in >> sx >> sy >> sz)) throw IoError(path + ": truncated curve");
      pts[i] = {parse_double(sx, path), parse_double(sy, path),
                parse_double(sz, path)};
    }
    curves.push_back(std::move(pts));
  }
  return curves;
}

void save_polylines(const std::vector<std::vector<Eigen::Vector3d>>& curves,
                    const std::string& path) {
  std::ofstream out = open_out(path);
  out << "polylines " << curves.size() << "\n";
  for (size_t c = 0; c < curves.size(); ++c) {
    out << "curve " << c << " " << curves[c].size() << "\n";
    for (const auto& p : curves[c]) {
      out << fmt(p.x()) << " " << fmt(p.y()) << " " << fmt(p.z()) << "\n";
    }
  }
}

DrawingGraph load_drawing(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string tok;
  int n_nodes = 0, n_links = 0;
  if (!(in >> tok >> n_nodes >> n_links) || tok != "drawing") {
    throw IoError(path + ": expected 'drawing' header");
  }
  DrawingGraph graph;
  graph.nodes.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    DrawingNode& node = graph.nodes[i];
    std::string sx, sy, sz;
    if (!(in >> tok >> node.id >> sx >> sy >> sz >> node.degree >>
          node.cluster_id) ||
        tok != "node") {
      throw IoError(path + ": expected 'node' line");
    }
    node.position = {parse_double(sx, path), parse_double(sy, path),
                     parse_double(sz, path)};
  }
  graph.links.resize(n_links);
  for (int i = 0; i < n_links; ++i) {
    DrawingLink& link = graph.links[i];
    int n = 0;
    if (!(in >> tok >> link.id >> link.node_a >> link.node_b >>
          link.cluster_id >> n) ||
        tok != "link") {
      throw IoError(path + ": expected 'link' line");
    }
    link.samples.resize(n);
    for (int s = 0; s < n; ++s) {
      std::string sx, sy, sz;
      if (!(in >> sx >> sy >> sz)) throw IoError(path + ": truncated link");
      link.samples[s] = {parse_double(sx, path), parse_double(sy, path),
                         parse_double(sz, path)};
    }
  }
  return graph;
}

void save_drawing(const DrawingGraph& graph, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "drawing " << graph.nodes.size() << " " << graph.links.size() << "\n";
  for (const auto& node : graph.nodes) {
    out << "node " << node.id << " " << fmt(node.position.x()) << " "
        << fmt(node.position.y()) << " " << fmt(node.position.z()) << " "
        << node.degree << " " << node.cluster_id << "\n";
  }
  for (const auto& link : graph.links) {
    out << "link " << link.id << " " << link.node_a << " " << link.node_b
        << " " << link.cluster_id << " " << link.samples.size() << "\n";
    for (const auto& p : link.samples) {
      out << fmt(p.x()) << " " << fmt(p.y()) << " " << fmt(p.z()) << "\n";
    }
  }
}

void export_ply(const DrawingGraph& graph, const std::string& path) {
  // Distinct link colors from a fixed palette; junctions as white markers.
  static const std::array<std::array<int, 3>, 12> palette = {{
      {230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
      {245, 130, 48},  {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
      {210, 245, 60},  {250, 190, 190}, {0, 128, 128},  {170, 110, 40},
  }};

  std::size_t n_vertices = 0, n_edges = 0;
  for (const auto& link : graph.links) {
    n_vertices += link.samples.size();
    n_edges += link.samples.size() - 1;
  }
  std::size_t n_junctions = 0;
  for (const auto& node : graph.nodes) {
    if (node.degree >= 3) ++n_junctions;
  }

  std::ofstream out = open_out(path);
  out << "ply\nformat ascii 1.0\ncomment 3d curve drawing\n";
  out << "element vertex " << (n_vertices + n_junctions) << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element edge " << n_edges << "\n";
  out << "property int vertex1\nproperty int vertex2\n";
  out << "end_header\n";

  std::size_t base = 0;
  std::ostringstream edges;
  for (const auto& link : graph.links) {
    const auto& rgb = palette[static_cast<std::size_t>(link.id) % palette.size()];
    for (const auto& p : link.samples) {
      out << fmt(p.x()) << " " << fmt(p.y()) << " " << fmt(p.z()) << " "
          << rgb[0] << " " << rgb[1] << " " << rgb[2] << "\n";
    }
    for (std::size_t s = 0; s + 1 < link.samples.size(); ++s) {
      edges << (base + s) << " " << (base + s + 1) << "\n";
    }
    base += link.samples.size();
  }
  for (const auto& node : graph.nodes) {
    if (node.degree < 3) continue;
    out << fmt(node.position.x()) << " " << fmt(node.position.y()) << " "
        << fmt(node.position.z()) << " 255 255 255\n";
  }
  out << edges.str();
}

std::vector<std::vector<Eigen::Vector3d>> load_any_curves(
    const std::string& path) {
  const std::string tok = first_token(path);
  if (tok == "drawing") return graph_polylines(load_drawing(path));
  if (tok == "polylines") return load_polylines(path);
  if (tok == "curves3d") {
    std::vector<std::vector<Eigen::Vector3d>> out;
    for (const auto& curve : load_curves3d(path)) {
      std::vector<Eigen::Vector3d> pts;
      pts.reserve(curve.samples.size());
      for (const auto& s : curve.samples) pts.push_back(s.position);
      out.push_back(std::move(pts));
    }
    return out;
  }
  throw IoError(path + ": unrecognized curve file header '" + tok + "'");
}

}  // namespace curvedraw
