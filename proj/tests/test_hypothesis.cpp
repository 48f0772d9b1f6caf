#include "curvedraw/hypothesis.hpp"

#include <doctest.h>

#include <cmath>

#include "curvedraw/synth.hpp"

using namespace curvedraw;

namespace {

SyntheticScene two_view_scene(const CurvePrimitive& prim,
                              double separation_deg = 30.0) {
  SceneSpec spec;
  spec.curves.push_back(prim);
  spec.rig.count = std::max(2, static_cast<int>(360.0 / separation_deg));
  spec.rig.alternate_elevation = false;
  return generate_scene(spec);
}

CurvePrimitive helix_primitive() {
  CurvePrimitive helix;
  helix.kind = PrimitiveKind::Helix;
  helix.radius = 0.5;
  helix.pitch = 0.4;
  helix.turns = 2.0;
  return helix;
}

}  // namespace

TEST_CASE("epipolar_overlap: same segment in both views overlaps fully") {
  const SyntheticScene scene =
      two_view_scene(CurvePrimitive{}, 45.0);  // default unit segment
  const OverlapResult overlap =
      epipolar_overlap(scene.views[0].curves[0], scene.views[1].curves[0],
                       scene.cameras[0], scene.cameras[1]);
  CHECK(overlap.overlap_fraction > 0.98);
  // Monotone non-decreasing in both coordinates.
  for (size_t i = 1; i < overlap.correspondence.size(); ++i) {
    CHECK(overlap.correspondence[i].first >
          overlap.correspondence[i - 1].first);
    CHECK(overlap.correspondence[i].second >=
          overlap.correspondence[i - 1].second);
  }
}

TEST_CASE("epipolar_overlap: curve outside the epipolar band gives zero") {
  // Rectified pair: epipolar lines are horizontal, so c1's band is its own
  // row range. c2 sits 100 rows away and is never crossed.
  Camera cam1, cam2;
  cam1.view_id = 0;
  cam1.projection.leftCols<3>() = Eigen::Matrix3d::Identity();
  cam1.projection.col(3).setZero();
  cam2 = cam1;
  cam2.view_id = 1;
  cam2.projection(0, 3) = -1.0;

  auto make_curve = [](double y0, int view) {
    Curve2D c;
    c.curve_id = 0;
    c.view_id = view;
    for (int i = 0; i < 20; ++i) {
      Edgel2D e;
      e.position = {0.1 * i, y0 + 0.05 * i};
      e.view_id = view;
      e.edgel_id = i;
      c.edgels.push_back(e);
    }
    return c;
  };
  const Curve2D c1 = make_curve(0.0, 0);
  const Curve2D c2 = make_curve(100.0, 1);
  const OverlapResult overlap = epipolar_overlap(c1, c2, cam1, cam2);
  CHECK(overlap.overlap_fraction == doctest::Approx(0.0));
}

TEST_CASE("epipolar_overlap symmetry within discretization") {
  const SyntheticScene scene = two_view_scene(helix_primitive(), 30.0);
  const auto& c1 = scene.views[0].curves[0];
  const auto& c2 = scene.views[1].curves[0];
  const OverlapResult fwd =
      epipolar_overlap(c1, c2, scene.cameras[0], scene.cameras[1]);
  const OverlapResult bwd =
      epipolar_overlap(c2, c1, scene.cameras[1], scene.cameras[0]);
  CHECK(std::abs(fwd.overlap_fraction * c1.size() -
                 bwd.overlap_fraction * c2.size()) <=
        0.05 * std::max(c1.size(), c2.size()));
}

TEST_CASE("helix correspondence matches the projection oracle") {
  const SyntheticScene scene = two_view_scene(helix_primitive(), 30.0);
  const auto& c1 = scene.views[0].curves[0];
  const auto& c2 = scene.views[1].curves[0];
  const auto& params1 = scene.edgel_params[0][0];
  const auto& params2 = scene.edgel_params[1][0];
  const OverlapResult overlap =
      epipolar_overlap(c1, c2, scene.cameras[0], scene.cameras[1]);
  REQUIRE(overlap.overlap_fraction > 0.5);

  int good = 0;
  const int n2 = c2.size();
  for (const auto& [a, b_stored] : overlap.correspondence) {
    const double b =
        overlap.curve2_reversed ? (n2 - 1) - b_stored : b_stored;
    const int bi =
        std::clamp(static_cast<int>(std::lround(b)), 0, n2 - 1);
    // Ground truth: both edgels must come from nearby curve parameters.
    if (std::abs(params1[a] - params2[bi]) < 0.02) ++good;
  }
  CHECK(static_cast<double>(good) / overlap.correspondence.size() > 0.95);
}

TEST_CASE("generate_hypotheses: single segment gives one exact hypothesis") {
  const SyntheticScene scene = two_view_scene(CurvePrimitive{}, 45.0);
  Params params;
  const auto hyps =
      generate_hypotheses(scene.views[0], scene.views[1], scene.cameras[0],
                          scene.cameras[1], params);
  REQUIRE(hyps.size() == 1);
  const CurvePairHypothesis& hyp = hyps[0];
  CHECK(hyp.overlap_fraction > 0.98);
  REQUIRE(hyp.reconstruction.size() >= 2);
  // The reconstruction lies on the unit segment from the origin along x.
  for (const auto& s : hyp.reconstruction.samples) {
    CHECK(std::abs(s.position.y()) < 1e-6);
    CHECK(std::abs(s.position.z()) < 1e-6);
    CHECK(s.position.x() > -0.001);
    CHECK(s.position.x() < 1.001);
  }
  // Every sample reprojects onto both generating edgels within delta_d.
  for (size_t i = 0; i < hyp.reconstruction.samples.size(); ++i) {
    const auto& s = hyp.reconstruction.samples[i];
    const Eigen::Vector2d r1 = project(scene.cameras[0], s.position);
    const Eigen::Vector2d r2 = project(scene.cameras[1], s.position);
    const int e1 = s.support.at(0).front();
    const int e2 = s.support.at(1).front();
    CHECK((r1 - scene.views[0].curves[0].edgels[e1].position).norm() <
          params.delta_d);
    CHECK((r2 - scene.views[1].curves[0].edgels[e2].position).norm() <
          params.delta_d);
  }
}

TEST_CASE("generate_hypotheses: threshold above 1 gives nothing") {
  const SyntheticScene scene = two_view_scene(CurvePrimitive{}, 45.0);
  Params params;
  params.tau_overlap = 1.01;
  CHECK(generate_hypotheses(scene.views[0], scene.views[1], scene.cameras[0],
                            scene.cameras[1], params)
            .empty());
}

TEST_CASE("generate_hypotheses pairs disjoint curves only with their twin") {
  SceneSpec spec;
  CurvePrimitive a;
  a.p0 = {-0.5, 0.0, 1.5};
  a.p1 = {0.5, 0.0, 1.5};
  CurvePrimitive b;
  b.p0 = {-0.5, 0.0, -1.5};
  b.p1 = {0.5, 0.3, -1.5};
  spec.curves = {a, b};
  spec.rig.count = 8;
  spec.rig.alternate_elevation = false;
  spec.rig.elevation_deg = 5.0;
  const SyntheticScene scene = generate_scene(spec);
  Params params;
  const auto hyps =
      generate_hypotheses(scene.views[0], scene.views[1], scene.cameras[0],
                          scene.cameras[1], params);
  for (const auto& hyp : hyps) {
    CHECK(scene.fragment_source[0][hyp.curve1_id] ==
          scene.fragment_source[1][hyp.curve2_id]);
  }
}

TEST_CASE("enumerate_view_pairs: exhaustive and windowed") {
  const auto three = enumerate_view_pairs(3, "exhaustive");
  CHECK(three == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(enumerate_view_pairs(5, "window", 1).size() == 4);
  CHECK(enumerate_view_pairs(25, "exhaustive").size() == 300);
}
