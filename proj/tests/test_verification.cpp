#include "curvedraw/verification.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "curvedraw/drawing.hpp"
#include "curvedraw/synth.hpp"

using namespace curvedraw;

namespace {

Camera axis_camera(const Eigen::Vector3d& t, int view_id) {
  Camera cam;
  cam.view_id = view_id;
  cam.projection.leftCols<3>() = Eigen::Matrix3d::Identity();
  cam.projection.col(3) = t;
  return cam;
}

// A rectified three-camera rig observing a straight segment at z = 5:
// views 0/1 are the hypothesis pair (baseline x), view 2 confirms with a
// vertical baseline, making its epipolar lines perpendicular to the
// reprojected curve (tangency weight 1).
struct RectifiedFixture {
  std::vector<Camera> cameras;
  std::vector<ViewData> views;
  CurvePairHypothesis hyp;

  explicit RectifiedFixture(int n_samples, int n_supported,
                            double world_len = 50.0) {
    cameras = {axis_camera({0, 0, 0}, 0), axis_camera({-1, 0, 0}, 1),
               axis_camera({0, -1, 0}, 2)};
    views.resize(3);
    for (int v = 0; v < 3; ++v) {
      views[v].view_id = v;
      views[v].width = 400;
      views[v].height = 400;
    }
    hyp.view1 = 0;
    hyp.view2 = 1;
    hyp.curve1_id = 0;
    hyp.curve2_id = 0;
    hyp.reconstruction.primary_view = 0;
    hyp.reconstruction.primary_curve = 0;

    Curve2D c0, c1, c2;
    for (int i = 0; i < n_samples; ++i) {
      const Eigen::Vector3d x(world_len * i / (n_samples - 1), 0.0, 5.0);
      Sample3D s;
      s.position = x;
      s.reliability = 1.0;
      s.add_support(0, i);
      s.add_support(1, i);
      hyp.reconstruction.samples.push_back(s);

      Edgel2D e0, e1, e2;
      e0.position = project(cameras[0], x);
      e1.position = project(cameras[1], x);
      e2.position = project(cameras[2], x);
      e0.orientation = e1.orientation = e2.orientation = 0.0;
      c0.edgels.push_back(e0);
      c1.edgels.push_back(e1);
      if (i < n_supported) c2.edgels.push_back(e2);
    }
    views[0].curves.push_back(c0);
    views[1].curves.push_back(c1);
    if (!c2.edgels.empty()) views[2].curves.push_back(c2);
    for (auto& v : views) v.renumber();
  }
};

}  // namespace

TEST_CASE("edge_support gates on distance and orientation") {
  RectifiedFixture fix(20, 20);
  const EdgelIndex index(fix.views, 2.0);
  const Params params;
  const Eigen::Vector2d at = fix.views[2].curves[0].edgels[5].position;

  // Edgel at distance 0 with aligned orientation.
  const EdgeSupport hit =
      edge_support(at, {1.0, 0.0}, 2, index, params.delta_d,
                   params.delta_theta_deg * M_PI / 180.0);
  CHECK(hit.phi == 1.0);
  CHECK(!hit.edgel_ids.empty());

  // Nearest edgel at 2 * delta_d.
  const EdgeSupport miss =
      edge_support(at + Eigen::Vector2d(0.0, 2.0 * params.delta_d),
                   {1.0, 0.0}, 2, index, params.delta_d,
                   params.delta_theta_deg * M_PI / 180.0);
  CHECK(miss.phi == 0.0);

  // In range but rotated by pi/2.
  const EdgeSupport wrong_angle =
      edge_support(at, {0.0, 1.0}, 2, index, params.delta_d,
                   params.delta_theta_deg * M_PI / 180.0);
  CHECK(wrong_angle.phi == 0.0);
}

TEST_CASE("view_support: full support integrates to the reprojected length") {
  RectifiedFixture fix(101, 101);
  const EdgelIndex index(fix.views, 2.0);
  const Params params;
  const ViewSupportEntry entry =
      view_support(fix.hyp, 2, fix.cameras, index, params);

  // Reprojected arc length in view 2.
  double len = 0.0;
  for (int i = 0; i + 1 < 101; ++i) {
    len += (project(fix.cameras[2], fix.hyp.reconstruction.samples[i + 1].position) -
            project(fix.cameras[2], fix.hyp.reconstruction.samples[i].position))
               .norm();
  }
  CHECK(entry.total == doctest::Approx(len).epsilon(1e-9));
}

TEST_CASE("view_support: no support integrates to zero") {
  RectifiedFixture fix(50, 0);
  // View 2 has no curve at all; keep it in the index as an empty view.
  const EdgelIndex index(fix.views, 2.0);
  const Params params;
  const ViewSupportEntry entry =
      view_support(fix.hyp, 2, fix.cameras, index, params);
  CHECK(entry.total == 0.0);
}

TEST_CASE("view_support: half-supported straight curve, hand trapezoid") {
  // 101 samples, reprojected length 10 in view 2, first 51 supported:
  // 50 full segments of 0.1 plus half a boundary segment.
  RectifiedFixture fix(101, 51);
  const EdgelIndex index(fix.views, 2.0);
  Params params;
  // Keep the distance gate below the sample spacing so the supported set
  // is exactly the first half.
  params.delta_d = 0.04;
  const ViewSupportEntry entry =
      view_support(fix.hyp, 2, fix.cameras, index, params);
  const double spacing = 10.0 / 100.0;
  CHECK(std::abs(entry.total - 5.0) <= spacing + 1e-9);
  CHECK(entry.total == doctest::Approx(5.0 + 0.5 * spacing).epsilon(1e-6));
}

TEST_CASE("aggregate_support follows the Iverson-gated sum") {
  SupportProfile profile;
  for (double total : {10.0, 2.0, 8.0}) {
    ViewSupportEntry e;
    e.total = total;
    profile.views.push_back(e);
  }
  CHECK(aggregate_support(profile, 5.0) == doctest::Approx(18.0));
  CHECK(aggregate_support(profile, 10.0) == doctest::Approx(0.0));

  SupportProfile boundary;
  ViewSupportEntry e;
  e.total = 5.0;
  boundary.views.push_back(e);
  // Strict inequality: S^v == tau_v contributes nothing.
  CHECK(aggregate_support(boundary, 5.0) == 0.0);
}

TEST_CASE("aggregate_support equals a direct formula oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(0.0, 20.0);
  std::uniform_int_distribution<int> n_views(1, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    SupportProfile profile;
    const int n = n_views(rng);
    for (int v = 0; v < n; ++v) {
      ViewSupportEntry e;
      e.total = uni(rng);
      profile.views.push_back(e);
    }
    const double tau = uni(rng) * 0.5;
    double expected = 0.0;
    for (const auto& e : profile.views) {
      expected += (e.total > tau ? 1.0 : 0.0) * e.total;
    }
    CHECK(aggregate_support(profile, tau) == expected);
  }
}

namespace {

// Profile with hand-set per-sample view counts.
SupportProfile fabricated_profile(const std::vector<int>& counts,
                                  const std::vector<double>& reliability) {
  SupportProfile p;
  p.view_count = counts;
  p.reliability = reliability;
  return p;
}

CurvePairHypothesis straight_hypothesis(int n) {
  CurvePairHypothesis hyp;
  hyp.view1 = 0;
  hyp.view2 = 1;
  hyp.reconstruction.primary_view = 0;
  hyp.reconstruction.primary_curve = 0;
  for (int i = 0; i < n; ++i) {
    Sample3D s;
    s.position = {0.1 * i, 0.0, 0.0};
    s.reliability = 1.0;
    s.add_support(0, i);
    s.add_support(1, i);
    hyp.reconstruction.samples.push_back(s);
  }
  return hyp;
}

}  // namespace

TEST_CASE("localize: fully supported run passes through unchanged") {
  const CurvePairHypothesis hyp = straight_hypothesis(20);
  Params params;
  params.n_min_views = 3;
  const SupportProfile profile = fabricated_profile(
      std::vector<int>(20, 5), std::vector<double>(20, 1.0));
  const auto out = localize_supported_portions(hyp, profile, params);
  REQUIRE(out.size() == 1);
  CHECK(out[0].size() == 20);
}

TEST_CASE("localize: only the supported front half is kept") {
  const CurvePairHypothesis hyp = straight_hypothesis(20);
  Params params;
  params.n_min_views = 3;
  std::vector<int> counts(20, 0);
  for (int i = 0; i < 10; ++i) counts[i] = 5;
  const auto out = localize_supported_portions(
      hyp, fabricated_profile(counts, std::vector<double>(20, 1.0)), params);
  REQUIRE(out.size() == 1);
  CHECK(out[0].size() == 10);
  CHECK(out[0].samples.front().position.x() == doctest::Approx(0.0));
  CHECK(out[0].samples.back().position.x() == doctest::Approx(0.9));
}

TEST_CASE("localize: support from too few views yields nothing") {
  const CurvePairHypothesis hyp = straight_hypothesis(20);
  Params params;
  params.n_min_views = 3;
  const auto out = localize_supported_portions(
      hyp, fabricated_profile(std::vector<int>(20, 2),
                              std::vector<double>(20, 1.0)),
      params);
  CHECK(out.empty());
}

TEST_CASE("localize: near-tangency samples bridge qualified runs") {
  const CurvePairHypothesis hyp = straight_hypothesis(20);
  Params params;
  params.n_min_views = 3;
  params.min_run = 5;
  std::vector<int> counts(20, 5);
  std::vector<double> reliability(20, 1.0);
  // Samples 8..11 lose countable support but sit near an epipolar tangency.
  for (int i = 8; i <= 11; ++i) {
    counts[i] = 0;
    reliability[i] = 0.01;
  }
  const auto out = localize_supported_portions(
      hyp, fabricated_profile(counts, reliability), params);
  REQUIRE(out.size() == 1);
  CHECK(out[0].size() == 20);

  // The same hole without the tangency excuse splits the curve.
  std::fill(reliability.begin(), reliability.end(), 1.0);
  const auto split = localize_supported_portions(
      hyp, fabricated_profile(counts, reliability), params);
  REQUIRE(split.size() == 2);
  CHECK(split[0].size() == 8);
  CHECK(split[1].size() == 8);
}

TEST_CASE("localize drops runs shorter than min_run") {
  const CurvePairHypothesis hyp = straight_hypothesis(20);
  Params params;
  params.n_min_views = 3;
  params.min_run = 5;
  std::vector<int> counts(20, 0);
  for (int i = 0; i < 4; ++i) counts[i] = 5;   // too short
  for (int i = 10; i < 17; ++i) counts[i] = 5; // long enough
  const auto out = localize_supported_portions(
      hyp, fabricated_profile(counts, std::vector<double>(20, 1.0)), params);
  REQUIRE(out.size() == 1);
  CHECK(out[0].size() == 7);
}

TEST_CASE("verify_all on a clean synthetic scene covers the ground truth") {
  SceneSpec spec = make_segment_scene({-0.4, -0.2, 0.0}, {0.5, 0.3, 0.1}, 8);
  CurvePrimitive arc;
  arc.kind = PrimitiveKind::Arc;
  arc.radius = 0.4;
  arc.center = {0.0, 0.0, 0.4};
  arc.angle0 = 0.3;
  arc.angle1 = 2.4;
  spec.curves.push_back(arc);
  const SyntheticScene scene = generate_scene(spec);
  const EdgelIndex index(scene.views, 2.0);
  Params params;

  std::vector<CurvePairHypothesis> hyps;
  for (const auto& [v1, v2] : enumerate_view_pairs(8, "exhaustive")) {
    auto batch = generate_hypotheses(scene.views[v1], scene.views[v2],
                                     scene.cameras[v1], scene.cameras[v2],
                                     params);
    hyps.insert(hyps.end(), batch.begin(), batch.end());
  }
  REQUIRE(!hyps.empty());
  const auto verified = verify_all(hyps, scene.cameras, index, params);
  REQUIRE(!verified.empty());

  // Every verified sample lies near the ground truth (no spurious output)
  // and every sample retains enough supporting views.
  const double tau = 0.005 * scene.diameter();
  for (const auto& curve : verified) {
    int with_views = 0;
    for (const auto& s : curve.samples) {
      double best = 1e300;
      for (const auto& gt : scene.ground_truth) {
        const ClosestPoint cp = closest_point_brute(gt, s.position);
        best = std::min(best, cp.distance);
      }
      CHECK(best < tau);
      int n_support_views = 0;
      for (const auto& [view, ids] : s.support) {
        n_support_views += ids.empty() ? 0 : 1;
      }
      if (n_support_views >= 2 + params.n_min_views) ++with_views;
    }
    CHECK(with_views > 0);
  }

  // Coverage: both ground-truth curves have nearby verified geometry.
  for (const auto& gt : scene.ground_truth) {
    int covered = 0, total = 0;
    for (size_t k = 0; k < gt.size(); k += 32) {
      ++total;
      double best = 1e300;
      for (const auto& curve : verified) {
        for (const auto& s : curve.samples) {
          best = std::min(best, (s.position - gt[k]).norm());
        }
      }
      covered += best < tau ? 1 : 0;
    }
    CHECK(static_cast<double>(covered) / total > 0.85);
  }
}

TEST_CASE("verify_all: zero hypotheses give empty output") {
  const SyntheticScene scene =
      generate_scene(make_segment_scene({0, 0, 0}, {1, 0, 0}, 4));
  const EdgelIndex index(scene.views, 2.0);
  CHECK(verify_all({}, scene.cameras, index, Params{}).empty());
}

TEST_CASE("verify_all kills mispaired parallel-line hypotheses") {
  // Fig 3b scenario: two parallel 3D segments; pairing A in view 0 with B
  // in view 1 yields a wrong 3D line that must not survive a 3-view gate.
  SceneSpec spec;
  CurvePrimitive a;
  a.p0 = {-0.5, 0.0, 0.15};
  a.p1 = {0.5, 0.0, 0.15};
  CurvePrimitive b;
  b.p0 = {-0.5, 0.0, -0.15};
  b.p1 = {0.5, 0.0, -0.15};
  spec.curves = {a, b};
  spec.rig.count = 8;
  const SyntheticScene scene = generate_scene(spec);
  const EdgelIndex index(scene.views, 2.0);
  Params params;
  params.tau_overlap = 0.3;

  const auto hyps =
      generate_hypotheses(scene.views[0], scene.views[1], scene.cameras[0],
                          scene.cameras[1], params);
  std::vector<CurvePairHypothesis> mispaired;
  for (const auto& h : hyps) {
    if (scene.fragment_source[0][h.curve1_id] !=
        scene.fragment_source[1][h.curve2_id]) {
      mispaired.push_back(h);
    }
  }
  if (!mispaired.empty()) {
    const auto verified =
        verify_all(mispaired, scene.cameras, index, params);
    CHECK(verified.empty());
  }
}

TEST_CASE("verification kernel: parallel output equals the serial reference") {
  SceneSpec spec = make_cube_scene(1.0, 6);
  spec.noise_sigma = 0.5;
  spec.seed = 3;
  const SyntheticScene scene = generate_scene(spec);
  const EdgelIndex index(scene.views, 2.0);
  Params params;
  std::vector<CurvePairHypothesis> hyps;
  for (const auto& [v1, v2] : enumerate_view_pairs(6, "window", 1)) {
    auto batch = generate_hypotheses(scene.views[v1], scene.views[v2],
                                     scene.cameras[v1], scene.cameras[v2],
                                     params);
    hyps.insert(hyps.end(), batch.begin(), batch.end());
  }
  const auto parallel = verify_all(hyps, scene.cameras, index, params);
  const auto serial = verify_all_serial(hyps, scene.cameras, index, params);
  REQUIRE(parallel.size() == serial.size());
  for (size_t i = 0; i < parallel.size(); ++i) {
    REQUIRE(parallel[i].size() == serial[i].size());
    for (int s = 0; s < parallel[i].size(); ++s) {
      CHECK(parallel[i].samples[s].position ==
            serial[i].samples[s].position);
      CHECK(parallel[i].samples[s].support == serial[i].samples[s].support);
    }
  }
}

TEST_CASE("monotonicity: stricter gates never add arc length") {
  SceneSpec spec = make_cube_scene(1.0, 7);
  spec.noise_sigma = 0.7;
  spec.seed = 11;
  const SyntheticScene scene = generate_scene(spec);
  const EdgelIndex index(scene.views, 2.0);
  Params params;
  std::vector<CurvePairHypothesis> hyps;
  for (const auto& [v1, v2] : enumerate_view_pairs(7, "window", 2)) {
    auto batch = generate_hypotheses(scene.views[v1], scene.views[v2],
                                     scene.cameras[v1], scene.cameras[v2],
                                     params);
    hyps.insert(hyps.end(), batch.begin(), batch.end());
  }
  double prev = 1e300;
  for (int n_min = 2; n_min <= 5; ++n_min) {
    params.n_min_views = n_min;
    const auto verified = verify_all(hyps, scene.cameras, index, params);
    double total = 0.0;
    for (const auto& c : verified) total += arc_length(c);
    CHECK(total <= prev + 1e-9);
    prev = total;
  }
}
