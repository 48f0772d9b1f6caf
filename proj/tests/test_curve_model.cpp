#include "curvedraw/curve_model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace curvedraw;

namespace {

Curve3D polyline_curve(const std::vector<Eigen::Vector3d>& pts) {
  Curve3D c;
  for (const auto& p : pts) {
    Sample3D s;
    s.position = p;
    c.samples.push_back(s);
  }
  return c;
}

Curve3D circle_curve(int n, double radius = 1.0) {
  std::vector<Eigen::Vector3d> pts;
  for (int k = 0; k <= n; ++k) {
    const double a = 2.0 * M_PI * k / n;
    pts.push_back({radius * std::cos(a), radius * std::sin(a), 0.0});
  }
  return polyline_curve(pts);
}

}  // namespace

TEST_CASE("arc_length: segment, square, circle") {
  CHECK(arc_length(polyline_curve({{0, 0, 0}, {1, 0, 0}})) ==
        doctest::Approx(1.0));
  CHECK(arc_length(polyline_curve({{0, 0, 0},
                                   {1, 0, 0},
                                   {1, 1, 0},
                                   {0, 1, 0},
                                   {0, 0, 0}})) == doctest::Approx(4.0));
  // Analytic circumference oracle.
  CHECK(arc_length(circle_curve(1000)) ==
        doctest::Approx(2.0 * M_PI).epsilon(1e-4));
}

TEST_CASE("resample_uniform: straight segment") {
  const Curve3D seg = polyline_curve({{0, 0, 0}, {1, 0, 0}});
  const Curve3D re = resample_uniform(seg, 0.25);
  REQUIRE(re.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK((re.samples[i].position - Eigen::Vector3d(i * 0.25, 0, 0)).norm() <
          1e-12);
  }
}

TEST_CASE("resample_uniform preserves endpoints and arc length") {
  const Curve3D circle = circle_curve(500);
  const double len = arc_length(circle);
  const double spacing = len / 137.0;
  const Curve3D re = resample_uniform(circle, spacing);
  CHECK((re.samples.front().position - circle.samples.front().position)
            .norm() == doctest::Approx(0.0));
  CHECK((re.samples.back().position - circle.samples.back().position)
            .norm() == doctest::Approx(0.0));
  CHECK(std::abs(arc_length(re) - len) < spacing);
  CHECK(std::abs(arc_length(re) - len) < 0.001 * len);
}

TEST_CASE("resample_uniform twice is idempotent") {
  const Curve3D circle = circle_curve(800);
  const double spacing = arc_length(circle) / 200.0;
  const Curve3D once = resample_uniform(circle, spacing);
  const Curve3D twice = resample_uniform(once, spacing);
  REQUIRE(once.size() == twice.size());
  for (int i = 0; i < once.size(); ++i) {
    CHECK((once.samples[i].position - twice.samples[i].position).norm() <
          1e-9);
  }
}

TEST_CASE("resample_uniform rejects oversized spacing") {
  const Curve3D seg = polyline_curve({{0, 0, 0}, {1, 0, 0}});
  CHECK_THROWS_AS(resample_uniform(seg, 2.0), SpacingTooLarge);
}

TEST_CASE("resample_uniform inherits support from the nearest sample") {
  Curve3D seg = polyline_curve({{0, 0, 0}, {1, 0, 0}});
  seg.samples[0].add_support(0, 10);
  seg.samples[1].add_support(0, 20);
  const Curve3D re = resample_uniform(seg, 0.5);
  REQUIRE(re.size() == 3);
  CHECK(re.samples[0].support.at(0) == std::vector<int>{10});
  CHECK(re.samples[2].support.at(0) == std::vector<int>{20});
}

namespace {

ViewData grid_view(std::mt19937_64& rng, int n_edgels, int view_id = 0) {
  ViewData view;
  view.view_id = view_id;
  view.width = 640;
  view.height = 480;
  std::uniform_real_distribution<double> ux(0.0, 640.0), uy(0.0, 480.0);
  Curve2D curve;
  curve.curve_id = 0;
  for (int i = 0; i < n_edgels; ++i) {
    Edgel2D e;
    e.position = {ux(rng), uy(rng)};
    e.orientation = 0.0;
    curve.edgels.push_back(e);
  }
  view.curves.push_back(std::move(curve));
  view.renumber();
  return view;
}

}  // namespace

TEST_CASE("EdgelIndex: empty view and single edgel") {
  ViewData view;
  view.view_id = 3;
  view.width = 100;
  view.height = 100;
  view.renumber();
  const EdgelIndex index({view}, 2.0);
  CHECK(index.query(3, {50.0, 50.0}, 10.0).empty());
  CHECK_THROWS_AS(index.query(4, {0.0, 0.0}, 1.0), UnknownView);

  ViewData one;
  one.view_id = 0;
  one.width = 100;
  one.height = 100;
  Curve2D c;
  c.curve_id = 0;
  Edgel2D e;
  e.position = {10.0, 20.0};
  c.edgels.assign(2, e);
  c.edgels[1].position = {11.0, 20.0};
  one.curves.push_back(c);
  one.renumber();
  const EdgelIndex idx({one}, 2.0);
  CHECK(idx.query(0, {10.0, 20.0}, 0.5) == std::vector<int>{0});
}

TEST_CASE("EdgelIndex matches the linear-scan oracle") {
  std::mt19937_64 rng(99);
  std::vector<ViewData> views;
  views.push_back(grid_view(rng, 10000));
  const EdgelIndex index(views, 2.0);
  std::uniform_real_distribution<double> ux(-10.0, 650.0), uy(-10.0, 490.0);
  std::uniform_real_distribution<double> ur(0.1, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector2d p(ux(rng), uy(rng));
    const double radius = ur(rng);
    // Linear-scan oracle.
    std::vector<int> expected;
    for (const auto& curve : views[0].curves) {
      for (const auto& e : curve.edgels) {
        if ((e.position - p).norm() <= radius) expected.push_back(e.edgel_id);
      }
    }
    std::sort(expected.begin(), expected.end());
    CHECK(index.query(0, p, radius) == expected);
  }
}

TEST_CASE("EdgelIndex locate maps ids back to curve slots") {
  ViewData view;
  view.view_id = 0;
  view.width = 50;
  view.height = 50;
  for (int c = 0; c < 3; ++c) {
    Curve2D curve;
    curve.curve_id = c;
    for (int i = 0; i < 4; ++i) {
      Edgel2D e;
      e.position = {double(c * 10 + i), 5.0};
      curve.edgels.push_back(e);
    }
    view.curves.push_back(curve);
  }
  view.renumber();
  const EdgelIndex index({view}, 2.0);
  const EdgelLocation loc = index.locate(0, 6);
  CHECK(loc.curve_index == 1);
  CHECK(loc.index_in_curve == 2);
  CHECK(index.edgel(0, 6).position.x() == doctest::Approx(12.0));
}
