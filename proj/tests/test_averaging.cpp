#include "curvedraw/averaging.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace curvedraw;

namespace {

// Primary view 0 with one straight curve of n edgels; index for bucket
// ordering.
struct PrimaryFixture {
  std::vector<ViewData> views;
  EdgelIndex index;

  explicit PrimaryFixture(int n_edgels) {
    ViewData view;
    view.view_id = 0;
    view.width = 200;
    view.height = 200;
    Curve2D curve;
    curve.curve_id = 0;
    for (int i = 0; i < n_edgels; ++i) {
      Edgel2D e;
      e.position = {double(i), 100.0};
      curve.edgels.push_back(e);
    }
    view.curves.push_back(curve);
    view.renumber();
    views.push_back(view);
    index = EdgelIndex(views, 2.0);
  }
};

Curve3D curve_over_edgels(int first_edgel, int n, double y_offset,
                          int curve_id) {
  Curve3D c;
  c.curve_id = curve_id;
  c.primary_view = 0;
  c.primary_curve = 0;
  for (int i = 0; i < n; ++i) {
    Sample3D s;
    s.position = {0.1 * (first_edgel + i), y_offset, 0.0};
    s.add_support(0, first_edgel + i);
    c.samples.push_back(s);
  }
  return c;
}

}  // namespace

TEST_CASE("group_by_primary_edge buckets by primary-view edgel") {
  std::vector<Curve3D> curves = {curve_over_edgels(0, 10, 0.0, 0),
                                 curve_over_edgels(0, 10, 0.01, 1),
                                 curve_over_edgels(0, 10, -0.01, 2)};
  const auto buckets = group_by_primary_edge(curves);
  CHECK(buckets.size() == 10);
  for (const auto& [key, samples] : buckets) {
    CHECK(key.first == 0);
    CHECK(samples.size() == 3);
  }
}

TEST_CASE("group_by_primary_edge: single curve gives singleton buckets") {
  const auto buckets =
      group_by_primary_edge({curve_over_edgels(3, 7, 0.0, 0)});
  CHECK(buckets.size() == 7);
  for (const auto& [key, samples] : buckets) CHECK(samples.size() == 1);
}

TEST_CASE("group_by_primary_edge: empty input and missing support") {
  CHECK(group_by_primary_edge({}).empty());

  Curve3D bad = curve_over_edgels(0, 3, 0.0, 0);
  bad.samples[1].support.clear();
  CHECK_THROWS_AS(group_by_primary_edge({bad}), MissingPrimarySupport);
}

TEST_CASE("robust_average: singleton and pair degenerate to centroid") {
  const Eigen::Vector3d p(1.0, 2.0, 3.0);
  CHECK(robust_average({p}) == p);
  const Eigen::Vector3d q(3.0, 4.0, 7.0);
  CHECK((robust_average({p, q}) - 0.5 * (p + q)).norm() < 1e-15);
}

TEST_CASE("robust_average rejects a far outlier") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 0.01);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::Vector3d> bucket;
    for (int i = 0; i < 5; ++i) {
      bucket.push_back({gauss(rng), gauss(rng), gauss(rng)});
    }
    bucket.push_back({5.0, 0.0, 0.0});
    const Eigen::Vector3d avg = robust_average(bucket);
    CHECK(avg.norm() < 0.02);
  }
}

TEST_CASE("robust_average: no outliers means the plain centroid") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::Vector3d> bucket;
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i = 0; i < 6; ++i) {
      // Tight cluster: spread well inside the 2-sigma band.
      Eigen::Vector3d p(uni(rng) * 0.01, uni(rng) * 0.01, uni(rng) * 0.01);
      bucket.push_back(p);
      centroid += p;
    }
    centroid /= 6.0;
    CHECK((robust_average(bucket) - centroid).norm() < 1e-12);
  }
}

TEST_CASE("robust_average is permutation-invariant and translation-equivariant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Eigen::Vector3d> bucket;
  for (int i = 0; i < 8; ++i) {
    bucket.push_back({uni(rng), uni(rng), uni(rng)});
  }
  const Eigen::Vector3d base = robust_average(bucket);

  std::vector<Eigen::Vector3d> shuffled = bucket;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK((robust_average(shuffled) - base).norm() < 1e-12);

  const Eigen::Vector3d t(10.0, -3.0, 2.5);
  std::vector<Eigen::Vector3d> shifted;
  for (const auto& p : bucket) shifted.push_back(p + t);
  CHECK((robust_average(shifted) - (base + t)).norm() < 1e-12);
}

TEST_CASE("fuse_redundant removes a bumped copy") {
  // Three redundant reconstructions of one primary curve, one with a bump
  // in the middle third.
  PrimaryFixture fix(30);
  Curve3D a = curve_over_edgels(0, 30, 0.0, 0);
  Curve3D b = curve_over_edgels(0, 30, 0.0, 1);
  Curve3D c = curve_over_edgels(0, 30, 0.0, 2);
  Curve3D d = curve_over_edgels(0, 30, 0.0, 3);
  for (int i = 10; i < 20; ++i) d.samples[i].position.y() += 0.5;  // bump

  const auto fused = fuse_redundant({a, b, c, d}, fix.index, Params{});
  REQUIRE(fused.size() == 1);
  CHECK(fused[0].size() == 30);
  for (const auto& s : fused[0].samples) {
    CHECK(std::abs(s.position.y()) < 1e-9);
  }
}

TEST_CASE("fuse_redundant leaves non-overlapping curves unchanged") {
  PrimaryFixture fix(40);
  const Curve3D a = curve_over_edgels(0, 12, 0.0, 0);
  const Curve3D b = curve_over_edgels(25, 12, 0.3, 1);
  const auto fused = fuse_redundant({a, b}, fix.index, Params{});
  REQUIRE(fused.size() == 2);
  CHECK(fused[0].size() == 12);
  CHECK(fused[1].size() == 12);
  CHECK(fused[0].samples[0].position == a.samples[0].position);
  CHECK(fused[1].samples[0].position == b.samples[0].position);
}

TEST_CASE("fuse_redundant elongates overlapping halves into one curve") {
  PrimaryFixture fix(50);
  const Curve3D front = curve_over_edgels(0, 30, 0.0, 0);
  const Curve3D back = curve_over_edgels(25, 25, 0.0, 1);
  const auto fused = fuse_redundant({front, back}, fix.index, Params{});
  REQUIRE(fused.size() == 1);
  CHECK(fused[0].size() == 50);
  CHECK(fused[0].samples.front().position.x() == doctest::Approx(0.0));
  CHECK(fused[0].samples.back().position.x() == doctest::Approx(4.9));
  // Support links from both sources are preserved on the shared stretch.
  bool merged_support = false;
  for (const auto& s : fused[0].samples) {
    if (s.support.at(0).size() == 1) continue;
    merged_support = true;
  }
  CHECK(!merged_support);  // one edgel per bucket by construction
}
