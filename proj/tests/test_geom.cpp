#include <cmath>
#include <random>

#include "doctest.h"
#include "sbmt/errors.hpp"
#include "sbmt/geom.hpp"

using namespace sbmt;

TEST_CASE("orient2d signs") {
  Tolerance tol{1e-9};
  CHECK(orient2d({0, 0}, {1, 0}, {0, 1}, tol) == 1);
  CHECK(orient2d({0, 0}, {1, 0}, {2, 0}, tol) == 0);
  CHECK(orient2d({0, 0}, {1, 0}, {0.5, -1e-12}, tol) == 0);
  CHECK(orient2d({0, 0}, {1, 0}, {0.5, -1e-3}, tol) == -1);
}

TEST_CASE("orient2d antisymmetry on random triples") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    Point2 p(u(rng), u(rng)), q(u(rng), u(rng)), r(u(rng), u(rng));
    int a = orient2d(p, q, r, {}), b = orient2d(q, p, r, {});
    if (a != 0 && b != 0) CHECK(a == -b);
  }
}

TEST_CASE("segment intersection kinds") {
  Tolerance tol;
  auto x = seg_seg_intersect({{0, 0}, {2, 0}}, {{1, -1}, {1, 1}}, tol);
  REQUIRE(x.kind == IntersectKind::Point);
  CHECK((x.p0 - Point2(1, 0)).norm() < 1e-12);

  CHECK(seg_seg_intersect({{0, 0}, {1, 0}}, {{2, 0}, {3, 0}}, tol).kind == IntersectKind::None);

  auto o = seg_seg_intersect({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}}, tol);
  REQUIRE(o.kind == IntersectKind::Overlap);
  CHECK((o.p0 - Point2(1, 0)).norm() < 1e-12);
  CHECK((o.p1 - Point2(2, 0)).norm() < 1e-12);

  // endpoint touching the other segment's interior
  auto t = seg_seg_intersect({{0, 0}, {2, 0}}, {{1, 0}, {1, 1}}, tol);
  REQUIRE(t.kind == IntersectKind::Point);
  CHECK((t.p0 - Point2(1, 0)).norm() < 1e-12);

  CHECK_THROWS_AS(seg_seg_intersect({{0, 0}, {0, 0}}, {{1, 0}, {1, 1}}, tol), DegenerateSegment);
}

TEST_CASE("segment intersection is symmetric") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 2000; ++i) {
    Segment s1{{u(rng), u(rng)}, {u(rng), u(rng)}}, s2{{u(rng), u(rng)}, {u(rng), u(rng)}};
    auto a = seg_seg_intersect(s1, s2, {}), b = seg_seg_intersect(s2, s1, {});
    REQUIRE(a.kind == b.kind);
    if (a.kind == IntersectKind::Point) CHECK((a.p0 - b.p0).norm() < 1e-9);
  }
  // collinear overlap reported in the first argument's order
  Segment s1{{0, 0}, {4, 0}}, s2{{3, 0}, {1, 0}};
  auto a = seg_seg_intersect(s1, s2, {}), b = seg_seg_intersect(s2, s1, {});
  REQUIRE(a.kind == IntersectKind::Overlap);
  REQUIRE(b.kind == IntersectKind::Overlap);
  CHECK(a.p0.x() == doctest::Approx(1));
  CHECK(b.p0.x() == doctest::Approx(3));
}

TEST_CASE("point-segment distance") {
  auto d = point_segment_distance({0, 1}, {{-1, 0}, {1, 0}});
  CHECK(d.dist == doctest::Approx(1));
  CHECK(d.foot.norm() < 1e-12);
  CHECK_FALSE(d.clamped);

  d = point_segment_distance({2, 0}, {{0, 0}, {1, 0}});
  CHECK(d.dist == doctest::Approx(1));
  CHECK((d.foot - Point2(1, 0)).norm() < 1e-12);
  CHECK(d.clamped);

  d = point_segment_distance({0.5, 0.3}, {{0, 0}, {1, 0}});
  CHECK(d.dist == doctest::Approx(0.3));
  CHECK((d.foot - Point2(0.5, 0)).norm() < 1e-12);
  CHECK_FALSE(d.clamped);

  CHECK_THROWS_AS(point_segment_distance({0, 0}, {{1, 1}, {1, 1}}), DegenerateSegment);
}

TEST_CASE("distance never exceeds endpoint distances") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 1000; ++i) {
    Point2 p(u(rng), u(rng)), a(u(rng), u(rng)), b(u(rng), u(rng));
    auto d = point_segment_distance(p, {a, b});
    CHECK(d.dist <= (p - a).norm() + 1e-12);
    CHECK(d.dist <= (p - b).norm() + 1e-12);
  }
}

TEST_CASE("triangle area and angles") {
  CHECK(triangle_area({0, 0}, {1, 0}, {0, 1}) == doctest::Approx(0.5));
  CHECK(triangle_area({0, 0}, {0, 1}, {1, 0}) == doctest::Approx(-0.5));
  auto ang = triangle_angles({0, 0}, {4, 0}, {0, 3});
  CHECK(ang.sum() == doctest::Approx(M_PI));
  CHECK(ang[0] == doctest::Approx(M_PI / 2));
}
