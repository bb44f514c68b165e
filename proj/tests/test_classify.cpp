#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "sbmt/classify.hpp"
#include "sbmt/errors.hpp"
#include "sbmt/remesh.hpp"
#include "support.hpp"

using namespace sbmt;

namespace {

const Point2 A(1, 0), B(3, 0), C(2, 1.7320508075688772);

HalfEdgeMesh one_face(int rot = 0) {
  std::vector<Point2> V{A, B, C};
  Tri t{0, 1, 2};
  std::rotate(t.begin(), t.begin() + rot, t.end());
  return HalfEdgeMesh::from_indexed(V, {t});
}

FaceConfig config_of(const std::vector<Point2>& pts, int rot = 0) {
  auto mesh = one_face(rot);
  std::vector<PolyChain> chains{{pts, false}};
  auto reg = IntersectionRegistry::build(mesh, chains);
  return classify_face(mesh, reg, chains, 0, false);
}

bool tri_meets_segment(const Point2& a, const Point2& b, const Point2& c, const Segment& s) {
  for (auto& e : {Segment{a, b}, Segment{b, c}, Segment{c, a}})
    if (seg_seg_intersect(e, s, {}).kind != IntersectKind::None) return true;
  auto inside = [&](const Point2& p) {
    return orient_raw(a, b, p) > 0 && orient_raw(b, c, p) > 0 && orient_raw(c, a, p) > 0;
  };
  return inside(s.first) || inside(s.second);
}

}  // namespace

TEST_CASE("edge events") {
  auto ev = classify_edge_event({{0, 0}, {2, 0}}, {{1, -1}, {1, 1}});
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].kind == EventKind::Crossing);

  // segment through the shared vertex A of edges AB and CA: one event on each edge
  Point2 a(0, 0), b(2, 0), c(1, 2);
  Segment s{{-1, -1}, {1, 1}};
  auto ab = classify_edge_event({a, b}, s), ca = classify_edge_event({c, a}, s);
  REQUIRE(ab.size() == 1);
  REQUIRE(ca.size() == 1);
  CHECK(ab[0].kind == EventKind::VertexOnSegment);
  CHECK(ca[0].kind == EventKind::VertexOnSegment);
  CHECK(ab[0].attributed_to == 'A');
  CHECK(ca[0].attributed_to == 'B');

  // collinear overlaps attributed A, B, P, Q in that order
  auto o = classify_edge_event({{0, 0}, {2, 0}}, {{-1, 0}, {1, 0}});
  REQUIRE(o.size() == 1);
  CHECK(o[0].kind == EventKind::ColinearOverlap);
  CHECK(o[0].attributed_to == 'A');
  o = classify_edge_event({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}});
  CHECK(o[0].attributed_to == 'B');
  o = classify_edge_event({{0, 0}, {4, 0}}, {{1, 0}, {3, 0}});
  CHECK(o[0].attributed_to == 'P');

  auto end = classify_edge_event({{0, 0}, {2, 0}}, {{1, 0}, {1, 1}});
  REQUIRE(end.size() == 1);
  CHECK(end[0].kind == EventKind::EndpointOnEdge);
  CHECK(classify_edge_event({{0, 0}, {2, 0}}, {{0, 1}, {2, 1}}).empty());
}

TEST_CASE("face classes") {
  auto f = config_of({{0.5, 1.2}, {3.5, 1.2}});
  CHECK_FALSE(f.violation);
  CHECK(f.key.cls == std::make_pair(0, 2));
  CHECK(f.key.edge_mask == (4 | 8));

  // through vertex B, out through CA
  Point2 mid = (C + A) / 2;
  Point2 dir = (mid - B).normalized();
  f = config_of({B - 0.5 * dir, mid + 0.5 * dir});
  CHECK_FALSE(f.violation);
  CHECK(f.key.cls == std::make_pair(0, 3));

  f = config_of({{0, 1.732}, {2, 0.5}, {3.5, 1}});
  CHECK_FALSE(f.violation);
  CHECK(f.has_apex);
  CHECK(f.key.cls == std::make_pair(1, 1));

  f = config_of({{0, 3}, {4, 3}});
  CHECK(f.traces.empty());
  CHECK(f.key.cls == std::make_pair(0, 0));
}

TEST_CASE("canonical key ignores face rotation and chain direction") {
  std::vector<std::vector<Point2>> cases{{{0.5, 1.2}, {3.5, 1.2}},
                                         {{0, 1.732}, {2, 0.5}, {3.5, 1}},
                                         {{0, -0.5}, {2, 0.5}, {3.5, 1}},
                                         {{0.5, 2.1}, {1.9, 0.866}, {0, 0}},
                                         {{3, 1.7}, {1.3, 0.866}, {3.5, 0.5}}};
  for (auto& pts : cases) {
    auto ref = config_of(pts);
    std::vector<Point2> rev(pts.rbegin(), pts.rend());
    for (int r = 0; r < 3; ++r) {
      CHECK(config_of(pts, r).key.key == ref.key.key);
      CHECK(config_of(rev, r).key.key == ref.key.key);
    }
  }
}

TEST_CASE("three segments in one face is a protocol violation") {
  auto mesh = one_face();
  std::vector<PolyChain> chains{{{{0.5, 0.3}, {1.8, 0.6}, {2.1, 0.2}, {2.4, 0.9}, {3.5, 0.4}}, false}};
  auto reg = IntersectionRegistry::build(mesh, chains);
  CHECK_THROWS_AS(classify_face(mesh, reg, chains, 0, true), ProtocolViolation);
  CHECK(classify_face(mesh, reg, chains, 0, false).violation);
}

TEST_CASE("three segments through one face interior are rejected") {
  auto mesh = one_face();
  std::vector<PolyChain> chains{{{{0.5, 0.3}, {1.8, 0.6}, {2.1, 0.2}, {2.4, 0.9}, {3.5, 0.4}}, false}};
  CHECK_THROWS_AS(find_intersected_faces(mesh, chains), ProtocolViolation);
  CHECK(find_intersected_faces(mesh, chains, {}, false).size() == 1);
  // segments that only touch a corner do not count
  std::vector<PolyChain> touch{{{{0, -1}, {1, 0}, {2, 0.8}, {4, 0.8}}, false}};
  CHECK_NOTHROW(find_intersected_faces(mesh, touch));
}

TEST_CASE("registry is read-only once frozen") {
  auto mesh = one_face();
  std::vector<PolyChain> chains{{{{0.5, 1.2}, {3.5, 1.2}}, false}};
  auto reg = IntersectionRegistry::build(mesh, chains);
  CHECK(reg.frozen());
  CHECK_THROWS_AS(reg.add_edge_record(0, 1, {}), RegistryFrozen);
  CHECK(&reg.edge_records(1, 2) == &reg.edge_records(2, 1));
  CHECK(reg.edge_records(1, 2).size() == 1);
}

TEST_CASE("chain outside the grid touches nothing") {
  auto grid = build_grid(make_grid_spec({0, 0}, {4, 4}));
  std::vector<PolyChain> c{{{{50, 50}, {60, 50}, {60, 60}}, true}};
  CHECK(find_intersected_faces(grid, c).empty());
}

TEST_CASE("intersected faces match a brute-force scan") {
  auto grid = build_grid(make_grid_spec({0, 0}, {6, 6}));
  std::vector<PolyChain> one{{{{0.3, 2.2}, {5.4, 2.9}}, false}};
  auto got = find_intersected_faces(grid, one);
  std::set<int> brute;
  for (int f = 0; f < grid.num_faces(); ++f) {
    auto& t = grid.face(f);
    if (tri_meets_segment(grid.vertex(t[0]), grid.vertex(t[1]), grid.vertex(t[2]), one[0].segment(0))) brute.insert(f);
  }
  std::set<int> faces;
  for (auto& [f, segs] : got) {
    faces.insert(f);
    CHECK(segs.size() == 1);
  }
  CHECK(faces == brute);
}

TEST_CASE("star: intersected faces match a brute-force scan") {
  auto chains = chains_from_mask(load_bitmap(testing::fixture("star.pgm")), kDefaultEdgeLength);
  auto base = build_grid(grid_for_chains(chains, kDefaultEdgeLength));
  auto mesh = preprocess(base, chains, Thresholds{});
  std::map<int, std::set<std::pair<int, int>>> brute;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    auto& t = mesh.face(f);
    for (int c = 0; c < static_cast<int>(chains.size()); ++c)
      for (int k = 0; k < chains[c].num_segments(); ++k)
        if (tri_meets_segment(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]), chains[c].segment(k)))
          brute[f].insert({c, k});
  }
  std::map<int, std::set<std::pair<int, int>>> got;
  for (auto& [f, segs] : find_intersected_faces(mesh, chains)) got[f] = {segs.begin(), segs.end()};
  CHECK(got == brute);

  // every classified face is admissible, and untouched faces have class (0,0)
  auto reg = IntersectionRegistry::build(mesh, chains);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    auto fc = classify_face(mesh, reg, chains, f, true);
    if (!got.count(f)) CHECK(fc.key.cls == std::make_pair(0, 0));
    if (fc.key.cls != std::make_pair(0, 0)) CHECK(admissible_class(fc.key.cls));
  }
}
