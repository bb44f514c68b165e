#include <cmath>
#include <limits>

#include "doctest.h"
#include "sbmt/errors.hpp"
#include "sbmt/preprocess.hpp"
#include "sbmt/remesh.hpp"
#include "support.hpp"

using namespace sbmt;

namespace {

std::vector<PolyChain> star_chains() {
  return chains_from_mask(load_bitmap(testing::fixture("star.pgm")), kDefaultEdgeLength);
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  for (auto& x : v)
    if (x == s) return true;
  return false;
}

}  // namespace

TEST_CASE("threshold validation") {
  Thresholds t;
  CHECK(validate_thresholds(t, 1.0).empty());
  Thresholds bad{0.3, 0.2, 0.183, kDefaultEdgeLength};
  CHECK(contains(validate_thresholds(bad, 1.0), "b ≥ a/2"));
  Thresholds badc{0.26, 0.125, 0.19, kDefaultEdgeLength};
  CHECK(contains(validate_thresholds(badc, 1.0), "c ≥ a/√2"));
  Thresholds bada{0.4, 0.125, 0.183, kDefaultEdgeLength};
  CHECK(contains(validate_thresholds(bada, 1.0), "a ≥ e/2"));
  CHECK(contains(validate_thresholds(t, 0.5), "e ≥ min boundary segment"));
}

TEST_CASE("snapping radius and tie-break") {
  std::vector<Point2> V{{0, 0}, {1, 0}, {0, 1}};
  auto m = HalfEdgeMesh::from_indexed(V, {{0, 1, 2}});
  std::vector<PolyChain> near{{{{0.2, 0}, {0.2, -5}, {-5, -5}}, true}};
  auto d = snap_vertices(m, near, 0.26);
  REQUIRE(d.size() == 1);
  CHECK(d[0].first == 0);
  CHECK((d[0].second - Point2(0.2, 0)).norm() == 0);

  std::vector<PolyChain> far{{{{0.3, 0}, {0.3, -5}, {-5, -5}}, true}};
  CHECK(snap_vertices(m, far, 0.26).empty());

  // two chain vertices in range: closer wins; equal distance: lower chain wins
  std::vector<PolyChain> two{{{{0.2, 0}, {5, -5}, {-5, -5}}, true}, {{{-0.1, 0}, {-5, 5}, {-6, 5}}, true}};
  d = snap_vertices(m, two, 0.26);
  REQUIRE(d.size() == 1);
  CHECK((d[0].second - Point2(-0.1, 0)).norm() == 0);
  std::vector<PolyChain> tie{{{{0.2, 0}, {5, -5}, {-5, -5}}, true}, {{{-0.2, 0}, {-5, 5}, {-6, 5}}, true}};
  d = snap_vertices(m, tie, 0.26);
  REQUIRE(d.size() == 1);
  CHECK((d[0].second - Point2(0.2, 0)).norm() == 0);
}

TEST_CASE("repulsion to exactly c on the vertex's side") {
  std::vector<Point2> V{{0, 0.1}, {1, 5}, {-1, 5}};
  auto m = HalfEdgeMesh::from_indexed(V, {{0, 1, 2}});
  std::vector<PolyChain> line{{{{-5, 0}, {5, 0}, {5, -5}, {-5, -5}}, true}};
  auto d = repel_vertices(m, line, 0.183, 0.0);
  REQUIRE(d.size() == 1);
  CHECK(d[0].second.x() == doctest::Approx(0));
  CHECK(d[0].second.y() == doctest::Approx(0.183));

  std::vector<Point2> W{{0, -0.1}, {1, -2}, {2, -1}};
  auto below = HalfEdgeMesh::from_indexed(W, {{0, 1, 2}});
  std::vector<PolyChain> line2{{{{-5, 0}, {5, 0}, {5, 5}, {-5, 5}}, true}};
  d = repel_vertices(below, line2, 0.183, 0.0);
  REQUIRE(d.size() == 1);
  CHECK(d[0].second.y() == doctest::Approx(-0.183));

  std::vector<Point2> U{{0, 0.2}, {1, 5}, {-1, 5}};
  CHECK(repel_vertices(HalfEdgeMesh::from_indexed(U, {{0, 1, 2}}), line, 0.183, 0.0).empty());
}

TEST_CASE("repulsion near a chain corner is radial") {
  // corner at the origin, vertex beyond both segment ends
  std::vector<PolyChain> corner{{{{0, 0}, {5, 0}, {5, 5}, {0, 5}}, true}};
  std::vector<Point2> V{{-0.1, -0.05}, {-3, -1}, {-1, -3}};
  auto m = HalfEdgeMesh::from_indexed(V, {{0, 1, 2}});
  auto d = repel_vertices(m, corner, 0.183, 0.0);
  REQUIRE(d.size() == 1);
  Point2 p = d[0].second;
  double dmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < corner[0].num_segments(); ++k) dmin = std::min(dmin, point_segment_distance(p, corner[0].segment(k)).dist);
  CHECK(dmin == doctest::Approx(0.183));
  CHECK(p.normalized().dot(Point2(-0.1, -0.05).normalized()) == doctest::Approx(1));
}

TEST_CASE("edge elimination: interior pair becomes four faces") {
  // A B shared, C above, D below
  std::vector<Point2> V{{0, 0}, {2, 0}, {1, 1.5}, {1, -1.5}};
  auto m = HalfEdgeMesh::from_indexed(V, {{0, 1, 2}, {1, 0, 3}});
  std::vector<PolyChain> chain{{{{1, 0.05}, {1.2, 3}, {-3, 3}}, true}};
  EliminationStats st;
  auto out = eliminate_edges(m, chain, 0.125, true, &st);
  CHECK(out.num_faces() == 4);
  CHECK(st.splits == 1);
  CHECK(out.total_area() == doctest::Approx(m.total_area()));
  CHECK(validate_watertight(out).ok);
  int p = -1;
  for (int v = 0; v < out.num_vertices(); ++v)
    if ((out.vertex(v) - Point2(1, 0.05)).norm() < 1e-12) p = v;
  REQUIRE(p >= 0);
  int incident = 0;
  for (auto& t : out.faces())
    for (int v : t) incident += v == p;
  CHECK(incident == 4);
}

TEST_CASE("edge elimination: no nearby point, and hull edges") {
  std::vector<Point2> V{{0, 0}, {2, 0}, {1, 1.5}};
  auto m = HalfEdgeMesh::from_indexed(V, {{0, 1, 2}});
  std::vector<PolyChain> far{{{{1, 0.5}, {1.2, 3}, {-3, 3}}, true}};
  CHECK(canonical_serialization(eliminate_edges(m, far, 0.125)) == canonical_serialization(m));
  std::vector<PolyChain> hull{{{{1, 0.05}, {1.2, 3}, {-3, 3}}, true}};
  EliminationStats st;
  auto out = eliminate_edges(m, hull, 0.125, true, &st);
  CHECK(out.num_faces() == 2);
  CHECK(st.hull_splits == 1);
  // the hull now runs A -> p -> B: the area changes by exactly the sliver A p B
  CHECK(out.total_area() == doctest::Approx(m.total_area() + triangle_area(V[0], {1, 0.05}, V[1])).epsilon(1e-12));
  std::vector<PolyChain> outside{{{{1, -0.05}, {1.2, -3}, {-3, -3}}, true}};
  auto out2 = eliminate_edges(m, outside, 0.125);
  CHECK(out2.num_faces() == 2);
  CHECK(out2.total_area() == doctest::Approx(m.total_area() + triangle_area(V[0], {1, -0.05}, V[1])).epsilon(1e-12));
}

TEST_CASE("straight boundary far from vertices leaves steps 1 and 2 idle") {
  auto grid = build_grid(make_grid_spec({0, 0}, {6, 6}));
  const double h = kDefaultEdgeLength * std::sqrt(3.0) / 2;
  // horizontal line halfway between two vertex rows
  double y = grid.vertex(0).y() + 3.5 * h;
  std::vector<PolyChain> c{{{{-50, y}, {50, y}, {50, 60}, {-50, 60}}, true}};
  CHECK(snap_vertices(grid, c, 0.26).empty());
  CHECK(repel_vertices(grid, c, 0.183, 0.26).empty());
}

TEST_CASE("star: steps 1 and 2 commute and clearances hold") {
  auto chains = star_chains();
  auto grid = build_grid(grid_for_chains(chains, kDefaultEdgeLength));
  Thresholds t;
  PreprocessOptions a, b;
  a.eliminate = b.eliminate = false;
  b.repel_first = true;
  auto ma = preprocess(grid, chains, t, a), mb = preprocess(grid, chains, t, b);
  CHECK(ma.vertices() == mb.vertices());

  auto full = preprocess(grid, chains, t);
  CHECK(validate_watertight(full).ok);
  ChainIndex idx(chains, 1.0);
  for (auto& p : full.vertices()) {
    double d = std::numeric_limits<double>::infinity();
    for (int sid : idx.segments_near(p, 1.0)) d = std::min(d, point_segment_distance(p, idx.segment(sid)).dist);
    if (d < 1e-9) continue;
    CHECK(d >= t.c - 1e-9);
  }
}
