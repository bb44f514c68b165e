#include "sbmt/scaffold.hpp"

#include "sbmt/errors.hpp"

namespace sbmt {

namespace {

void check_edge(double e) {
  if (!(e > 0) || !(e < 1)) throw InvalidEdgeLength("edge length must lie in (0,1), got " + format_double(e));
}

}  // namespace

GridSpec make_grid_spec(const Point2& lo, const Point2& hi, double edge_length, double margin) {
  check_edge(edge_length);
  GridSpec s;
  s.edge_length = edge_length;
  s.bbox_min = lo;
  s.bbox_max = hi;
  s.margin = margin;
  // the slanted row ends cover x >= origin.x + e/2 only
  s.origin = lo - Point2(margin + edge_length / 2, margin);
  return s;
}

GridDims grid_dimensions(const GridSpec& spec) {
  check_edge(spec.edge_length);
  const double e = spec.edge_length, h = e * std::sqrt(3.0) / 2;
  int cells = static_cast<int>(std::ceil((spec.bbox_max.x() + spec.margin - spec.origin.x()) / e));
  int strips = static_cast<int>(std::ceil((spec.bbox_max.y() + spec.margin - spec.origin.y()) / h));
  return {std::max(strips, 1), std::max(cells, 1)};
}

HalfEdgeMesh build_grid(const GridSpec& spec) {
  const GridDims d = grid_dimensions(spec);
  const double e = spec.edge_length, h = e * std::sqrt(3.0) / 2;
  const int cols = d.cells + 1;
  std::vector<Point2> verts;
  verts.reserve(static_cast<size_t>(d.strips + 1) * cols);
  for (int j = 0; j <= d.strips; ++j)
    for (int i = 0; i < cols; ++i)
      verts.emplace_back(spec.origin.x() + i * e + ((j & 1) ? e / 2 : 0.0), spec.origin.y() + j * h);
  auto id = [cols](int j, int i) { return j * cols + i; };
  std::vector<Tri> faces;
  faces.reserve(2 * static_cast<size_t>(d.strips) * d.cells);
  for (int j = 0; j < d.strips; ++j)
    for (int i = 0; i < d.cells; ++i) {
      int b0 = id(j, i), b1 = id(j, i + 1), t0 = id(j + 1, i), t1 = id(j + 1, i + 1);
      if ((j & 1) == 0) {
        faces.push_back({b0, b1, t0});
        faces.push_back({b1, t1, t0});
      } else {
        faces.push_back({b0, t1, t0});
        faces.push_back({b0, b1, t1});
      }
    }
  return HalfEdgeMesh::from_indexed(std::move(verts), std::move(faces));
}

double recommended_edge_length(double omega) {
  if (!(omega > 0)) throw NonpositiveFrequency("omega must be positive");
  return 1.86 / omega;
}

}  // namespace sbmt
