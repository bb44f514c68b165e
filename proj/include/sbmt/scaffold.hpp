#pragma once

#include <cmath>

#include "sbmt/geom.hpp"
#include "sbmt/mesh.hpp"

namespace sbmt {

inline const double kDefaultEdgeLength = std::sqrt(0.45);
inline const double kFigureEdgeLength = std::sqrt(0.7);

struct GridSpec {
  double edge_length = kDefaultEdgeLength;
  Point2 origin = Point2::Zero();
  Point2 bbox_min = Point2::Zero();
  Point2 bbox_max = Point2::Zero();
  double margin = 1.0;
};

// GridSpec covering [lo, hi] plus margin, with the default origin.
GridSpec make_grid_spec(const Point2& lo, const Point2& hi, double edge_length = kDefaultEdgeLength,
                        double margin = 1.0);

struct GridDims {
  int strips;  // rows of triangles
  int cells;   // up/down pairs per strip
};

GridDims grid_dimensions(const GridSpec& spec);

// Alternating up/down equilateral rows, odd vertex rows shifted by e/2.
HalfEdgeMesh build_grid(const GridSpec& spec);

// Exclusive upper bound on the edge length resolving frequency omega.
double recommended_edge_length(double omega);

}  // namespace sbmt
