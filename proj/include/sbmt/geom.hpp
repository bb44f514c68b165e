#pragma once

#include <Eigen/Core>
#include <utility>

namespace sbmt {

using Point2 = Eigen::Vector2d;
using Segment = std::pair<Point2, Point2>;

struct Tolerance {
  double eps = 1e-9;
};

// Default tolerance, honouring the SBMT_EPS environment variable.
Tolerance default_tolerance();

inline double cross(const Point2& u, const Point2& v) { return u.x() * v.y() - u.y() * v.x(); }

// Twice the signed area of (p, q, r).
inline double orient_raw(const Point2& p, const Point2& q, const Point2& r) {
  return cross(q - p, r - p);
}

bool same_point(const Point2& p, const Point2& q, Tolerance tol);

// +1 left of pq, -1 right, 0 within tol of the line through p and q.
int orient2d(const Point2& p, const Point2& q, const Point2& r, Tolerance tol);

enum class IntersectKind { None, Point, Overlap };

struct Intersection {
  IntersectKind kind = IntersectKind::None;
  Point2 p0 = Point2::Zero();
  Point2 p1 = Point2::Zero();
  // parameters of p0 along s1 and s2 (for Overlap, p0/p1 are ordered along s1)
  double t1 = 0, t2 = 0;
};

Intersection seg_seg_intersect(const Segment& s1, const Segment& s2, Tolerance tol);

struct SegmentDistance {
  double dist;
  Point2 foot;
  bool clamped;
  double t;  // parameter of foot in [0,1]
};

SegmentDistance point_segment_distance(const Point2& p, const Segment& s);

double triangle_area(const Point2& a, const Point2& b, const Point2& c);

// Interior angles in radians at a, b, c.
Eigen::Vector3d triangle_angles(const Point2& a, const Point2& b, const Point2& c);

}  // namespace sbmt
