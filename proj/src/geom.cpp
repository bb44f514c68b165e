#include "sbmt/geom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "sbmt/errors.hpp"

namespace sbmt {

Tolerance default_tolerance() {
  Tolerance t;
  if (const char* env = std::getenv("SBMT_EPS")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v > 0) t.eps = v;
  }
  return t;
}

bool same_point(const Point2& p, const Point2& q, Tolerance tol) { return (p - q).norm() < tol.eps; }

int orient2d(const Point2& p, const Point2& q, const Point2& r, Tolerance tol) {
  Point2 d = q - p;
  double len = d.norm();
  double c = cross(d, r - p);
  if (!(len > 0) || std::abs(c / len) < tol.eps) return 0;
  return c > 0 ? 1 : -1;
}

SegmentDistance point_segment_distance(const Point2& p, const Segment& s) {
  Point2 d = s.second - s.first;
  double l2 = d.squaredNorm();
  if (!(l2 > 0)) throw DegenerateSegment("zero-length segment");
  double t = (p - s.first).dot(d) / l2;
  bool clamped = false;
  if (t <= 0) {
    t = 0;
    clamped = true;
  } else if (t >= 1) {
    t = 1;
    clamped = true;
  }
  Point2 foot = clamped ? (t == 0 ? s.first : s.second) : Point2(s.first + t * d);
  return {(p - foot).norm(), foot, clamped, t};
}

namespace {

double param_on(const Segment& s, const Point2& p) {
  Point2 d = s.second - s.first;
  return (p - s.first).dot(d) / d.squaredNorm();
}

}  // namespace

Intersection seg_seg_intersect(const Segment& s1, const Segment& s2, Tolerance tol) {
  Point2 d1 = s1.second - s1.first, d2 = s2.second - s2.first;
  double l1 = d1.norm(), l2 = d2.norm();
  if (l1 <= tol.eps || l2 <= tol.eps) throw DegenerateSegment("segment length below tolerance");
  Intersection out;

  int o1 = orient2d(s1.first, s1.second, s2.first, tol);
  int o2 = orient2d(s1.first, s1.second, s2.second, tol);
  int o3 = orient2d(s2.first, s2.second, s1.first, tol);
  int o4 = orient2d(s2.first, s2.second, s1.second, tol);

  if (o1 == 0 && o2 == 0) {
    double ta = param_on(s1, s2.first), tb = param_on(s1, s2.second);
    double lo = std::max(0.0, std::min(ta, tb)), hi = std::min(1.0, std::max(ta, tb));
    double slack = tol.eps / l1;
    if (hi < lo - slack) return out;
    if ((hi - lo) * l1 < tol.eps) {
      out.kind = IntersectKind::Point;
      double t = std::clamp(0.5 * (lo + hi), 0.0, 1.0);
      // report an endpoint when one is involved
      Point2 cands[4] = {s1.first, s1.second, s2.first, s2.second};
      Point2 p = s1.first + t * d1;
      for (auto& c : cands)
        if ((c - p).norm() < tol.eps) {
          p = c;
          break;
        }
      out.p0 = out.p1 = p;
      out.t1 = param_on(s1, p);
      out.t2 = param_on(s2, p);
      return out;
    }
    out.kind = IntersectKind::Overlap;
    out.p0 = s1.first + lo * d1;
    out.p1 = s1.first + hi * d1;
    // snap overlap ends onto the endpoints that generate them
    for (const Point2* c : {&s1.first, &s1.second, &s2.first, &s2.second}) {
      if ((*c - out.p0).norm() < tol.eps) out.p0 = *c;
      if ((*c - out.p1).norm() < tol.eps) out.p1 = *c;
    }
    out.t1 = param_on(s1, out.p0);
    out.t2 = param_on(s2, out.p0);
    return out;
  }

  // endpoint touching the other segment: report at the endpoint itself
  auto touch = [&](const Point2& p, const Segment& other) {
    return point_segment_distance(p, other).dist < tol.eps;
  };
  const Point2* hit = nullptr;
  if (touch(s1.first, s2)) hit = &s1.first;
  else if (touch(s1.second, s2)) hit = &s1.second;
  else if (touch(s2.first, s1)) hit = &s2.first;
  else if (touch(s2.second, s1)) hit = &s2.second;
  if (hit) {
    out.kind = IntersectKind::Point;
    out.p0 = out.p1 = *hit;
    out.t1 = std::clamp(param_on(s1, *hit), 0.0, 1.0);
    out.t2 = std::clamp(param_on(s2, *hit), 0.0, 1.0);
    return out;
  }
  if (o1 * o2 < 0 && o3 * o4 < 0) {
    double den = cross(d1, d2);
    double t = cross(s2.first - s1.first, d2) / den;
    double u = cross(s2.first - s1.first, d1) / den;
    out.kind = IntersectKind::Point;
    out.p0 = out.p1 = s1.first + t * d1;
    out.t1 = t;
    out.t2 = u;
  }
  return out;
}

double triangle_area(const Point2& a, const Point2& b, const Point2& c) { return 0.5 * orient_raw(a, b, c); }

Eigen::Vector3d triangle_angles(const Point2& a, const Point2& b, const Point2& c) {
  auto ang = [](const Point2& p, const Point2& q, const Point2& r) {
    Point2 u = q - p, v = r - p;
    return std::atan2(std::abs(cross(u, v)), u.dot(v));
  };
  return {ang(a, b, c), ang(b, c, a), ang(c, a, b)};
}

}  // namespace sbmt
