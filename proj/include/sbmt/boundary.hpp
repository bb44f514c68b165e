#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sbmt/geom.hpp"

namespace sbmt {

// Pixel (i, j) is the unit square centred at (i, j); j is the image row.
struct BitmapMask {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> bits;  // row-major, 1 = foreground

  BitmapMask() = default;
  BitmapMask(int w, int h) : width(w), height(h), bits(static_cast<size_t>(w) * h, 0) {}
  bool at(int i, int j) const { return i >= 0 && j >= 0 && i < width && j < height && bits[static_cast<size_t>(j) * width + i]; }
  void set(int i, int j, bool v = true) { bits[static_cast<size_t>(j) * width + i] = v; }
  int count() const;
};

struct PolyChain {
  std::vector<Point2> points;
  bool closed = true;

  int num_segments() const {
    int n = static_cast<int>(points.size());
    return closed ? n : n - 1;
  }
  Segment segment(int k) const { return {points[k], points[(k + 1) % points.size()]}; }
};

// P5 (maxval 255, threshold 128) and P1. Dark pixels are foreground unless invert.
BitmapMask load_bitmap(const std::string& path, bool invert = false);
BitmapMask read_bitmap(std::istream& is, bool invert = false);
void write_pgm(const BitmapMask& mask, const std::string& path);

// Moore-neighbour tracing (8-connectivity, Jacob's stopping criterion).
// Outer contours come out with positive signed area, holes negative.
// Components too small to form a polygon are skipped and counted in *rejected.
std::vector<PolyChain> trace_contours(const BitmapMask& mask, int* rejected = nullptr);

double signed_area(const PolyChain& chain);
double min_segment_length(const std::vector<PolyChain>& chains);
// Geometric angle (radians) at vertex i between its two incident segments.
double vertex_angle(const PolyChain& chain, int i);
bool is_simple(const PolyChain& chain, Tolerance tol = {});

constexpr double kAngleSlack = 1e-6;

// Greedy vertex removal until every angle is >= 90 deg and every segment is
// longer than e. Throws ProtocolUnsatisfiable beyond a 1 px Hausdorff budget.
PolyChain enforce_protocol(const PolyChain& chain, double e);
bool satisfies_protocol(const PolyChain& chain, double e);
double hausdorff_distance(const PolyChain& a, const PolyChain& b);

// Winding number of the chains around p (closed chains only).
int winding_number(const std::vector<PolyChain>& chains, const Point2& p);

// Text format: blocks headed "closed" or "open", followed by "x y" lines.
std::vector<PolyChain> read_chains(std::istream& is);
std::vector<PolyChain> load_chains(const std::string& path);
void write_chains(const std::vector<PolyChain>& chains, std::ostream& os);

}  // namespace sbmt
