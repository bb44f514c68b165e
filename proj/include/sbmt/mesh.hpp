#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbmt/geom.hpp"

namespace sbmt {

using Tri = std::array<int, 3>;

inline uint64_t edge_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<uint64_t>(static_cast<uint32_t>(u)) << 32) | static_cast<uint32_t>(v);
}

// Half-edge 3f+k runs from faces[f][k] to faces[f][(k+1)%3]; twin < 0 marks a
// boundary half-edge.
struct HalfEdge {
  int origin;
  int twin;
  int next;
  int face;
};

class HalfEdgeMesh {
 public:
  HalfEdgeMesh() = default;

  // Connectivity from an indexed triangle list. Faces must be CCW with
  // positive area; throws NonManifoldEdge / ZeroAreaFace.
  static HalfEdgeMesh from_indexed(std::vector<Point2> vertices, std::vector<Tri> faces, Tolerance tol = {});

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Tri>& faces() const { return faces_; }
  const std::vector<HalfEdge>& halfedges() const { return halfedges_; }
  const Point2& vertex(int v) const { return vertices_[v]; }
  const Tri& face(int f) const { return faces_[f]; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_edges() const;
  bool is_boundary(int h) const { return halfedges_[h].twin < 0; }
  int dest(int h) const { return halfedges_[halfedges_[h].next].origin; }

  std::vector<char> boundary_vertex_mask() const;
  double total_area() const;
  double face_area(int f) const;

 private:
  std::vector<Point2> vertices_;
  std::vector<Tri> faces_;
  std::vector<HalfEdge> halfedges_;
};

// Triangle soup -> mesh: vertices deduplicated at eps, CW inputs flipped.
HalfEdgeMesh build_mesh(const std::vector<std::array<Point2, 3>>& triangles, Tolerance tol = {});

struct WatertightReport {
  bool ok = true;
  int t_junctions = 0;
  int cracks = 0;
  int non_manifold = 0;
  std::vector<std::string> defects;
};

WatertightReport validate_watertight(const HalfEdgeMesh& mesh, Tolerance tol = {});

// Order-independent text form: vertices sorted by coordinates quantized at
// eps/4, faces rotated to their smallest index and sorted.
std::string canonical_serialization(const HalfEdgeMesh& mesh, Tolerance tol = {});

void write_off(const HalfEdgeMesh& mesh, std::ostream& os);
void write_obj(const HalfEdgeMesh& mesh, std::ostream& os);
HalfEdgeMesh read_off(std::istream& is);
HalfEdgeMesh read_obj(std::istream& is);
void save_mesh(const HalfEdgeMesh& mesh, const std::string& path);  // by extension
HalfEdgeMesh load_mesh(const std::string& path);

std::string format_double(double v);

}  // namespace sbmt
