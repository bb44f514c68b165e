#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sbmt/boundary.hpp"
#include "sbmt/mesh.hpp"
#include "sbmt/scaffold.hpp"
#include "sbmt/spatial.hpp"

namespace sbmt {

struct Thresholds {
  double a = 0.26;   // vertex snapping radius
  double b = 0.125;  // edge elimination distance
  double c = 0.183;  // repulsion distance
  double e = kDefaultEdgeLength;
};

// Names each violated inequality, e.g. "b ≥ a/2".
std::vector<std::string> validate_thresholds(const Thresholds& t, double min_boundary_seg);

// Spatial lookup over chain segments and chain vertices.
class ChainIndex {
 public:
  ChainIndex(const std::vector<PolyChain>& chains, double cell);

  struct SegRef {
    int chain;
    int seg;
  };
  struct VertRef {
    int chain;
    int index;
  };

  const std::vector<PolyChain>& chains() const { return *chains_; }
  const std::vector<SegRef>& segments() const { return segs_; }
  const std::vector<VertRef>& chain_vertices() const { return verts_; }
  Segment segment(int sid) const { return chains_->at(segs_[sid].chain).segment(segs_[sid].seg); }
  const Point2& point(int vid) const { return chains_->at(verts_[vid].chain).points[verts_[vid].index]; }

  // ids sorted ascending; ids are in (chain, index) order
  std::vector<int> segments_near(const Point2& p, double r) const { return seg_grid_.query(p, r); }
  std::vector<int> segments_in(const Point2& lo, const Point2& hi) const { return seg_grid_.query(lo, hi); }
  std::vector<int> vertices_near(const Point2& p, double r) const { return vtx_grid_.query(p, r); }

 private:
  const std::vector<PolyChain>* chains_;
  std::vector<SegRef> segs_;
  std::vector<VertRef> verts_;
  BucketGrid seg_grid_, vtx_grid_;
};

// vertex id -> new position, sorted by vertex id
using DisplacementMap = std::vector<std::pair<int, Point2>>;

// Moves every vertex within distance a of a chain vertex onto the closest one.
DisplacementMap snap_vertices(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, double a,
                              Tolerance tol = {});

// Pushes vertices closer than c to a segment out to distance exactly c, on
// their own side. Vertices on the boundary and, when exclude_radius > 0,
// vertices within exclude_radius of a chain vertex (the ones snapping moves)
// are left alone.
DisplacementMap repel_vertices(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, double c,
                               double exclude_radius, Tolerance tol = {});

HalfEdgeMesh apply_displacements(const HalfEdgeMesh& mesh, const DisplacementMap& d);

struct EliminationStats {
  int splits = 0;
  int hull_splits = 0;
  int conflicts = 0;  // lenient mode only
};

// Splits the edge nearest to each chain vertex lying within b of it (the
// chain vertex becomes a mesh vertex); strict mode throws ConflictingDeletion.
HalfEdgeMesh eliminate_edges(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, double b,
                             bool strict = true, EliminationStats* stats = nullptr, Tolerance tol = {});

struct PreprocessOptions {
  bool snap = true;
  bool repel = true;
  bool eliminate = true;
  bool strict = true;
  bool repel_first = false;  // Step 2 before Step 1; result is identical
};

HalfEdgeMesh preprocess(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, const Thresholds& t,
                        const PreprocessOptions& opt = {}, Tolerance tol = {}, EliminationStats* stats = nullptr);

}  // namespace sbmt
