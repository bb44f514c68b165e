#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "sbmt/boundary.hpp"
#include "sbmt/mesh.hpp"

namespace sbmt {

enum class TokenKind : char { Vertex = 'V', Crossing = 'q', ChainVertex = 'p' };

// A point on a mesh edge interior: a segment crossing, or a chain vertex.
struct IntersectionRecord {
  int id = -1;  // registry point id
  TokenKind kind = TokenKind::Crossing;
  int chain = -1;
  int seg = -1;       // crossing segment, or the chain vertex index for ChainVertex
  double t_edge = 0;  // measured from the lower vertex id of the edge
  double t_seg = 0;
  Point2 point = Point2::Zero();
};

// A mesh vertex lying on a chain segment.
struct VertexContact {
  int chain;
  int seg;
  double t;
};

// A chain vertex strictly inside a face.
struct ApexRecord {
  int id;
  int chain;
  int index;
  Point2 point;
};

// Edge-indexed store of every segment/mesh interaction. Built once, then
// frozen; afterwards every accessor is read-only and thread-safe.
class IntersectionRegistry {
 public:
  static IntersectionRegistry build(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains,
                                    Tolerance tol = {});
  // Test hook: chain vertices and vertex contacts only, left mutable so
  // crossings can be added later by whoever reaches an edge first.
  static IntersectionRegistry build_without_crossings(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains,
                                                      Tolerance tol = {});

  void add_edge_record(int u, int v, IntersectionRecord r);
  void add_vertex_contact(int v, VertexContact c);
  void add_apex(int face, int chain, int index, const Point2& p);
  void freeze();
  bool frozen() const { return frozen_; }

  const std::vector<IntersectionRecord>& edge_records(int u, int v) const;
  const std::vector<VertexContact>& vertex_contacts(int v) const;
  const std::vector<ApexRecord>& apexes(int face) const;
  const std::vector<Point2>& points() const { return points_; }
  int num_points() const { return static_cast<int>(points_.size()); }

  // Faces with any registered interaction, ascending.
  std::vector<int> touched_faces(const HalfEdgeMesh& mesh) const;

 private:
  static IntersectionRegistry build_impl(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains,
                                         Tolerance tol, bool crossings);
  void check_mutable() const;
  bool frozen_ = false;
  std::unordered_map<uint64_t, std::vector<IntersectionRecord>> edges_;
  std::unordered_map<int, std::vector<VertexContact>> contacts_;
  std::unordered_map<int, std::vector<ApexRecord>> apexes_;
  std::vector<Point2> points_;
};

// Symbolic face configuration. cycle lists token kinds CCW starting at a
// triangle vertex; traces list, per segment in chain order, the cycle
// positions it meets in order along the chain (kApex for the interior apex).
constexpr int kApex = -1;

struct SymConfig {
  std::vector<TokenKind> cycle;
  bool has_apex = false;
  std::vector<std::vector<int>> traces;
};

struct Canonical {
  SymConfig config;
  std::string key;
  int shift = 0;  // cycle position of the canonical A in the input
  int rotation = 0;
  bool reversed = false;
};

std::string signature(const SymConfig& c);
Canonical canonicalize(const SymConfig& c);
SymConfig mirror(const SymConfig& c);  // keeps position 0, reverses orientation
// positions of the three triangle vertices inside the cycle
std::array<int, 3> vertex_positions(const SymConfig& c);
// edges (0: A->B, 1: B->C, 2: C->A) containing the token at cycle position i, as a bitmask
int token_edges(const SymConfig& c, int i);
// (m, n) with m <= n
std::pair<int, int> config_class(const SymConfig& c);
bool admissible_class(std::pair<int, int> mn);

struct ConfigKey {
  std::string key;
  std::pair<int, int> cls{0, 0};
  int edge_mask = 0;  // AB=2, BC=4, CA=8
  int rotation = 0;
  bool reversed = false;
  std::string sym_tag() const;
};

struct FaceToken {
  TokenKind kind;
  int point;  // global id: mesh vertex id, or num_vertices + registry id
  Point2 pos;
};

struct FaceConfig {
  int face = -1;
  std::vector<FaceToken> cycle;
  bool has_apex = false;
  FaceToken apex{TokenKind::ChainVertex, -1, Point2::Zero()};
  struct Trace {
    int chain, seg;
    std::vector<int> tokens;
  };
  std::vector<Trace> traces;
  SymConfig sym;
  Canonical canon;
  ConfigKey key;
  bool violation = false;
  std::string violation_reason;
};

// Gathers the tokens of one face from the frozen registry, applies the
// protocol checks, and canonicalizes. strict: violations throw
// ProtocolViolation, otherwise they are flagged in the result.
FaceConfig classify_face(const HalfEdgeMesh& mesh, const IntersectionRegistry& reg,
                         const std::vector<PolyChain>& chains, int face, bool strict = true);

// faces -> segments meeting them (closed-set intersection), segment ids as (chain, seg).
// strict: throws ProtocolViolation when more than two segments pass through a face interior.
std::vector<std::pair<int, std::vector<std::pair<int, int>>>> find_intersected_faces(
    const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, Tolerance tol = {}, bool strict = true);

enum class EventKind { Crossing, EndpointOnEdge, VertexOnSegment, ColinearOverlap };

struct EdgeEvent {
  EventKind kind;
  Point2 point;
  char attributed_to;  // 'A', 'B' (edge ends), 'P', 'Q' (segment ends), or 'x' for a plain crossing
  double t_edge;
};

// Segment-edge events for edge AB and segment PQ.
std::vector<EdgeEvent> classify_edge_event(const Segment& edge, const Segment& seg, Tolerance tol = {});

}  // namespace sbmt
