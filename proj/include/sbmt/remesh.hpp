#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbmt/classify.hpp"
#include "sbmt/preprocess.hpp"
#include "sbmt/templates.hpp"

namespace sbmt {

struct RemeshOptions {
  PreprocessOptions pre;
  // false: protocol violations and unknown configurations fall back to a
  // centroid fan and are counted instead of thrown
  bool strict = true;
  int threads = 0;  // 0 = hardware concurrency
  // face processing order; 0 keeps ascending face ids
  uint64_t schedule_seed = 0;
  // negative control: each face writes the crossings of its own edges into a
  // shared mutable registry, first writer wins
  bool mutable_registry = false;
};

struct RemeshStats {
  int base_faces = 0;
  int touched_faces = 0;
  int replaced_faces = 0;
  int catalog_patches = 0;
  int synthesized_patches = 0;
  int fallback_faces = 0;
  int protocol_violations = 0;
  int output_faces = 0;
  EliminationStats elimination;
  std::map<std::string, int> classes;  // "(m,n)" -> faces
  double seconds = 0;
};

struct RemeshResult {
  HalfEdgeMesh mesh;          // full conforming grid
  HalfEdgeMesh preprocessed;  // grid after snapping, repulsion and elimination
  std::vector<PolyChain> chains;
  std::vector<Point2> registry_points;
  // per output face: "" for untouched grid faces, "(m,n)" for patched ones,
  // "fallback" for centroid fans
  std::vector<std::string> face_class;
  RemeshStats stats;
};

// Triangles replacing one base face. Ids < 0 name extra[-id-1].
struct FacePatch {
  std::vector<Tri> faces;
  std::vector<Point2> extra;
};

// Replaces patched faces of base. Points are base vertices followed by
// shared points; extra points are appended in face order. Unused vertices are
// dropped. Throws StitchMismatch when the two sides of a base edge disagree
// on its subdivision.
HalfEdgeMesh stitch(const HalfEdgeMesh& base, const std::vector<Point2>& shared_points,
                    const std::map<int, FacePatch>& patches, Tolerance tol = {});

// Protocol-conforming chains traced from a mask.
std::vector<PolyChain> chains_from_mask(const BitmapMask& mask, double e, int* rejected = nullptr);
// Grid over the bounding box of the chains.
GridSpec grid_for_chains(const std::vector<PolyChain>& chains, double e, double margin = 1.0);

RemeshResult remesh(const std::vector<PolyChain>& chains, const GridSpec& grid, const Thresholds& t,
                    const RemeshOptions& opt = {}, Tolerance tol = {});
RemeshResult remesh(const BitmapMask& mask, const Thresholds& t, const RemeshOptions& opt = {}, Tolerance tol = {});

// Faces whose centroid lies inside the traced domain.
HalfEdgeMesh inside_region(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains,
                           std::vector<int>* kept_faces = nullptr);

struct PathIndependenceReport {
  bool ok = true;
  int runs = 0;
  std::optional<uint64_t> counterexample_seed;
  size_t first_difference = 0;  // byte offset
};

// Remeshes under the seeds 1..n_shuffles and compares canonical
// serializations with the ascending-order run.
PathIndependenceReport check_path_independence(const std::vector<PolyChain>& chains, const GridSpec& grid,
                                               const Thresholds& t, RemeshOptions opt, int n_shuffles,
                                               Tolerance tol = {});

}  // namespace sbmt
