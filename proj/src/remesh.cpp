#include "sbmt/remesh.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "sbmt/errors.hpp"

namespace sbmt {

namespace {

enum class PatchSource { Untouched, Catalog, Synthesized, Fallback };

struct FaceOutcome {
  FacePatch patch;
  PatchSource source = PatchSource::Untouched;
  bool violation = false;
  std::pair<int, int> cls{0, 0};
  std::exception_ptr error;
};

// Fan from the centroid of the face's boundary tokens.
FacePatch centroid_fan(const FaceConfig& fc) {
  FacePatch p;
  Point2 c = Point2::Zero();
  for (auto& tok : fc.cycle) c += tok.pos;
  c /= static_cast<double>(fc.cycle.size());
  p.extra.push_back(c);
  const int n = static_cast<int>(fc.cycle.size());
  for (int i = 0; i < n; ++i) p.faces.push_back({fc.cycle[i].point, fc.cycle[(i + 1) % n].point, -1});
  return p;
}

bool is_identity(const FaceConfig& fc, const std::vector<Tri>& tris) {
  if (fc.cycle.size() != 3 || tris.size() != 1) return false;
  Tri a = tris[0], b = {fc.cycle[0].point, fc.cycle[1].point, fc.cycle[2].point};
  for (int r = 0; r < 3; ++r) {
    if (a == b) return true;
    std::rotate(a.begin(), a.begin() + 1, a.end());
  }
  return false;
}

class PatchBuilder {
 public:
  PatchBuilder(const HalfEdgeMesh& mesh, const IntersectionRegistry& reg, const std::vector<PolyChain>& chains,
               bool strict)
      : mesh_(mesh), reg_(reg), chains_(chains), strict_(strict) {}

  FaceOutcome build(int f) const {
    FaceOutcome out;
    FaceConfig fc = classify_face(mesh_, reg_, chains_, f, strict_);
    out.cls = fc.key.cls;
    if (fc.violation) {
      out.violation = true;
      out.patch = centroid_fan(fc);
      out.source = PatchSource::Fallback;
      return out;
    }
    try {
      Patch p = TemplateTable::builtin().lookup(fc.canon);
      auto tris = instantiate(p, fc);
      if (is_identity(fc, tris)) return out;
      for (auto& t : tris)
        if (!(triangle_area(point(t[0]), point(t[1]), point(t[2])) > 0))
          throw OrientationFailure("face " + std::to_string(f) + ": template '" + p.source + "' instance is not CCW");
      out.patch.faces = std::move(tris);
      out.source = p.source == "synthesized" ? PatchSource::Synthesized : PatchSource::Catalog;
    } catch (const PipelineError&) {
      if (strict_) throw;
      out.patch = centroid_fan(fc);
      out.source = PatchSource::Fallback;
    }
    return out;
  }

 private:
  Point2 point(int g) const {
    return g < mesh_.num_vertices() ? mesh_.vertex(g) : reg_.points()[g - mesh_.num_vertices()];
  }
  const HalfEdgeMesh& mesh_;
  const IntersectionRegistry& reg_;
  const std::vector<PolyChain>& chains_;
  bool strict_;
};

// Crossings of one edge, computed in the direction the calling face walks it.
void write_own_crossings(const HalfEdgeMesh& mesh, const ChainIndex& idx, IntersectionRegistry& reg, int u, int w,
                         Tolerance tol) {
  const Point2 &pu = mesh.vertex(u), &pw = mesh.vertex(w);
  for (int sid : idx.segments_in(pu.cwiseMin(pw), pu.cwiseMax(pw))) {
    Segment s = idx.segment(sid);
    if (point_segment_distance(pu, s).dist < tol.eps || point_segment_distance(pw, s).dist < tol.eps) continue;
    auto x = seg_seg_intersect({pu, pw}, s, tol);
    if (x.kind != IntersectKind::Point) continue;
    if ((x.p0 - s.first).norm() < tol.eps || (x.p0 - s.second).norm() < tol.eps) continue;
    const auto& ref = idx.segments()[sid];
    double te = u < w ? x.t1 : 1.0 - x.t1;
    reg.add_edge_record(std::min(u, w), std::max(u, w),
                        {-1, TokenKind::Crossing, ref.chain, ref.seg, te, x.t2, x.p0});
  }
}

std::string class_name(std::pair<int, int> c) {
  return "(" + std::to_string(c.first) + "," + std::to_string(c.second) + ")";
}

// Patch boundary path from u to w along the patch's outer cycle.
std::vector<int> boundary_path(const std::vector<Tri>& tris, int u, int w) {
  std::unordered_map<uint64_t, int> count;
  auto dkey = [](int a, int b) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
  };
  for (auto& t : tris)
    for (int k = 0; k < 3; ++k) ++count[dkey(t[k], t[(k + 1) % 3])];
  std::unordered_map<int, int> next;
  for (auto& t : tris)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (!count.count(dkey(b, a))) next[a] = b;
    }
  std::vector<int> path{u};
  while (path.back() != w) {
    auto it = next.find(path.back());
    if (it == next.end() || path.size() > tris.size() * 3 + 2) return {};
    path.push_back(it->second);
  }
  return path;
}

}  // namespace

HalfEdgeMesh stitch(const HalfEdgeMesh& base, const std::vector<Point2>& shared_points,
                    const std::map<int, FacePatch>& patches, Tolerance tol) {
  std::vector<Point2> pts = base.vertices();
  pts.insert(pts.end(), shared_points.begin(), shared_points.end());
  std::map<int, std::vector<Tri>> resolved;
  for (auto& [f, p] : patches) {
    int first_extra = static_cast<int>(pts.size());
    pts.insert(pts.end(), p.extra.begin(), p.extra.end());
    auto& tris = resolved[f];
    for (Tri t : p.faces) {
      for (int& v : t)
        if (v < 0) v = first_extra + (-v - 1);
      tris.push_back(t);
    }
  }
  // both sides of every base edge must agree on its subdivision
  auto side = [&](int f, int u, int w) {
    auto it = resolved.find(f);
    return it == resolved.end() ? std::vector<int>{u, w} : boundary_path(it->second, u, w);
  };
  for (auto& [f, tris] : resolved) {
    for (int k = 0; k < 3; ++k) {
      int h = 3 * f + k;
      const HalfEdge& he = base.halfedges()[h];
      int u = he.origin, w = base.dest(h);
      auto mine = side(f, u, w);
      if (mine.empty()) throw StitchMismatch("face " + std::to_string(f) + ": patch boundary does not follow its edge");
      if (he.twin < 0) continue;
      auto theirs = side(base.halfedges()[he.twin].face, w, u);
      std::reverse(theirs.begin(), theirs.end());
      if (mine != theirs)
        throw StitchMismatch("faces " + std::to_string(f) + " and " + std::to_string(base.halfedges()[he.twin].face) +
                             " disagree on a shared edge");
    }
  }
  std::vector<Tri> faces;
  faces.reserve(base.num_faces() + resolved.size() * 4);
  for (int f = 0; f < base.num_faces(); ++f) {
    auto it = resolved.find(f);
    if (it == resolved.end()) faces.push_back(base.face(f));
    else faces.insert(faces.end(), it->second.begin(), it->second.end());
  }
  std::vector<int> remap(pts.size(), -1);
  for (auto& t : faces)
    for (int v : t) remap[v] = 0;
  std::vector<Point2> used;
  for (size_t v = 0; v < pts.size(); ++v)
    if (remap[v] == 0) {
      remap[v] = static_cast<int>(used.size());
      used.push_back(pts[v]);
    }
  for (auto& t : faces)
    for (int& v : t) v = remap[v];
  return HalfEdgeMesh::from_indexed(std::move(used), std::move(faces), tol);
}

std::vector<PolyChain> chains_from_mask(const BitmapMask& mask, double e, int* rejected) {
  auto traced = trace_contours(mask, rejected);
  if (traced.empty()) throw EmptyMask("no contour found in the mask");
  std::vector<PolyChain> out;
  for (auto& c : traced) out.push_back(enforce_protocol(c, e));
  return out;
}

GridSpec grid_for_chains(const std::vector<PolyChain>& chains, double e, double margin) {
  Point2 lo = Point2::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (auto& c : chains)
    for (auto& p : c.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  if (!(lo.x() <= hi.x())) throw EmptyMask("no boundary chains");
  return make_grid_spec(lo, hi, e, margin);
}

RemeshResult remesh(const std::vector<PolyChain>& chains, const GridSpec& grid, const Thresholds& t,
                    const RemeshOptions& opt, Tolerance tol) {
  auto t0 = std::chrono::steady_clock::now();
  auto problems = validate_thresholds(t, chains.empty() ? std::numeric_limits<double>::infinity()
                                                        : min_segment_length(chains));
  if (std::abs(grid.edge_length - t.e) > 1e-12) problems.push_back("grid edge length differs from e");
  if (!problems.empty()) {
    std::string msg;
    for (auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw InvalidThresholds(msg);
  }
  if (opt.strict)
    for (size_t i = 0; i < chains.size(); ++i)
      if (!satisfies_protocol(chains[i], t.e))
        throw ProtocolViolation("chain " + std::to_string(i) + " has an angle below 90° or a segment not longer than e");

  RemeshResult res;
  res.chains = chains;
  HalfEdgeMesh base = build_grid(grid);
  res.stats.base_faces = base.num_faces();
  PreprocessOptions pre = opt.pre;
  pre.strict = pre.strict && opt.strict;
  res.preprocessed = preprocess(base, chains, t, pre, tol, &res.stats.elimination);
  const HalfEdgeMesh& mesh = res.preprocessed;

  IntersectionRegistry reg = opt.mutable_registry ? IntersectionRegistry::build_without_crossings(mesh, chains, tol)
                                                  : IntersectionRegistry::build(mesh, chains, tol);
  std::vector<int> faces;
  if (opt.mutable_registry) {
    std::set<int> s;
    for (auto& [f, segs] : find_intersected_faces(mesh, chains, tol, opt.strict)) s.insert(f);
    for (int f : reg.touched_faces(mesh)) s.insert(f);
    faces.assign(s.begin(), s.end());
  } else {
    faces = reg.touched_faces(mesh);
  }
  res.stats.touched_faces = static_cast<int>(faces.size());

  std::vector<size_t> order(faces.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (opt.schedule_seed != 0) std::shuffle(order.begin(), order.end(), std::mt19937_64(opt.schedule_seed));

  std::vector<FaceOutcome> outcomes(faces.size());
  PatchBuilder builder(mesh, reg, res.chains, opt.strict);
  std::atomic<size_t> cursor{0};
  std::mutex hook_lock;
  std::unordered_set<uint64_t> written_edges;
  ChainIndex idx(res.chains, t.e);
  auto worker = [&] {
    for (size_t k; (k = cursor.fetch_add(1)) < order.size();) {
      size_t i = order[k];
      int f = faces[i];
      try {
        if (opt.mutable_registry) {
          std::lock_guard<std::mutex> g(hook_lock);
          const Tri& tr = mesh.face(f);
          for (int e = 0; e < 3; ++e)
            if (written_edges.insert(edge_key(tr[e], tr[(e + 1) % 3])).second)
              write_own_crossings(mesh, idx, reg, tr[e], tr[(e + 1) % 3], tol);
          outcomes[i] = builder.build(f);
        } else {
          outcomes[i] = builder.build(f);
        }
      } catch (...) {
        outcomes[i].error = std::current_exception();
      }
    }
  };
  int n_threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(faces.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::map<int, FacePatch> patches;
  std::map<int, std::string> labels;
  for (size_t i = 0; i < faces.size(); ++i) {
    auto& o = outcomes[i];
    if (o.error) std::rethrow_exception(o.error);  // lowest face id first
    if (o.source == PatchSource::Untouched) continue;
    labels[faces[i]] = o.source == PatchSource::Fallback ? "fallback" : class_name(o.cls);
    ++res.stats.classes[class_name(o.cls)];
    ++res.stats.replaced_faces;
    if (o.violation) ++res.stats.protocol_violations;
    if (o.source == PatchSource::Catalog) ++res.stats.catalog_patches;
    if (o.source == PatchSource::Synthesized) ++res.stats.synthesized_patches;
    if (o.source == PatchSource::Fallback) ++res.stats.fallback_faces;
    patches.emplace(faces[i], std::move(o.patch));
  }
  res.registry_points = reg.points();
  // stitch keeps base face order, each patch contributing its faces in place
  for (int f = 0; f < mesh.num_faces(); ++f) {
    auto it = patches.find(f);
    if (it == patches.end()) res.face_class.emplace_back();
    else res.face_class.insert(res.face_class.end(), it->second.faces.size(), labels[f]);
  }
  res.mesh = stitch(mesh, res.registry_points, patches, tol);
  res.stats.output_faces = res.mesh.num_faces();
  res.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

RemeshResult remesh(const BitmapMask& mask, const Thresholds& t, const RemeshOptions& opt, Tolerance tol) {
  auto chains = chains_from_mask(mask, t.e);
  return remesh(chains, grid_for_chains(chains, t.e), t, opt, tol);
}

HalfEdgeMesh inside_region(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains,
                           std::vector<int>* kept_faces) {
  std::vector<Tri> kept;
  if (kept_faces) kept_faces->clear();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Tri& t = mesh.face(f);
    Point2 c = (mesh.vertex(t[0]) + mesh.vertex(t[1]) + mesh.vertex(t[2])) / 3.0;
    if (winding_number(chains, c) == 0) continue;
    kept.push_back(t);
    if (kept_faces) kept_faces->push_back(f);
  }
  std::vector<int> remap(mesh.num_vertices(), -1);
  std::vector<Point2> verts;
  for (auto& t : kept)
    for (int v : t) remap[v] = 0;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (remap[v] == 0) {
      remap[v] = static_cast<int>(verts.size());
      verts.push_back(mesh.vertex(v));
    }
  for (auto& t : kept)
    for (int& v : t) v = remap[v];
  return HalfEdgeMesh::from_indexed(std::move(verts), std::move(kept));
}

PathIndependenceReport check_path_independence(const std::vector<PolyChain>& chains, const GridSpec& grid,
                                               const Thresholds& t, RemeshOptions opt, int n_shuffles,
                                               Tolerance tol) {
  PathIndependenceReport rep;
  opt.schedule_seed = 0;
  const std::string ref = canonical_serialization(remesh(chains, grid, t, opt, tol).mesh, tol);
  rep.runs = 1;
  for (int s = 1; s <= n_shuffles; ++s) {
    opt.schedule_seed = static_cast<uint64_t>(s);
    std::string got = canonical_serialization(remesh(chains, grid, t, opt, tol).mesh, tol);
    ++rep.runs;
    if (got != ref && rep.ok) {
      rep.ok = false;
      rep.counterexample_seed = opt.schedule_seed;
      auto mm = std::mismatch(ref.begin(), ref.end(), got.begin(), got.end());
      rep.first_difference = static_cast<size_t>(mm.first - ref.begin());
    }
  }
  return rep;
}

}  // namespace sbmt
