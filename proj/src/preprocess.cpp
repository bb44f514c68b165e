#include "sbmt/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <unordered_map>

#include "sbmt/errors.hpp"

namespace sbmt {

std::vector<std::string> validate_thresholds(const Thresholds& t, double min_boundary_seg) {
  std::vector<std::string> v;
  if (!(t.a > 0) || !(t.b > 0) || !(t.c > 0) || !(t.e > 0)) v.push_back("thresholds must be positive");
  if (!(t.e < 1)) v.push_back("e ≥ 1");
  if (!(t.b < t.a / 2)) v.push_back("b ≥ a/2");
  if (!(t.c < t.a / std::sqrt(2.0))) v.push_back("c ≥ a/√2");
  if (!(t.a < t.e / 2)) v.push_back("a ≥ e/2");
  if (!(t.e < min_boundary_seg)) v.push_back("e ≥ min boundary segment");
  return v;
}

ChainIndex::ChainIndex(const std::vector<PolyChain>& chains, double cell)
    : chains_(&chains), seg_grid_(cell), vtx_grid_(cell) {
  for (int c = 0; c < static_cast<int>(chains.size()); ++c) {
    for (int k = 0; k < chains[c].num_segments(); ++k) {
      auto s = chains[c].segment(k);
      seg_grid_.insert(static_cast<int>(segs_.size()), s.first.cwiseMin(s.second), s.first.cwiseMax(s.second));
      segs_.push_back({c, k});
    }
    for (int i = 0; i < static_cast<int>(chains[c].points.size()); ++i) {
      vtx_grid_.insert(static_cast<int>(verts_.size()), chains[c].points[i]);
      verts_.push_back({c, i});
    }
  }
}

namespace {

double cell_for(const HalfEdgeMesh& mesh) {
  if (mesh.num_faces() == 0) return 1.0;
  const Tri& f = mesh.face(0);
  return std::max((mesh.vertex(f[0]) - mesh.vertex(f[1])).norm(), 1e-3);
}

}  // namespace

DisplacementMap snap_vertices(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, double a,
                              Tolerance) {
  ChainIndex idx(chains, std::max(a, cell_for(mesh)));
  DisplacementMap out;
  std::unordered_map<int, int> taken;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Point2& p = mesh.vertex(v);
    int best = -1;
    double bd = a;
    for (int cv : idx.vertices_near(p, a)) {
      double d = (idx.point(cv) - p).norm();
      if (d < bd) {  // ascending ids: equal distance keeps the lower chain/index
        bd = d;
        best = cv;
      }
    }
    if (best < 0) continue;
    if (!taken.emplace(best, v).second)
      throw PipelineError("SnapCollision", "two mesh vertices snap to one chain vertex (a too large?)");
    out.emplace_back(v, idx.point(best));
  }
  return out;
}

DisplacementMap repel_vertices(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, double c,
                               double exclude_radius, Tolerance tol) {
  ChainIndex idx(chains, std::max(c, cell_for(mesh)));
  DisplacementMap out;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Point2& p = mesh.vertex(v);
    if (exclude_radius > 0) {
      bool snaps = false;
      for (int cv : idx.vertices_near(p, exclude_radius))
        if ((idx.point(cv) - p).norm() < exclude_radius) snaps = true;
      if (snaps) continue;
    }
    int best = -1;
    SegmentDistance bd{std::numeric_limits<double>::infinity(), p, false, 0};
    for (int sid : idx.segments_near(p, c)) {
      auto d = point_segment_distance(p, idx.segment(sid));
      if (d.dist < bd.dist) {
        bd = d;
        best = sid;
      }
    }
    if (best < 0 || bd.dist >= c || bd.dist < tol.eps) continue;  // far away, or on the boundary
    Point2 dir = (p - bd.foot) / bd.dist;
    // an unclamped foot moves along the normal; a clamped one radially from the chain vertex
    out.emplace_back(v, Point2(bd.foot + c * dir));
  }
  return out;
}

HalfEdgeMesh apply_displacements(const HalfEdgeMesh& mesh, const DisplacementMap& d) {
  std::vector<Point2> verts = mesh.vertices();
  for (auto& [v, p] : d) verts[v] = p;
  return HalfEdgeMesh::from_indexed(std::move(verts), mesh.faces());
}

HalfEdgeMesh eliminate_edges(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, double b, bool strict,
                             EliminationStats* stats, Tolerance tol) {
  const double cell = cell_for(mesh);
  std::vector<Point2> V = mesh.vertices();
  std::vector<Tri> F = mesh.faces();
  // undirected edge -> incident faces
  std::unordered_map<uint64_t, std::array<int, 2>> edges;
  auto add_face_edges = [&](int f) {
    for (int k = 0; k < 3; ++k) {
      auto& s = edges.try_emplace(edge_key(F[f][k], F[f][(k + 1) % 3]), std::array<int, 2>{-1, -1}).first->second;
      (s[0] < 0 ? s[0] : s[1]) = f;
    }
  };
  auto drop_face_edges = [&](int f) {
    for (int k = 0; k < 3; ++k) {
      auto it = edges.find(edge_key(F[f][k], F[f][(k + 1) % 3]));
      auto& s = it->second;
      if (s[0] == f) s[0] = s[1];
      s[1] = -1;
      if (s[0] < 0) edges.erase(it);
    }
  };
  for (int f = 0; f < static_cast<int>(F.size()); ++f) add_face_edges(f);
  BucketGrid fgrid(cell), vgrid(cell);
  auto index_face = [&](int f) {
    Point2 lo = V[F[f][0]].cwiseMin(V[F[f][1]]).cwiseMin(V[F[f][2]]);
    Point2 hi = V[F[f][0]].cwiseMax(V[F[f][1]]).cwiseMax(V[F[f][2]]);
    fgrid.insert(f, lo, hi);
  };
  for (int f = 0; f < static_cast<int>(F.size()); ++f) index_face(f);
  for (int v = 0; v < static_cast<int>(V.size()); ++v) vgrid.insert(v, V[v]);

  EliminationStats st;
  for (auto& chain : chains)
    for (const Point2& p : chain.points) {
      bool on_vertex = false;
      for (int v : vgrid.query(p, tol.eps))
        if ((V[v] - p).norm() < tol.eps) on_vertex = true;
      if (on_vertex) continue;

      // flagged edges: interior foot within distance b
      struct Flag {
        double d;
        int u, v;
      };
      std::vector<Flag> flags;
      for (int f : fgrid.query(p, b)) {
        for (int k = 0; k < 3; ++k) {
          int u = F[f][k], v = F[f][(k + 1) % 3];
          if (u > v) continue;  // each undirected edge once per face; its twin sees the other order
          auto d = point_segment_distance(p, {V[u], V[v]});
          if (d.dist < b && !d.clamped) flags.push_back({d.dist, u, v});
        }
        for (int k = 0; k < 3; ++k) {
          int u = F[f][k], v = F[f][(k + 1) % 3];
          if (u < v) continue;
          auto d = point_segment_distance(p, {V[v], V[u]});
          if (d.dist < b && !d.clamped) flags.push_back({d.dist, v, u});
        }
      }
      if (flags.empty()) continue;
      std::sort(flags.begin(), flags.end(), [](const Flag& x, const Flag& y) {
        return std::tie(x.d, x.u, x.v) < std::tie(y.d, y.u, y.v);
      });
      flags.erase(std::unique(flags.begin(), flags.end(),
                              [](const Flag& x, const Flag& y) { return x.u == y.u && x.v == y.v; }),
                  flags.end());
      const Flag& g = flags.front();
      auto inc = edges.at(edge_key(g.u, g.v));
      // two flagged edges on one face cannot both be removed
      bool conflict = false;
      for (size_t i = 1; i < flags.size(); ++i) {
        auto other = edges.at(edge_key(flags[i].u, flags[i].v));
        for (int f0 : inc)
          for (int f1 : other)
            if (f0 >= 0 && f0 == f1) conflict = true;
      }
      if (conflict) {
        if (strict) throw ConflictingDeletion("two edges of one triangle within b of a boundary point");
        ++st.conflicts;
      }

      // each incident face (u', v', w) with edge {u, v} becomes (u', p, w), (p, v', w)
      int pid = static_cast<int>(V.size());
      std::vector<std::pair<int, std::array<Tri, 2>>> repl;
      bool ok = true;
      for (int f : inc) {
        if (f < 0) continue;
        Tri t = F[f];
        int k = 0;
        while (!((t[k] == g.u && t[(k + 1) % 3] == g.v) || (t[k] == g.v && t[(k + 1) % 3] == g.u))) ++k;
        int s = t[k], e = t[(k + 1) % 3], w = t[(k + 2) % 3];
        Tri t0{s, pid, w}, t1{pid, e, w};
        if (!(triangle_area(V[s], p, V[w]) > 0) || !(triangle_area(p, V[e], V[w]) > 0)) ok = false;
        repl.push_back({f, {t0, t1}});
      }
      if (!ok) {
        if (strict) throw OrientationFailure("edge elimination would invert a face");
        ++st.conflicts;
        continue;
      }
      V.push_back(p);
      vgrid.insert(pid, p);
      for (auto& [f, ts] : repl) {
        drop_face_edges(f);
        F[f] = ts[0];
        add_face_edges(f);
        index_face(f);
        F.push_back(ts[1]);
        add_face_edges(static_cast<int>(F.size()) - 1);
        index_face(static_cast<int>(F.size()) - 1);
      }
      if (repl.size() == 1) ++st.hull_splits;
      else ++st.splits;
    }
  if (stats) *stats = st;
  return HalfEdgeMesh::from_indexed(std::move(V), std::move(F));
}

HalfEdgeMesh preprocess(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, const Thresholds& t,
                        const PreprocessOptions& opt, Tolerance tol, EliminationStats* stats) {
  // both maps read the original positions, so they can run side by side
  DisplacementMap snap, repel;
  std::thread repel_worker;
  if (opt.repel) repel_worker = std::thread([&] { repel = repel_vertices(mesh, chains, t.c, opt.snap ? t.a : 0.0, tol); });
  std::exception_ptr snap_error;
  try {
    if (opt.snap) snap = snap_vertices(mesh, chains, t.a, tol);
  } catch (...) {
    snap_error = std::current_exception();
  }
  if (repel_worker.joinable()) repel_worker.join();
  if (snap_error) std::rethrow_exception(snap_error);
  HalfEdgeMesh m = mesh;
  if (opt.repel_first) {
    m = apply_displacements(m, repel);
    m = apply_displacements(m, snap);
  } else {
    m = apply_displacements(m, snap);
    m = apply_displacements(m, repel);
  }
  if (opt.eliminate) m = eliminate_edges(m, chains, t.b, opt.strict, stats, tol);
  return m;
}

}  // namespace sbmt
