#include "sbmt/classify.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "sbmt/errors.hpp"
#include "sbmt/spatial.hpp"

namespace sbmt {

namespace {

const std::vector<IntersectionRecord> kNoRecords;
const std::vector<VertexContact> kNoContacts;
const std::vector<ApexRecord> kNoApexes;

double mesh_cell(const HalfEdgeMesh& mesh) {
  if (mesh.num_faces() == 0) return 1.0;
  const Tri& f = mesh.face(0);
  return std::max((mesh.vertex(f[0]) - mesh.vertex(f[1])).norm(), 1e-3);
}

BucketGrid face_grid(const HalfEdgeMesh& mesh) {
  BucketGrid g(mesh_cell(mesh));
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Tri& t = mesh.face(f);
    const Point2 &a = mesh.vertex(t[0]), &b = mesh.vertex(t[1]), &c = mesh.vertex(t[2]);
    g.insert(f, a.cwiseMin(b).cwiseMin(c), a.cwiseMax(b).cwiseMax(c));
  }
  return g;
}

}  // namespace

void IntersectionRegistry::check_mutable() const {
  if (frozen_) throw RegistryFrozen("registry is read-only after freeze()");
}

void IntersectionRegistry::add_edge_record(int u, int v, IntersectionRecord r) {
  check_mutable();
  r.id = static_cast<int>(points_.size());
  points_.push_back(r.point);
  auto& list = edges_[edge_key(u, v)];
  auto pos = std::upper_bound(list.begin(), list.end(), r.t_edge,
                              [](double t, const IntersectionRecord& x) { return t < x.t_edge; });
  list.insert(pos, r);
}

void IntersectionRegistry::add_vertex_contact(int v, VertexContact c) {
  check_mutable();
  contacts_[v].push_back(c);
}

void IntersectionRegistry::add_apex(int face, int chain, int index, const Point2& p) {
  check_mutable();
  apexes_[face].push_back({static_cast<int>(points_.size()), chain, index, p});
  points_.push_back(p);
}

void IntersectionRegistry::freeze() { frozen_ = true; }

const std::vector<IntersectionRecord>& IntersectionRegistry::edge_records(int u, int v) const {
  auto it = edges_.find(edge_key(u, v));
  return it == edges_.end() ? kNoRecords : it->second;
}

const std::vector<VertexContact>& IntersectionRegistry::vertex_contacts(int v) const {
  auto it = contacts_.find(v);
  return it == contacts_.end() ? kNoContacts : it->second;
}

const std::vector<ApexRecord>& IntersectionRegistry::apexes(int face) const {
  auto it = apexes_.find(face);
  return it == apexes_.end() ? kNoApexes : it->second;
}

std::vector<int> IntersectionRegistry::touched_faces(const HalfEdgeMesh& mesh) const {
  std::vector<int> out;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Tri& t = mesh.face(f);
    bool hit = apexes_.count(f) > 0;
    for (int k = 0; k < 3 && !hit; ++k)
      hit = contacts_.count(t[k]) || edges_.count(edge_key(t[k], t[(k + 1) % 3]));
    if (hit) out.push_back(f);
  }
  return out;
}

IntersectionRegistry IntersectionRegistry::build(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains,
                                                 Tolerance tol) {
  auto reg = build_impl(mesh, chains, tol, true);
  reg.freeze();
  return reg;
}

IntersectionRegistry IntersectionRegistry::build_without_crossings(const HalfEdgeMesh& mesh,
                                                                   const std::vector<PolyChain>& chains, Tolerance tol) {
  return build_impl(mesh, chains, tol, false);
}

IntersectionRegistry IntersectionRegistry::build_impl(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains,
                                                      Tolerance tol, bool crossings) {
  IntersectionRegistry reg;
  const auto& V = mesh.vertices();
  BucketGrid fgrid = face_grid(mesh);
  BucketGrid vgrid(mesh_cell(mesh));
  for (int v = 0; v < mesh.num_vertices(); ++v) vgrid.insert(v, V[v]);

  struct Pending {
    uint64_t key;
    int u, v;
    IntersectionRecord r;
  };
  std::vector<Pending> pending;
  std::vector<std::tuple<int, int, int>> apexes;  // face, chain, index

  for (int c = 0; c < static_cast<int>(chains.size()); ++c) {
    const PolyChain& ch = chains[c];
    // chain vertices: on a mesh vertex, on an edge interior, or inside a face
    for (int i = 0; i < static_cast<int>(ch.points.size()); ++i) {
      const Point2& p = ch.points[i];
      bool on_vertex = false;
      for (int v : vgrid.query(p, tol.eps))
        if ((V[v] - p).norm() < tol.eps) on_vertex = true;
      if (on_vertex) continue;
      auto faces = fgrid.query(p, tol.eps);
      bool placed = false;
      for (int f : faces) {
        const Tri& t = mesh.face(f);
        for (int k = 0; k < 3 && !placed; ++k) {
          int u = t[k], w = t[(k + 1) % 3];
          auto d = point_segment_distance(p, {V[u], V[w]});
          if (d.dist < tol.eps && !d.clamped) {
            int lo = std::min(u, w), hi = std::max(u, w);
            double te = point_segment_distance(p, {V[lo], V[hi]}).t;
            pending.push_back({edge_key(u, w), lo, hi, {-1, TokenKind::ChainVertex, c, i, te, 0.0, p}});
            placed = true;
          }
        }
        if (placed) break;
      }
      if (placed) continue;
      for (int f : faces) {
        const Tri& t = mesh.face(f);
        if (orient2d(V[t[0]], V[t[1]], p, tol) > 0 && orient2d(V[t[1]], V[t[2]], p, tol) > 0 &&
            orient2d(V[t[2]], V[t[0]], p, tol) > 0) {
          apexes.emplace_back(f, c, i);
          break;
        }
      }
    }
    // segments: vertex contacts, then proper crossings of the remaining edges
    for (int k = 0; k < ch.num_segments(); ++k) {
      Segment s = ch.segment(k);
      Point2 lo = s.first.cwiseMin(s.second).array() - tol.eps;
      Point2 hi = s.first.cwiseMax(s.second).array() + tol.eps;
      std::vector<int> on_seg;
      for (int v : vgrid.query(lo, hi)) {
        auto d = point_segment_distance(V[v], s);
        if (d.dist < tol.eps) {
          reg.contacts_[v].push_back({c, k, d.t});
          on_seg.push_back(v);
        }
      }
      if (!crossings) continue;
      std::vector<uint64_t> seen;
      for (int f : fgrid.query(lo, hi)) {
        const Tri& t = mesh.face(f);
        for (int e = 0; e < 3; ++e) {
          int u = std::min(t[e], t[(e + 1) % 3]), w = std::max(t[e], t[(e + 1) % 3]);
          uint64_t key = edge_key(u, w);
          if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
          seen.push_back(key);
          if (std::binary_search(on_seg.begin(), on_seg.end(), u) || std::binary_search(on_seg.begin(), on_seg.end(), w))
            continue;
          auto x = seg_seg_intersect({V[u], V[w]}, s, tol);
          if (x.kind != IntersectKind::Point) continue;
          if ((x.p0 - s.first).norm() < tol.eps || (x.p0 - s.second).norm() < tol.eps) continue;  // chain vertex
          pending.push_back({key, u, w, {-1, TokenKind::Crossing, c, k, x.t1, x.t2, x.p0}});
        }
      }
    }
  }
  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.key, a.r.t_edge) < std::tie(b.key, b.r.t_edge);
  });
  for (auto& p : pending) reg.add_edge_record(p.u, p.v, p.r);
  std::sort(apexes.begin(), apexes.end());
  for (auto [f, c, i] : apexes) reg.add_apex(f, c, i, chains[c].points[i]);
  for (auto& [v, list] : reg.contacts_)
    std::sort(list.begin(), list.end(), [](const VertexContact& a, const VertexContact& b) {
      return std::tie(a.chain, a.seg) < std::tie(b.chain, b.seg);
    });
  return reg;
}

std::array<int, 3> vertex_positions(const SymConfig& c) {
  std::array<int, 3> vp{-1, -1, -1};
  int k = 0;
  for (int i = 0; i < static_cast<int>(c.cycle.size()) && k < 3; ++i)
    if (c.cycle[i] == TokenKind::Vertex) vp[k++] = i;
  return vp;
}

int token_edges(const SymConfig& c, int i) {
  if (i == kApex) return 0;
  auto vp = vertex_positions(c);
  for (int k = 0; k < 3; ++k)
    if (vp[k] == i) return (1 << k) | (1 << ((k + 2) % 3));
  for (int k = 0; k < 3; ++k) {
    int end = k < 2 ? vp[k + 1] : static_cast<int>(c.cycle.size());
    if (i > vp[k] && i < end) return 1 << k;
  }
  return 0;
}

std::pair<int, int> config_class(const SymConfig& c) {
  std::vector<int> w;
  for (auto& tr : c.traces) {
    if (tr.size() == 2 && tr[0] != kApex && tr[1] != kApex && (token_edges(c, tr[0]) & token_edges(c, tr[1]))) {
      w.push_back(1);  // collinear overlap
      continue;
    }
    int s = 0;
    for (int t : tr)
      if (t != kApex) s += c.cycle[t] == TokenKind::Vertex ? 2 : 1;
    w.push_back(s);
  }
  while (w.size() < 2) w.insert(w.begin(), 0);
  std::sort(w.begin(), w.end());
  return {w[0], w[1]};
}

bool admissible_class(std::pair<int, int> mn) {
  static const std::pair<int, int> ok[] = {{0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {2, 2}, {1, 3}, {2, 3}};
  return std::find(std::begin(ok), std::end(ok), mn) != std::end(ok);
}

std::string signature(const SymConfig& c) {
  std::string s;
  for (auto k : c.cycle) s += static_cast<char>(k);
  s += c.has_apex ? "|X" : "|-";
  for (auto& tr : c.traces) {
    s += '|';
    for (size_t i = 0; i < tr.size(); ++i) {
      if (i) s += ',';
      s += tr[i] == kApex ? std::string("X") : std::to_string(tr[i]);
    }
  }
  return s;
}

Canonical canonicalize(const SymConfig& c) {
  const int n = static_cast<int>(c.cycle.size());
  auto vp = vertex_positions(c);
  Canonical best;
  bool have = false;
  for (int r = 0; r < 3; ++r)
    for (int rev = 0; rev < 2; ++rev) {
      SymConfig x;
      x.has_apex = c.has_apex;
      x.cycle.resize(n);
      for (int i = 0; i < n; ++i) x.cycle[i] = c.cycle[(i + vp[r]) % n];
      x.traces = c.traces;
      for (auto& tr : x.traces)
        for (int& t : tr)
          if (t != kApex) t = (t - vp[r] + n) % n;
      if (rev) {
        std::reverse(x.traces.begin(), x.traces.end());
        for (auto& tr : x.traces) std::reverse(tr.begin(), tr.end());
      }
      std::string key = signature(x);
      if (!have || key < best.key) {
        best = {std::move(x), std::move(key), vp[r], r, rev != 0};
        have = true;
      }
    }
  return best;
}

SymConfig mirror(const SymConfig& c) {
  const int n = static_cast<int>(c.cycle.size());
  SymConfig m;
  m.has_apex = c.has_apex;
  m.cycle.resize(n);
  for (int i = 0; i < n; ++i) m.cycle[(n - i) % n] = c.cycle[i];
  m.traces = c.traces;
  for (auto& tr : m.traces)
    for (int& t : tr)
      if (t != kApex) t = (n - t) % n;
  return m;
}

std::string ConfigKey::sym_tag() const { return "r" + std::to_string(rotation) + (reversed ? "b" : "f"); }

FaceConfig classify_face(const HalfEdgeMesh& mesh, const IntersectionRegistry& reg,
                         const std::vector<PolyChain>& chains, int face, bool strict) {
  FaceConfig fc;
  fc.face = face;
  const Tri& t = mesh.face(face);
  const int nv = mesh.num_vertices();

  using SegId = std::pair<int, int>;
  std::map<SegId, std::vector<std::pair<double, int>>> hits;
  auto chain_vertex_segments = [&](int c, int i, int pos) {
    const PolyChain& ch = chains[c];
    const int np = static_cast<int>(ch.points.size()), ns = ch.num_segments();
    if (i > 0 || ch.closed) hits[{c, (i + np - 1) % np}].push_back({1.0, pos});
    if (i < ns) hits[{c, i}].push_back({0.0, pos});
  };

  for (int k = 0; k < 3; ++k) {
    int u = t[k], w = t[(k + 1) % 3];
    int pos = static_cast<int>(fc.cycle.size());
    fc.cycle.push_back({TokenKind::Vertex, u, mesh.vertex(u)});
    for (auto& ct : reg.vertex_contacts(u)) hits[{ct.chain, ct.seg}].push_back({ct.t, pos});
    auto recs = reg.edge_records(u, w);
    std::vector<IntersectionRecord> ordered(recs.begin(), recs.end());
    if (u > w) std::reverse(ordered.begin(), ordered.end());
    for (auto& r : ordered) {
      int p = static_cast<int>(fc.cycle.size());
      fc.cycle.push_back({r.kind, nv + r.id, r.point});
      if (r.kind == TokenKind::Crossing) hits[{r.chain, r.seg}].push_back({r.t_seg, p});
      else chain_vertex_segments(r.chain, r.seg, p);
    }
  }
  auto& ap = reg.apexes(face);
  auto fail = [&](const std::string& why) {
    if (strict) throw ProtocolViolation("face " + std::to_string(face) + ": " + why);
    fc.violation = true;
    fc.violation_reason = why;
  };
  if (ap.size() > 1) fail("more than one chain vertex inside the face");
  if (!ap.empty()) {
    fc.has_apex = true;
    fc.apex = {TokenKind::ChainVertex, nv + ap[0].id, ap[0].point};
    chain_vertex_segments(ap[0].chain, ap[0].index, kApex);
  }

  std::vector<FaceConfig::Trace> traces;
  for (auto& [sid, list] : hits) {
    std::stable_sort(list.begin(), list.end());
    FaceConfig::Trace tr{sid.first, sid.second, {}};
    for (auto& [tt, pos] : list)
      if (tr.tokens.empty() || tr.tokens.back() != pos) tr.tokens.push_back(pos);
    traces.push_back(std::move(tr));
  }
  auto consecutive = [&](const std::vector<FaceConfig::Trace>& ts) {
    if (ts.size() <= 1) return true;
    if (ts.size() > 2 || ts[0].chain != ts[1].chain) return false;
    const PolyChain& ch = chains[ts[0].chain];
    int a = ts[0].seg, b = ts[1].seg;
    return b == a + 1 || (ch.closed && a == 0 && b == ch.num_segments() - 1);
  };
  if (!consecutive(traces)) {
    // a segment meeting the face only at one triangle vertex adds nothing
    std::vector<FaceConfig::Trace> kept;
    for (auto& tr : traces)
      if (!(tr.tokens.size() == 1 && tr.tokens[0] != kApex && fc.cycle[tr.tokens[0]].kind == TokenKind::Vertex))
        kept.push_back(tr);
    traces = std::move(kept);
    if (!consecutive(traces)) {
      fail(traces.size() > 2 ? "more than two chain segments meet the face" : "segments are not consecutive");
      traces.resize(std::min<size_t>(traces.size(), 2));
    }
  }
  if (traces.size() == 2 && traces[0].seg == 0 && traces[1].seg != 1) std::swap(traces[0], traces[1]);
  fc.traces = traces;

  fc.sym.has_apex = fc.has_apex;
  for (auto& tok : fc.cycle) fc.sym.cycle.push_back(tok.kind);
  for (auto& tr : fc.traces) fc.sym.traces.push_back(tr.tokens);
  fc.canon = canonicalize(fc.sym);
  fc.key.key = fc.canon.key;
  fc.key.cls = config_class(fc.sym);
  fc.key.rotation = fc.canon.rotation;
  fc.key.reversed = fc.canon.reversed;
  int mask = 0;
  for (auto& tr : fc.sym.traces)
    for (int p : tr) mask |= token_edges(fc.sym, p);
  fc.key.edge_mask = ((mask & 1) ? 2 : 0) | ((mask & 2) ? 4 : 0) | ((mask & 4) ? 8 : 0);
  if (!fc.violation && !fc.traces.empty() && !admissible_class(fc.key.cls))
    fail("class (" + std::to_string(fc.key.cls.first) + "," + std::to_string(fc.key.cls.second) + ") is not admissible");
  return fc;
}

namespace {

// Whether part of s lies strictly inside the triangle (a, b, c).
bool meets_interior(const Point2& a, const Point2& b, const Point2& c, const Segment& s, Tolerance tol) {
  double t0 = 0, t1 = 1;
  const Point2 d = s.second - s.first;
  for (auto [p, q] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) {
    // keep the part left of pq
    double f0 = orient_raw(p, q, s.first), fd = cross(q - p, d);
    if (std::abs(fd) < 1e-300) {
      if (f0 <= 0) return false;
      continue;
    }
    double t = -f0 / fd;
    if (fd > 0) t0 = std::max(t0, t);
    else t1 = std::min(t1, t);
  }
  if (!(t1 > t0)) return false;
  Point2 m = s.first + 0.5 * (t0 + t1) * d;
  return orient2d(a, b, m, tol) > 0 && orient2d(b, c, m, tol) > 0 && orient2d(c, a, m, tol) > 0;
}

}  // namespace

std::vector<std::pair<int, std::vector<std::pair<int, int>>>> find_intersected_faces(
    const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, Tolerance tol, bool strict) {
  BucketGrid fgrid = face_grid(mesh);
  std::map<int, std::vector<std::pair<int, int>>> out;
  for (int c = 0; c < static_cast<int>(chains.size()); ++c)
    for (int k = 0; k < chains[c].num_segments(); ++k) {
      Segment s = chains[c].segment(k);
      Point2 lo = s.first.cwiseMin(s.second).array() - tol.eps;
      Point2 hi = s.first.cwiseMax(s.second).array() + tol.eps;
      for (int f : fgrid.query(lo, hi)) {
        const Tri& t = mesh.face(f);
        const Point2 &a = mesh.vertex(t[0]), &b = mesh.vertex(t[1]), &cc = mesh.vertex(t[2]);
        bool hit = orient2d(a, b, s.first, tol) >= 0 && orient2d(b, cc, s.first, tol) >= 0 &&
                   orient2d(cc, a, s.first, tol) >= 0;
        for (auto& e : {Segment{a, b}, Segment{b, cc}, Segment{cc, a}})
          if (!hit) hit = seg_seg_intersect(e, s, tol).kind != IntersectKind::None;
        if (hit) out[f].push_back({c, k});
      }
    }
  if (strict)
    for (auto& [f, segs] : out) {
      if (segs.size() <= 2) continue;
      const Tri& t = mesh.face(f);
      int through = 0;
      for (auto [c, k] : segs) through += meets_interior(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]), chains[c].segment(k), tol);
      if (through > 2)
        throw ProtocolViolation("face " + std::to_string(f) + " is crossed by " + std::to_string(through) + " segments");
    }
  return {out.begin(), out.end()};
}

std::vector<EdgeEvent> classify_edge_event(const Segment& edge, const Segment& seg, Tolerance tol) {
  std::vector<EdgeEvent> ev;
  auto x = seg_seg_intersect(edge, seg, tol);
  if (x.kind == IntersectKind::None) return ev;
  auto near = [&](const Point2& p, const Point2& q) { return (p - q).norm() < tol.eps; };
  if (x.kind == IntersectKind::Overlap) {
    auto inside = [&](const Point2& p) {
      return point_segment_distance(p, {x.p0, x.p1}).dist < tol.eps;
    };
    char who = inside(edge.first) ? 'A' : inside(edge.second) ? 'B' : inside(seg.first) ? 'P' : 'Q';
    ev.push_back({EventKind::ColinearOverlap, x.p0, who, x.t1});
    return ev;
  }
  if (near(x.p0, edge.first)) ev.push_back({EventKind::VertexOnSegment, edge.first, 'A', 0.0});
  else if (near(x.p0, edge.second)) ev.push_back({EventKind::VertexOnSegment, edge.second, 'B', 1.0});
  else if (near(x.p0, seg.first)) ev.push_back({EventKind::EndpointOnEdge, seg.first, 'P', x.t1});
  else if (near(x.p0, seg.second)) ev.push_back({EventKind::EndpointOnEdge, seg.second, 'Q', x.t1});
  else ev.push_back({EventKind::Crossing, x.p0, 'x', x.t1});
  return ev;
}

}  // namespace sbmt
