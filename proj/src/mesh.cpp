#include "sbmt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "sbmt/errors.hpp"
#include "sbmt/spatial.hpp"

namespace sbmt {

std::string format_double(double v) {
  if (v == 0) v = 0;  // drop negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

HalfEdgeMesh HalfEdgeMesh::from_indexed(std::vector<Point2> vertices, std::vector<Tri> faces, Tolerance) {
  HalfEdgeMesh m;
  m.vertices_ = std::move(vertices);
  m.faces_ = std::move(faces);
  const int nf = m.num_faces();
  m.halfedges_.resize(3 * static_cast<size_t>(nf));
  std::unordered_map<uint64_t, int> open;
  open.reserve(3 * static_cast<size_t>(nf));
  for (int f = 0; f < nf; ++f) {
    const Tri& t = m.faces_[f];
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= m.num_vertices()) throw NonManifoldEdge("face references missing vertex");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw ZeroAreaFace("face " + std::to_string(f) + " repeats a vertex");
    if (!(triangle_area(m.vertices_[t[0]], m.vertices_[t[1]], m.vertices_[t[2]]) > 0))
      throw ZeroAreaFace("face " + std::to_string(f) + " has non-positive area");
    for (int k = 0; k < 3; ++k) {
      int h = 3 * f + k;
      m.halfedges_[h] = {t[k], -1, 3 * f + (k + 1) % 3, f};
    }
  }
  // pair half-edges; a directed edge seen twice or an edge with >2 faces is non-manifold
  std::unordered_map<uint64_t, std::array<int, 3>> uses;
  uses.reserve(3 * static_cast<size_t>(nf));
  for (int h = 0; h < 3 * nf; ++h) {
    int u = m.halfedges_[h].origin, v = m.faces_[h / 3][(h % 3 + 1) % 3];
    auto& slot = uses.try_emplace(edge_key(u, v), std::array<int, 3>{-1, -1, 0}).first->second;
    if (slot[2] >= 2) throw NonManifoldEdge("edge (" + std::to_string(u) + "," + std::to_string(v) + ") has >2 faces");
    slot[slot[2]++] = h;
  }
  for (auto& [k, slot] : uses) {
    if (slot[2] != 2) continue;
    int h0 = slot[0], h1 = slot[1];
    if (m.halfedges_[h0].origin == m.halfedges_[h1].origin)
      throw NonManifoldEdge("edge used twice with the same orientation");
    m.halfedges_[h0].twin = h1;
    m.halfedges_[h1].twin = h0;
  }
  return m;
}

int HalfEdgeMesh::num_edges() const {
  int b = 0;
  for (auto& h : halfedges_) b += h.twin < 0;
  return (static_cast<int>(halfedges_.size()) + b) / 2;
}

std::vector<char> HalfEdgeMesh::boundary_vertex_mask() const {
  std::vector<char> mask(vertices_.size(), 0);
  for (size_t h = 0; h < halfedges_.size(); ++h)
    if (halfedges_[h].twin < 0) {
      mask[halfedges_[h].origin] = 1;
      mask[dest(static_cast<int>(h))] = 1;
    }
  return mask;
}

double HalfEdgeMesh::face_area(int f) const {
  const Tri& t = faces_[f];
  return triangle_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

double HalfEdgeMesh::total_area() const {
  double s = 0;
  for (int f = 0; f < num_faces(); ++f) s += face_area(f);
  return s;
}

HalfEdgeMesh build_mesh(const std::vector<std::array<Point2, 3>>& triangles, Tolerance tol) {
  const double q = tol.eps / 2;
  std::unordered_map<uint64_t, std::vector<int>> buckets;
  std::vector<Point2> verts;
  auto cell = [&](const Point2& p) {
    return std::pair<int64_t, int64_t>{static_cast<int64_t>(std::floor(p.x() / q)),
                                       static_cast<int64_t>(std::floor(p.y() / q))};
  };
  auto key = [](int64_t i, int64_t j) { return (static_cast<uint64_t>(i) << 32) ^ (static_cast<uint64_t>(j) & 0xffffffffULL); };
  auto find_or_add = [&](const Point2& p) {
    auto [ci, cj] = cell(p);
    int best = -1;
    double bd = tol.eps;
    for (int64_t di = -2; di <= 2; ++di)
      for (int64_t dj = -2; dj <= 2; ++dj) {
        auto it = buckets.find(key(ci + di, cj + dj));
        if (it == buckets.end()) continue;
        for (int v : it->second) {
          double d = (verts[v] - p).norm();
          if (d < bd || (d == bd && best >= 0 && v < best)) {
            bd = d;
            best = v;
          }
        }
      }
    if (best >= 0) return best;
    verts.push_back(p);
    buckets[key(ci, cj)].push_back(static_cast<int>(verts.size()) - 1);
    return static_cast<int>(verts.size()) - 1;
  };
  std::vector<Tri> faces;
  faces.reserve(triangles.size());
  for (auto& t : triangles) {
    Tri f{find_or_add(t[0]), find_or_add(t[1]), find_or_add(t[2])};
    double a = triangle_area(verts[f[0]], verts[f[1]], verts[f[2]]);
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2] || std::abs(a) <= 0)
      throw ZeroAreaFace("degenerate triangle in soup");
    if (a < 0) std::swap(f[1], f[2]);
    faces.push_back(f);
  }
  return HalfEdgeMesh::from_indexed(std::move(verts), std::move(faces), tol);
}

WatertightReport validate_watertight(const HalfEdgeMesh& mesh, Tolerance tol) {
  WatertightReport r;
  const auto& V = mesh.vertices();
  const auto& H = mesh.halfedges();
  if (mesh.num_faces() == 0) return r;

  double mean_len = 0;
  for (size_t h = 0; h < H.size(); ++h) mean_len += (V[H[h].origin] - V[mesh.dest(static_cast<int>(h))]).norm();
  mean_len /= static_cast<double>(H.size());
  BucketGrid vgrid(std::max(mean_len, 10 * tol.eps));
  for (int v = 0; v < mesh.num_vertices(); ++v) vgrid.insert(v, V[v]);

  // non-manifold: directed half-edge duplicated (from_indexed rejects >2 faces)
  std::unordered_map<uint64_t, int> directed;
  for (size_t h = 0; h < H.size(); ++h) {
    int u = H[h].origin, v = mesh.dest(static_cast<int>(h));
    uint64_t k = (static_cast<uint64_t>(static_cast<uint32_t>(u)) << 32) | static_cast<uint32_t>(v);
    if (++directed[k] == 2) {
      ++r.non_manifold;
      r.defects.push_back("non-manifold edge " + std::to_string(u) + "-" + std::to_string(v));
    }
  }

  // T-junctions: a vertex inside an edge it is not an endpoint of
  std::vector<int> used(mesh.num_vertices(), 0);
  for (auto& f : mesh.faces())
    for (int v : f) used[v] = 1;
  for (size_t h = 0; h < H.size(); ++h) {
    int u = H[h].origin, v = mesh.dest(static_cast<int>(h));
    if (H[h].twin >= 0 && u > v) continue;  // each full edge once
    Segment s{V[u], V[v]};
    Point2 lo = V[u].cwiseMin(V[v]).array() - tol.eps, hi = V[u].cwiseMax(V[v]).array() + tol.eps;
    vgrid.visit(lo, hi, [&](int w) {
      if (w == u || w == v || !used[w]) return;
      auto d = point_segment_distance(V[w], s);
      if (d.dist < tol.eps && !d.clamped) {
        ++r.t_junctions;
        r.defects.push_back("T-junction: vertex " + std::to_string(w) + " on edge " + std::to_string(u) + "-" +
                            std::to_string(v));
      }
    });
  }

  // cracks: coincident distinct vertices, or boundary edges overlapping each other
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!used[v]) continue;
    for (int w : vgrid.query(V[v], tol.eps))
      if (w > v && used[w] && (V[w] - V[v]).norm() < tol.eps) {
        ++r.cracks;
        r.defects.push_back("crack: coincident vertices " + std::to_string(v) + "," + std::to_string(w));
      }
  }
  std::vector<int> bnd;
  for (size_t h = 0; h < H.size(); ++h)
    if (H[h].twin < 0) bnd.push_back(static_cast<int>(h));
  BucketGrid egrid(std::max(mean_len, 10 * tol.eps));
  for (size_t i = 0; i < bnd.size(); ++i) {
    int h = bnd[i];
    const Point2 &a = V[H[h].origin], &b = V[mesh.dest(h)];
    egrid.insert(static_cast<int>(i), a.cwiseMin(b), a.cwiseMax(b));
  }
  for (size_t i = 0; i < bnd.size(); ++i) {
    int h = bnd[i];
    Segment s{V[H[h].origin], V[mesh.dest(h)]};
    Point2 lo = s.first.cwiseMin(s.second).array() - tol.eps, hi = s.first.cwiseMax(s.second).array() + tol.eps;
    egrid.visit(lo, hi, [&](int j) {
      if (j <= static_cast<int>(i)) return;
      int g = bnd[j];
      Segment t{V[H[g].origin], V[mesh.dest(g)]};
      auto x = seg_seg_intersect(s, t, tol);
      if (x.kind == IntersectKind::Overlap) {
        ++r.cracks;
        r.defects.push_back("crack: overlapping boundary edges");
      }
    });
  }
  r.ok = r.defects.empty();
  return r;
}

std::string canonical_serialization(const HalfEdgeMesh& mesh, Tolerance tol) {
  const auto& V = mesh.vertices();
  const double q = tol.eps / 4;
  std::vector<int> order(V.size());
  std::iota(order.begin(), order.end(), 0);
  auto qx = [&](int v) { return std::llround(V[v].x() / q); };
  auto qy = [&](int v) { return std::llround(V[v].y() / q); };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    auto ka = std::make_tuple(qx(a), qy(a), V[a].x(), V[a].y());
    auto kb = std::make_tuple(qx(b), qy(b), V[b].x(), V[b].y());
    return ka < kb;
  });
  std::vector<int> remap(V.size());
  for (size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<int>(i);
  std::vector<Tri> faces;
  faces.reserve(mesh.faces().size());
  for (auto f : mesh.faces()) {
    for (int& v : f) v = remap[v];
    auto m = std::min_element(f.begin(), f.end()) - f.begin();
    std::rotate(f.begin(), f.begin() + m, f.end());
    faces.push_back(f);
  }
  std::sort(faces.begin(), faces.end());
  std::string out;
  out.reserve(V.size() * 40 + faces.size() * 24);
  out += std::to_string(V.size()) + " " + std::to_string(faces.size()) + "\n";
  for (int v : order) out += format_double(V[v].x()) + " " + format_double(V[v].y()) + "\n";
  for (auto& f : faces) out += std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
  return out;
}

void write_off(const HalfEdgeMesh& mesh, std::ostream& os) {
  os << "OFF\n" << mesh.num_vertices() << " " << mesh.num_faces() << " 0\n";
  for (auto& p : mesh.vertices()) os << format_double(p.x()) << " " << format_double(p.y()) << " 0\n";
  for (auto& f : mesh.faces()) os << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
}

void write_obj(const HalfEdgeMesh& mesh, std::ostream& os) {
  for (auto& p : mesh.vertices()) os << "v " << format_double(p.x()) << " " << format_double(p.y()) << " 0\n";
  for (auto& f : mesh.faces()) os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

namespace {

// next non-comment token
bool next_token(std::istream& is, std::string& tok) {
  while (is >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    return true;
  }
  return false;
}

double to_double(const std::string& s) {
  size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw CorruptHeader("bad number '" + s + "'");
  return v;
}

}  // namespace

HalfEdgeMesh read_off(std::istream& is) {
  std::string tok;
  if (!next_token(is, tok) || tok != "OFF") throw CorruptHeader("missing OFF header");
  std::string nv, nf, ne;
  if (!next_token(is, nv) || !next_token(is, nf) || !next_token(is, ne)) throw CorruptHeader("truncated OFF counts");
  int V = std::stoi(nv), F = std::stoi(nf);
  if (V < 0 || F < 0) throw CorruptHeader("negative counts");
  std::vector<Point2> verts(V);
  for (int i = 0; i < V; ++i) {
    std::string x, y, z;
    if (!next_token(is, x) || !next_token(is, y) || !next_token(is, z)) throw CorruptHeader("truncated vertex list");
    verts[i] = {to_double(x), to_double(y)};
  }
  std::vector<Tri> faces(F);
  for (int i = 0; i < F; ++i) {
    std::string n, a, b, c;
    if (!next_token(is, n) || !next_token(is, a) || !next_token(is, b) || !next_token(is, c))
      throw CorruptHeader("truncated face list");
    if (n != "3") throw UnsupportedFormat("only triangle faces are supported");
    faces[i] = {std::stoi(a), std::stoi(b), std::stoi(c)};
  }
  return HalfEdgeMesh::from_indexed(std::move(verts), std::move(faces));
}

HalfEdgeMesh read_obj(std::istream& is) {
  std::vector<Point2> verts;
  std::vector<Tri> faces;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y;
      if (!(ls >> x >> y)) throw CorruptHeader("bad vertex line");
      verts.emplace_back(x, y);
    } else if (tag == "f") {
      Tri f;
      std::string w;
      int k = 0;
      while (ls >> w) {
        if (k == 3) throw UnsupportedFormat("only triangle faces are supported");
        f[k++] = std::stoi(w.substr(0, w.find('/'))) - 1;
      }
      if (k != 3) throw CorruptHeader("bad face line");
      faces.push_back(f);
    }
  }
  return HalfEdgeMesh::from_indexed(std::move(verts), std::move(faces));
}

static bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

void save_mesh(const HalfEdgeMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw PipelineError("IOError", "cannot write " + path);
  if (ends_with(path, ".obj")) write_obj(mesh, os);
  else write_off(mesh, os);
}

HalfEdgeMesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("IOError", "cannot read " + path);
  return ends_with(path, ".obj") ? read_obj(is) : read_off(is);
}

}  // namespace sbmt
