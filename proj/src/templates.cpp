#include "sbmt/templates.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sbmt/errors.hpp"

namespace sbmt {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

TokenKind kind_of(const std::string& label) {
  if (label == "A" || label == "B" || label == "C") return TokenKind::Vertex;
  if (!label.empty() && label[0] == 'Q') return TokenKind::Crossing;
  if (!label.empty() && label[0] == 'P') return TokenKind::ChainVertex;
  throw UnknownConfiguration("catalog: bad token label '" + label + "'");
}

void finish_entry(CatalogEntry& e) {
  if (e.labels.size() < 3 || e.labels[0] != "A") throw UnknownConfiguration(e.name + ": cycle must start at A");
  std::map<std::string, int> pos;
  std::string expect = "ABC";
  size_t nv = 0;
  for (size_t i = 0; i < e.labels.size(); ++i) {
    const auto& l = e.labels[i];
    TokenKind k = kind_of(l);
    if (k == TokenKind::Vertex && (nv >= 3 || l[0] != expect[nv++]))
      throw UnknownConfiguration(e.name + ": vertices must appear as A, B, C");
    if (!pos.emplace(l, static_cast<int>(i)).second) throw UnknownConfiguration(e.name + ": repeated label " + l);
    e.config.cycle.push_back(k);
  }
  if (nv != 3) throw UnknownConfiguration(e.name + ": cycle lacks a vertex");
  if (!e.apex.empty()) {
    e.config.has_apex = true;
    pos[e.apex] = kApex;
  }
  auto resolve = [&](const std::string& l) {
    auto it = pos.find(l);
    if (it == pos.end()) throw MissingVertexBinding(e.name + ": unknown label " + l);
    return it->second;
  };
  for (auto& tr : e.traces) {
    std::vector<int> t;
    for (auto& l : tr) t.push_back(resolve(l));
    e.config.traces.push_back(t);
  }
  if (e.noop) {
    e.faces.push_back({resolve("A"), resolve("B"), resolve("C")});
  } else {
    for (auto& f : e.face_labels) {
      std::array<int, 3> q;
      for (int k = 0; k < 3; ++k) {
        auto b = e.bind.find(f[k]);
        q[k] = resolve(b == e.bind.end() ? f[k] : b->second);
      }
      e.faces.push_back(q);
    }
  }
}

std::vector<std::array<int, 3>> normalized(std::vector<std::array<int, 3>> faces) {
  for (auto& f : faces) {
    auto m = std::min_element(f.begin(), f.end()) - f.begin();
    std::rotate(f.begin(), f.begin() + m, f.end());
  }
  std::sort(faces.begin(), faces.end());
  return faces;
}

}  // namespace

std::vector<CatalogEntry> parse_catalog(const std::string& text) {
  std::vector<CatalogEntry> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto words = split_ws(line);
    if (words.empty()) continue;
    const std::string& tag = words[0];
    std::string rest = line.substr(line.find(tag) + tag.size());
    if (tag == "case") {
      if (!out.empty()) finish_entry(out.back());
      out.emplace_back();
      out.back().name = split_ws(rest).at(0);
      continue;
    }
    if (out.empty()) throw UnknownConfiguration("catalog: record before 'case'");
    CatalogEntry& e = out.back();
    if (tag == "cycle") {
      e.labels = split_ws(rest);
    } else if (tag == "apex") {
      e.apex = split_ws(rest).at(0);
    } else if (tag == "trace") {
      e.traces.push_back(split_ws(rest));
    } else if (tag == "faces") {
      if (split_ws(rest) == std::vector<std::string>{"noop"}) {
        e.noop = true;
        continue;
      }
      std::istringstream fs(rest);
      std::string tri;
      while (std::getline(fs, tri, ';')) {
        auto w = split_ws(tri);
        if (w.empty()) continue;
        if (w.size() != 3) throw UnknownConfiguration(e.name + ": face needs three labels");
        e.face_labels.push_back({w[0], w[1], w[2]});
      }
    } else if (tag == "bind") {
      for (auto& b : split_ws(rest)) {
        auto eq = b.find('=');
        if (eq == std::string::npos) throw UnknownConfiguration(e.name + ": bad bind " + b);
        e.bind[b.substr(0, eq)] = b.substr(eq + 1);
      }
    } else if (tag == "figure") {
      auto w = split_ws(rest);
      if (w.size() % 2) throw UnknownConfiguration(e.name + ": odd figure coordinates");
      for (size_t i = 0; i < w.size(); i += 2) e.figure.emplace_back(std::stod(w[i]), std::stod(w[i + 1]));
    } else {
      throw UnknownConfiguration("catalog: unknown record '" + tag + "'");
    }
  }
  if (!out.empty()) finish_entry(out.back());
  return out;
}

Patch to_canonical(const SymConfig& config, const std::vector<std::array<int, 3>>& faces, const std::string& source) {
  Canonical can = canonicalize(config);
  const int n = static_cast<int>(config.cycle.size());
  Patch p;
  p.source = source;
  for (auto f : faces) {
    for (int& v : f)
      if (v != kApex) v = (v - can.shift + n) % n;
    p.faces.push_back(f);
  }
  return p;
}

Patch mirror_patch(const SymConfig& config, const std::vector<std::array<int, 3>>& faces, SymConfig* mirrored) {
  const int n = static_cast<int>(config.cycle.size());
  auto m = [n](int v) { return v == kApex ? kApex : (n - v) % n; };
  Patch p;
  for (auto& f : faces) p.faces.push_back({m(f[0]), m(f[2]), m(f[1])});
  if (mirrored) *mirrored = mirror(config);
  return p;
}

TemplateTable::TemplateTable(std::vector<CatalogEntry> entries) : entries_(std::move(entries)) {
  for (auto& e : entries_) {
    Canonical can = canonicalize(e.config);
    Patch p = to_canonical(e.config, e.faces, e.name);
    auto [it, fresh] = table_.try_emplace(can.key, Slot{can.config, p});
    if (fresh) continue;
    if (normalized(it->second.patch.faces) == normalized(p.faces)) it->second.patch.source += " / " + e.name;
    else load_defects_.push_back("conflicting patches for one key: " + it->second.patch.source + " vs " + e.name);
  }
  // mirror images are separate keys; explicit entries win
  for (auto& e : entries_) {
    SymConfig mc;
    Patch mp = mirror_patch(e.config, e.faces, &mc);
    Canonical can = canonicalize(mc);
    if (table_.count(can.key)) continue;
    table_.emplace(can.key, Slot{can.config, to_canonical(mc, mp.faces, e.name + " (mirror)")});
  }
}

const TemplateTable& TemplateTable::builtin() {
  static const TemplateTable t(parse_catalog(builtin_catalog_text()));
  return t;
}

namespace {

Patch synthesize_direct(const SymConfig& c) {
  const int n = static_cast<int>(c.cycle.size());
  auto vp = vertex_positions(c);
  Patch out;
  out.source = "synthesized";
  std::vector<std::pair<int, int>> chords;
  bool apex_chord = false;
  for (auto& tr : c.traces)
    for (size_t i = 0; i + 1 < tr.size(); ++i) {
      int a = tr[i], b = tr[i + 1];
      if (a == kApex || b == kApex) {
        apex_chord = true;
      } else if (!(token_edges(c, a) & token_edges(c, b))) {
        chords.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  if (c.has_apex) {
    if (!chords.empty()) throw UnknownConfiguration("chord and interior apex in one face");
    for (int i = 0; i < n; ++i) out.faces.push_back({i, (i + 1) % n, kApex});
    return out;
  }
  (void)apex_chord;
  if (n == 3 && chords.empty()) {
    out.faces.push_back({vp[0], vp[1], vp[2]});
    return out;
  }
  std::vector<std::vector<int>> polys(1);
  for (int i = 0; i < n; ++i) polys[0].push_back(i);
  std::sort(chords.begin(), chords.end());
  chords.erase(std::unique(chords.begin(), chords.end()), chords.end());
  for (auto [a, b] : chords) {
    bool done = false;
    for (size_t k = 0; k < polys.size() && !done; ++k) {
      auto& P = polys[k];
      auto ia = std::find(P.begin(), P.end(), a), ib = std::find(P.begin(), P.end(), b);
      if (ia == P.end() || ib == P.end()) continue;
      size_t i = ia - P.begin(), j = ib - P.begin();
      if (i > j) std::swap(i, j);
      if (j - i == 1 || (i == 0 && j == P.size() - 1)) throw UnknownConfiguration("chord along a polygon side");
      std::vector<int> p1(P.begin() + i, P.begin() + j + 1);
      std::vector<int> p2(P.begin() + j, P.end());
      p2.insert(p2.end(), P.begin(), P.begin() + i + 1);
      P = std::move(p1);
      polys.push_back(std::move(p2));
      done = true;
    }
    if (!done) throw UnknownConfiguration("crossing chords");
  }
  auto collinear = [&](int a, int b, int d) { return (token_edges(c, a) & token_edges(c, b) & token_edges(c, d)) != 0; };
  for (auto& P : polys) {
    const int m = static_cast<int>(P.size());
    // fan from the first root (in cycle order) giving no degenerate triangle
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return P[x] < P[y]; });
    bool done = false;
    for (int r : order) {
      bool ok = true;
      for (int j = 1; j + 1 < m && ok; ++j)
        ok = !collinear(P[r], P[(r + j) % m], P[(r + j + 1) % m]);
      if (!ok) continue;
      for (int j = 1; j + 1 < m; ++j) out.faces.push_back({P[r], P[(r + j) % m], P[(r + j + 1) % m]});
      done = true;
      break;
    }
    if (done) continue;
    // ear clipping on the remaining (weakly convex) polygon
    std::vector<int> Q = P;
    while (Q.size() > 3) {
      bool cut = false;
      for (size_t i = 0; i < Q.size(); ++i) {
        int a = Q[(i + Q.size() - 1) % Q.size()], b = Q[i], d = Q[(i + 1) % Q.size()];
        if (collinear(a, b, d)) continue;
        // the remaining polygon must keep a non-degenerate shape
        out.faces.push_back({a, b, d});
        Q.erase(Q.begin() + static_cast<long>(i));
        cut = true;
        break;
      }
      if (!cut) throw UnknownConfiguration("cannot triangulate region");
    }
    if (collinear(Q[0], Q[1], Q[2])) throw UnknownConfiguration("degenerate region");
    out.faces.push_back({Q[0], Q[1], Q[2]});
  }
  return out;
}

}  // namespace

Patch synthesize(const SymConfig& canonical) {
  const int n = static_cast<int>(canonical.cycle.size());
  Canonical mc = canonicalize(mirror(canonical));
  if (mc.key < signature(canonical)) {
    // build the mirror image's patch and reflect it back
    Patch base = synthesize_direct(mc.config);
    Patch out;
    out.source = "synthesized";
    auto back = [&](int v) { return v == kApex ? kApex : (n - (v + mc.shift) % n) % n; };
    for (auto& f : base.faces) out.faces.push_back({back(f[0]), back(f[2]), back(f[1])});
    return out;
  }
  return synthesize_direct(canonical);
}

Patch TemplateTable::lookup(const Canonical& c) const {
  auto it = table_.find(c.key);
  if (it != table_.end()) return it->second.patch;
  return synthesize(c.config);
}

std::vector<Point2> canonical_realization(const SymConfig& c, Point2* apex) {
  const Point2 V[3] = {{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  const int n = static_cast<int>(c.cycle.size());
  auto vp = vertex_positions(c);
  std::vector<Point2> pos(n);
  for (int k = 0; k < 3; ++k) {
    int end = k < 2 ? vp[k + 1] : n;
    int m = end - vp[k] - 1;
    pos[vp[k]] = V[k];
    for (int j = 0; j < m; ++j) pos[vp[k] + 1 + j] = V[k] + (j + 1.0) / (m + 1.0) * (V[(k + 1) % 3] - V[k]);
  }
  if (apex) *apex = (V[0] + V[1] + V[2]) / 3.0;
  return pos;
}

std::vector<std::string> verify_patch(const SymConfig& config, const std::vector<std::array<int, 3>>& faces,
                                      const std::vector<Point2>& pos, const Point2& apex) {
  std::vector<std::string> d;
  const int n = static_cast<int>(config.cycle.size());
  auto P = [&](int v) { return v == kApex ? apex : pos[v]; };
  auto id = [n](int v) { return v == kApex ? n : v; };
  auto vp = vertex_positions(config);
  const double T = triangle_area(pos[vp[0]], pos[vp[1]], pos[vp[2]]);
  double sum = 0;
  std::map<std::pair<int, int>, int> directed;
  std::set<int> used;
  for (auto& f : faces) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      d.push_back("degenerate face (repeated token)");
      continue;
    }
    for (int v : f)
      if (v != kApex && (v < 0 || v >= n)) d.push_back("face references a missing token");
    if (!config.has_apex && (f[0] == kApex || f[1] == kApex || f[2] == kApex))
      d.push_back("face references a missing apex");
    if (!d.empty()) continue;
    double a = triangle_area(P(f[0]), P(f[1]), P(f[2]));
    if (a < -1e-12) d.push_back("CW face");
    else if (a <= 1e-12) d.push_back("zero-area face");
    sum += a;
    for (int k = 0; k < 3; ++k) {
      ++directed[{id(f[k]), id(f[(k + 1) % 3])}];
      used.insert(id(f[k]));
    }
  }
  if (!d.empty()) return d;
  if (std::abs(sum - T) > 1e-9 * T) d.push_back(sum < T ? "area deficit" : "area excess");
  auto nf = normalized(faces);
  if (std::adjacent_find(nf.begin(), nf.end()) != nf.end()) d.push_back("duplicate face");
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    auto fw = directed.find({i, j});
    auto bw = directed.find({j, i});
    if (fw == directed.end() || fw->second != 1 || bw != directed.end())
      d.push_back("boundary sub-edge " + std::to_string(i) + "-" + std::to_string(j) + " not realized once");
  }
  for (auto& [e, cnt] : directed) {
    bool boundary = e.second == (e.first + 1) % n && e.first < n && e.second < n;
    if (boundary) continue;
    auto tw = directed.find({e.second, e.first});
    if (cnt != 1 || tw == directed.end() || tw->second != 1) {
      d.push_back("unmatched interior edge " + std::to_string(e.first) + "-" + std::to_string(e.second));
      break;
    }
  }
  for (int i = 0; i < n; ++i)
    if (!used.count(i)) d.push_back("token " + std::to_string(i) + " unused");
  if (config.has_apex && !used.count(n)) d.push_back("apex unused");
  for (auto& tr : config.traces)
    for (size_t i = 0; i + 1 < tr.size(); ++i) {
      int a = tr[i], b = tr[i + 1];
      if (a != kApex && b != kApex && (token_edges(config, a) & token_edges(config, b))) continue;
      if (!directed.count({id(a), id(b)}) && !directed.count({id(b), id(a)}))
        d.push_back("boundary piece " + std::to_string(a) + "-" + std::to_string(b) + " not an edge of the patch");
    }
  return d;
}

std::vector<std::string> verify_patch(const SymConfig& config, const Patch& patch) {
  Point2 apex;
  auto pos = canonical_realization(config, &apex);
  return verify_patch(config, patch.faces, pos, apex);
}

TableReport verify_table(const TemplateTable& table) {
  TableReport r;
  r.entries = static_cast<int>(table.entries().size());
  r.keys = static_cast<int>(table.table().size());
  for (auto& m : table.load_defects()) r.messages.push_back(m);
  for (auto& e : table.entries()) {
    Point2 apex;
    auto pos = canonical_realization(e.config, &apex);
    for (auto& m : verify_patch(e.config, e.faces, pos, apex)) r.messages.push_back(e.name + ": " + m);
    auto cls = config_class(e.config);
    if (!admissible_class(cls)) r.messages.push_back(e.name + ": inadmissible class");
  }
  for (auto& [key, slot] : table.table())
    for (auto& m : verify_patch(slot.config, slot.patch)) r.messages.push_back(slot.patch.source + " [" + key + "]: " + m);
  // each figure, traced through the real pipeline, must land on its entry
  const std::vector<Point2> tri = {{1, 0}, {3, 0}, {2, 1.732}};
  for (auto& e : table.entries()) {
    if (e.figure.empty()) continue;
    ++r.figures_checked;
    try {
      auto mesh = HalfEdgeMesh::from_indexed(tri, {Tri{0, 1, 2}});
      std::vector<PolyChain> chains{PolyChain{e.figure, false}};
      const auto reg = IntersectionRegistry::build(mesh, chains);
      auto fc = classify_face(mesh, reg, chains, 0, false);
      if (fc.violation) {
        r.messages.push_back(e.name + ": figure violates the protocol (" + fc.violation_reason + ")");
        continue;
      }
      Patch p = table.lookup(fc.canon);
      bool named = false;
      std::istringstream names(p.source);
      std::string part;
      while (std::getline(names, part, '/')) {
        auto a = part.find_first_not_of(' '), b = part.find_last_not_of(' ');
        if (a != std::string::npos && part.substr(a, b - a + 1) == e.name) named = true;
      }
      if (!named) r.messages.push_back(e.name + ": figure resolves to '" + p.source + "'");
      auto faces = instantiate(p, fc);
      auto P = [&](int g) { return g < mesh.num_vertices() ? mesh.vertex(g) : reg.points()[g - mesh.num_vertices()]; };
      double sum = 0;
      for (auto& t : faces) {
        double a = triangle_area(P(t[0]), P(t[1]), P(t[2]));
        if (a <= 0) r.messages.push_back(e.name + ": figure instance has a non-positive face");
        sum += a;
      }
      double T = triangle_area(tri[0], tri[1], tri[2]);
      if (std::abs(sum - T) > 1e-9 * T) r.messages.push_back(e.name + ": figure instance does not tile the face");
    } catch (const Error& ex) {
      r.messages.push_back(e.name + ": " + ex.what());
    }
  }
  r.defects = static_cast<int>(r.messages.size());
  return r;
}

std::vector<Tri> instantiate(const Patch& patch, const FaceConfig& fc) {
  const int n = static_cast<int>(fc.cycle.size());
  std::vector<Tri> out;
  out.reserve(patch.faces.size());
  for (auto& f : patch.faces) {
    Tri t;
    for (int k = 0; k < 3; ++k) {
      if (f[k] == kApex) {
        if (!fc.has_apex) throw MissingVertexBinding("patch needs an apex the face does not have");
        t[k] = fc.apex.point;
      } else {
        if (f[k] < 0 || f[k] >= n) throw MissingVertexBinding("patch token outside the face cycle");
        t[k] = fc.cycle[(f[k] + fc.canon.shift) % n].point;
      }
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace sbmt
