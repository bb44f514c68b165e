#include "sbmt/boundary.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "sbmt/errors.hpp"
#include "sbmt/mesh.hpp"

namespace sbmt {

int BitmapMask::count() const {
  int n = 0;
  for (auto b : bits) n += b != 0;
  return n;
}

namespace {

// Reads one header integer, skipping whitespace and '#' comments.
int header_int(std::istream& is) {
  int c;
  while ((c = is.peek()) != EOF) {
    if (std::isspace(c)) {
      is.get();
    } else if (c == '#') {
      std::string line;
      std::getline(is, line);
    } else {
      break;
    }
  }
  long v = 0;
  int digits = 0;
  while ((c = is.peek()) != EOF && std::isdigit(c)) {
    v = v * 10 + (is.get() - '0');
    if (++digits > 9) throw CorruptHeader("header value too large");
  }
  if (digits == 0) throw CorruptHeader("expected a number in the header");
  return static_cast<int>(v);
}

}  // namespace

BitmapMask read_bitmap(std::istream& is, bool invert) {
  char magic[2] = {0, 0};
  if (!is.read(magic, 2) || magic[0] != 'P') throw CorruptHeader("missing P1/P5 magic");
  if (magic[1] != '1' && magic[1] != '5') throw UnsupportedFormat(std::string("netpbm type P") + magic[1]);
  int w = header_int(is), h = header_int(is);
  if (w < 1 || h < 1) throw CorruptHeader("image dimensions must be positive");
  BitmapMask m(w, h);
  if (magic[1] == '5') {
    int maxval = header_int(is);
    if (maxval != 255) throw UnsupportedFormat("only maxval 255 is supported, got " + std::to_string(maxval));
    if (!std::isspace(is.get())) throw CorruptHeader("missing whitespace before raster");
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h);
    if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
      throw CorruptHeader("truncated raster");
    for (size_t i = 0; i < raw.size(); ++i) m.bits[i] = (raw[i] < 128) != invert;
  } else {
    size_t i = 0;
    int c;
    while (i < m.bits.size() && (c = is.get()) != EOF) {
      if (c == '#') {
        std::string line;
        std::getline(is, line);
      } else if (c == '0' || c == '1') {
        m.bits[i++] = (c == '1') != invert;
      } else if (!std::isspace(c)) {
        throw CorruptHeader("unexpected character in P1 raster");
      }
    }
    if (i != m.bits.size()) throw CorruptHeader("truncated raster");
  }
  return m;
}

BitmapMask load_bitmap(const std::string& path, bool invert) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("IOError", "cannot read " + path);
  return read_bitmap(is, invert);
}

void write_pgm(const BitmapMask& mask, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  os << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  for (auto b : mask.bits) os.put(static_cast<char>(b ? 0 : 255));
}

namespace {

// clockwise on screen (y down)
constexpr int kDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

int dir_to(int cx, int cy, int px, int py) {
  for (int d = 0; d < 8; ++d)
    if (cx + kDx[d] == px && cy + kDy[d] == py) return d;
  return -1;
}

std::vector<std::pair<int, int>> moore_trace(const BitmapMask& m, int sx, int sy, int bx, int by) {
  std::vector<std::pair<int, int>> out{{sx, sy}};
  int cx = sx, cy = sy, px = bx, py = by;
  const long cap = 8L * m.width * m.height + 16;
  for (long it = 0; it < cap; ++it) {
    int k = dir_to(cx, cy, px, py);
    int found = -1;
    for (int i = 1; i <= 8; ++i) {
      int d = (k + i) % 8;
      if (m.at(cx + kDx[d], cy + kDy[d])) {
        found = d;
        int pd = (k + i - 1) % 8;
        px = cx + kDx[pd];
        py = cy + kDy[pd];
        break;
      }
    }
    if (found < 0) return out;  // isolated pixel
    cx += kDx[found];
    cy += kDy[found];
    if (cx == sx && cy == sy && px == bx && py == by) break;  // Jacob's criterion
    out.emplace_back(cx, cy);
  }
  // the walk may return to the start with a different backtrack first; drop the repeated tail
  while (out.size() > 1 && out.back() == out.front()) out.pop_back();
  return out;
}

PolyChain to_chain(const std::vector<std::pair<int, int>>& px) {
  PolyChain c;
  c.closed = true;
  for (auto [x, y] : px) {
    Point2 p(x, y);
    if (c.points.empty() || c.points.back() != p) c.points.push_back(p);
  }
  while (c.points.size() > 1 && c.points.back() == c.points.front()) c.points.pop_back();
  // merge collinear runs (exact on integer pixel centres)
  bool changed = true;
  while (changed && c.points.size() > 3) {
    changed = false;
    for (size_t i = 0; i < c.points.size() && c.points.size() > 3; ++i) {
      size_t n = c.points.size();
      const Point2& a = c.points[(i + n - 1) % n];
      const Point2& b = c.points[i];
      const Point2& d = c.points[(i + 1) % n];
      if (cross(b - a, d - b) == 0 && (b - a).dot(d - b) > 0) {
        c.points.erase(c.points.begin() + static_cast<long>(i));
        changed = true;
        --i;
      }
    }
  }
  return c;
}

}  // namespace

std::vector<PolyChain> trace_contours(const BitmapMask& mask, int* rejected) {
  if (mask.count() == 0) throw EmptyMask("mask has no foreground pixels");
  const int W = mask.width, H = mask.height;
  auto idx = [W](int i, int j) { return static_cast<size_t>(j) * W + i; };
  std::vector<PolyChain> chains;
  int bad = 0;
  auto accept = [&](PolyChain c, bool hole) {
    double a = c.points.size() >= 3 ? signed_area(c) : 0.0;
    if (c.points.size() < 3 || std::abs(a) < 1.0) {
      ++bad;
      return;
    }
    if ((a < 0) != hole) std::reverse(c.points.begin(), c.points.end());
    chains.push_back(std::move(c));
  };

  // foreground components (8-connected), outer contour from the first raster pixel
  std::vector<int> label(static_cast<size_t>(W) * H, -1);
  int ncomp = 0;
  std::vector<std::pair<int, int>> stack;
  for (int j = 0; j < H; ++j)
    for (int i = 0; i < W; ++i) {
      if (!mask.at(i, j) || label[idx(i, j)] >= 0) continue;
      label[idx(i, j)] = ncomp;
      stack.assign(1, {i, j});
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        for (int d = 0; d < 8; ++d) {
          int nx = x + kDx[d], ny = y + kDy[d];
          if (mask.at(nx, ny) && label[idx(nx, ny)] < 0) {
            label[idx(nx, ny)] = ncomp;
            stack.emplace_back(nx, ny);
          }
        }
      }
      ++ncomp;
      accept(to_chain(moore_trace(mask, i, j, i - 1, j)), false);
    }

  // holes: 4-connected background components not touching the border
  std::vector<char> seen(static_cast<size_t>(W) * H, 0);
  for (int j = 0; j < H; ++j)
    for (int i = 0; i < W; ++i) {
      if (mask.at(i, j) || seen[idx(i, j)]) continue;
      bool border = false;
      seen[idx(i, j)] = 1;
      stack.assign(1, {i, j});
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        if (x == 0 || y == 0 || x == W - 1 || y == H - 1) border = true;
        const int ox[4] = {1, -1, 0, 0}, oy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          int nx = x + ox[d], ny = y + oy[d];
          if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
          if (!mask.at(nx, ny) && !seen[idx(nx, ny)]) {
            seen[idx(nx, ny)] = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
      // (i, j) is the first raster pixel of the hole, so (i, j-1) is foreground
      if (!border) accept(to_chain(moore_trace(mask, i, j - 1, i, j)), true);
    }
  if (rejected) *rejected = bad;
  return chains;
}

double signed_area(const PolyChain& chain) {
  double s = 0;
  const size_t n = chain.points.size();
  for (size_t i = 0; i < n; ++i) s += cross(chain.points[i], chain.points[(i + 1) % n]);
  return 0.5 * s;
}

double min_segment_length(const std::vector<PolyChain>& chains) {
  double m = std::numeric_limits<double>::infinity();
  for (auto& c : chains)
    for (int k = 0; k < c.num_segments(); ++k) {
      auto s = c.segment(k);
      m = std::min(m, (s.second - s.first).norm());
    }
  return m;
}

double vertex_angle(const PolyChain& chain, int i) {
  const int n = static_cast<int>(chain.points.size());
  const Point2& p = chain.points[i];
  Point2 u = chain.points[(i + n - 1) % n] - p, v = chain.points[(i + 1) % n] - p;
  return std::atan2(std::abs(cross(u, v)), u.dot(v));
}

bool is_simple(const PolyChain& chain, Tolerance tol) {
  const int m = chain.num_segments();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      auto x = seg_seg_intersect(chain.segment(i), chain.segment(j), tol);
      bool adjacent = j == i + 1 || (chain.closed && i == 0 && j == m - 1);
      if (x.kind == IntersectKind::None) continue;
      if (adjacent && x.kind == IntersectKind::Point) continue;
      return false;
    }
  return true;
}

namespace {

bool angle_ok(double ang) { return ang >= std::numbers::pi / 2 - kAngleSlack; }

double dist_to_chain(const Point2& p, const PolyChain& c) {
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < c.num_segments(); ++k) d = std::min(d, point_segment_distance(p, c.segment(k)).dist);
  return d;
}

}  // namespace

bool satisfies_protocol(const PolyChain& chain, double e) {
  const int n = static_cast<int>(chain.points.size());
  for (int k = 0; k < chain.num_segments(); ++k) {
    auto s = chain.segment(k);
    if (!((s.second - s.first).norm() > e)) return false;
  }
  for (int i = 0; i < n; ++i) {
    if (!chain.closed && (i == 0 || i == n - 1)) continue;
    if (!angle_ok(vertex_angle(chain, i))) return false;
  }
  return true;
}

double hausdorff_distance(const PolyChain& a, const PolyChain& b) {
  auto one_sided = [](const PolyChain& x, const PolyChain& y) {
    double h = 0;
    for (int k = 0; k < x.num_segments(); ++k) {
      auto s = x.segment(k);
      for (double t : {0.0, 0.25, 0.5, 0.75}) h = std::max(h, dist_to_chain(s.first + t * (s.second - s.first), y));
    }
    if (!x.closed && !x.points.empty()) h = std::max(h, dist_to_chain(x.points.back(), y));
    return h;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

PolyChain enforce_protocol(const PolyChain& chain, double e) {
  PolyChain c = chain;
  const int min_pts = c.closed ? 3 : 2;
  auto n = [&] { return static_cast<int>(c.points.size()); };
  // deviation introduced by dropping vertex i
  auto removal_cost = [&](int i) {
    int m = n();
    if (!c.closed && (i == 0 || i == m - 1)) return std::numeric_limits<double>::infinity();
    Segment s{c.points[(i + m - 1) % m], c.points[(i + 1) % m]};
    if ((s.second - s.first).norm() == 0) return 0.0;
    return point_segment_distance(c.points[i], s).dist;
  };
  for (;;) {
    if (n() <= min_pts) throw ProtocolUnsatisfiable("chain collapsed during simplification");
    int m = n();
    // sharpest offending angle first
    int worst = -1;
    double worst_ang = 10;
    for (int i = 0; i < m; ++i) {
      if (!c.closed && (i == 0 || i == m - 1)) continue;
      double ang = vertex_angle(c, i);
      if (!angle_ok(ang) && ang < worst_ang) {
        worst_ang = ang;
        worst = i;
      }
    }
    if (worst < 0) {
      // then the shortest offending segment, dropping its cheaper endpoint
      double shortest = e;
      int seg = -1;
      for (int k = 0; k < c.num_segments(); ++k) {
        auto s = c.segment(k);
        double len = (s.second - s.first).norm();
        if (!(len > e) && (seg < 0 || len < shortest)) {
          shortest = len;
          seg = k;
        }
      }
      if (seg < 0) break;
      int i0 = seg, i1 = (seg + 1) % m;
      worst = removal_cost(i1) < removal_cost(i0) ? i1 : i0;
      if (std::isinf(removal_cost(worst))) throw ProtocolUnsatisfiable("open chain shorter than e");
    }
    c.points.erase(c.points.begin() + worst);
  }
  if (c.points.size() != chain.points.size() && hausdorff_distance(c, chain) > 1.0)
    throw ProtocolUnsatisfiable("simplification exceeds the 1 pixel budget");
  return c;
}

int winding_number(const std::vector<PolyChain>& chains, const Point2& p) {
  int w = 0;
  for (auto& c : chains) {
    if (!c.closed) continue;
    const size_t n = c.points.size();
    for (size_t i = 0; i < n; ++i) {
      const Point2& a = c.points[i];
      const Point2& b = c.points[(i + 1) % n];
      if (a.y() <= p.y()) {
        if (b.y() > p.y() && orient_raw(a, b, p) > 0) ++w;
      } else if (b.y() <= p.y() && orient_raw(a, b, p) < 0) {
        --w;
      }
    }
  }
  return w;
}

std::vector<PolyChain> read_chains(std::istream& is) {
  std::vector<PolyChain> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "closed" || tok == "open") {
      out.emplace_back();
      out.back().closed = tok == "closed";
      continue;
    }
    if (out.empty()) throw CorruptHeader("chain file: point before a closed/open header (line " + std::to_string(lineno) + ")");
    std::istringstream ps(line);
    double x, y;
    if (!(ps >> x >> y)) throw CorruptHeader("chain file: bad point on line " + std::to_string(lineno));
    out.back().points.emplace_back(x, y);
  }
  for (auto& c : out)
    if (c.points.size() < (c.closed ? 3u : 2u)) throw CorruptHeader("chain file: chain with too few points");
  return out;
}

std::vector<PolyChain> load_chains(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("IOError", "cannot read " + path);
  return read_chains(is);
}

void write_chains(const std::vector<PolyChain>& chains, std::ostream& os) {
  for (auto& c : chains) {
    os << (c.closed ? "closed" : "open") << "\n";
    for (auto& p : c.points) os << format_double(p.x()) << " " << format_double(p.y()) << "\n";
  }
}

}  // namespace sbmt
