// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mesh_checks.hpp"
#include "sbmt/fem.hpp"
#include "sbmt/quality.hpp"
#include "sbmt/remesh.hpp"
#include "support.hpp"
#include "template_checks.hpp"

using namespace sbmt;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Fixture {
  std::string name;
  std::vector<PolyChain> chains;
  GridSpec grid;
  RemeshResult result;
  HalfEdgeMesh inside;
  double seconds = 0;
};

const std::vector<std::string> kFixtures{"star.pgm", "droplet.pgm", "yglyph.pgm"};

std::map<std::string, Fixture>& fixtures() {
  static std::map<std::string, Fixture> cache;
  if (cache.empty())
    for (auto& n : kFixtures) {
      Fixture f;
      f.name = n;
      auto t0 = Clock::now();
      f.chains = chains_from_mask(load_bitmap(testing::fixture(n)), kDefaultEdgeLength);
      f.grid = grid_for_chains(f.chains, kDefaultEdgeLength);
      f.result = remesh(f.chains, f.grid, Thresholds{});
      f.seconds = seconds_since(t0);
      f.inside = inside_region(f.result.mesh, f.chains);
      cache[n] = std::move(f);
    }
  return cache;
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

void criterion1(Outcome& o) {
  auto [th, area] = theoretical_bounds(Thresholds{});
  o.detail << "theta=" << fmt(th) << " deg, area=" << fmt(area);
  o.require(th >= 10.0 && th <= 10.2, "theta in [10.0, 10.2]");
  o.require(area >= 1.13e-2 && area <= 1.15e-2, "area in [1.13e-2, 1.15e-2]");
}

void criterion2(Outcome& o) {
  double h1 = recommended_edge_length(M_PI), h2 = recommended_edge_length(M_PI / 2);
  o.detail << "h(pi)=" << fmt(h1) << ", h(pi/2)=" << fmt(h2);
  o.require(h1 >= 0.591 && h1 <= 0.593, "h(pi) in [0.591, 0.593]");
  o.require(h2 >= 1.183 && h2 <= 1.185, "h(pi/2) in [1.183, 1.185]");
}

void criterion3(Outcome& o) {
  for (auto& n : kFixtures) {
    auto& f = fixtures()[n];
    // bounds on every output face, equilateral ratio on the domain itself
    auto all = quality_report(f.result.mesh);
    auto in = quality_report(f.inside);
    o.detail << n << ": min angle " << fmt(all.min_angle) << ", min area " << fmt(all.min_area) << ", slivers "
             << all.sliver_count << ", equilateral " << fmt(in.equilateral_ratio, 4) << ", " << fmt(f.seconds, 3)
             << " s; ";
    o.require(all.min_angle > 10.1, n + " min angle > 10.1");
    o.require(all.min_area > 0.0114, n + " min area > 0.0114");
    o.require(all.sliver_count == 0, n + " no slivers");
    o.require(in.equilateral_ratio >= 0.85, n + " equilateral ratio >= 0.85");
    o.require(f.seconds < 30, n + " under 30 s");
  }
}

void criterion4(Outcome& o) {
  for (auto& n : kFixtures) {
    auto& f = fixtures()[n];
    auto w = validate_watertight(f.result.mesh);
    std::vector<Point2> chain_pts;
    for (auto& c : f.chains) chain_pts.insert(chain_pts.end(), c.points.begin(), c.points.end());
    int off_chain = testing::points_off_vertices(f.result.mesh, chain_pts);
    int off_reg = testing::points_off_vertices(f.result.mesh, f.result.registry_points);
    std::string why;
    bool covered = testing::chains_covered(f.result.mesh, f.chains, &why);
    o.detail << n << ": " << w.defects.size() << " defects, " << chain_pts.size() << " chain vertices, "
             << f.result.registry_points.size() << " registry points, " << off_chain + off_reg << " off-vertex; ";
    o.require(w.ok, n + " watertight");
    o.require(off_chain == 0 && off_reg == 0, n + " points on mesh vertices");
    o.require(covered, n + " segments covered: " + why);
  }
}

void criterion5(Outcome& o) {
  auto t0 = Clock::now();
  for (auto& n : kFixtures) {
    auto& f = fixtures()[n];
    auto rep = check_path_independence(f.chains, f.grid, Thresholds{}, RemeshOptions{}, 5);
    o.detail << n << ": " << rep.runs << " runs " << (rep.ok ? "identical" : "differ") << "; ";
    o.require(rep.ok && rep.runs == 6, n + " byte-identical");
  }
  double s = seconds_since(t0);
  o.detail << fmt(s, 3) << " s";
  o.require(s < 300, "under 5 min");
}

void criterion6(Outcome& o) {
  int checked = 0;
  for (auto& e : TemplateTable::builtin().entries()) {
    std::string why;
    if (!testing::golden_ok(e, &why)) o.require(false, why);
    ++checked;
  }
  auto r = verify_table();
  o.detail << checked << " cases checked, verify_table: " << r.entries << " entries, " << r.keys << " keys, "
           << r.defects << " defects";
  o.require(r.defects == 0, "verify_table 0 defects");
}

void criterion7(Outcome& o) {
  auto t0 = Clock::now();
  auto& f = fixtures()["star.pgm"];
  auto rows = run_ablation(f.chains, f.grid, Thresholds{});
  const Thresholds t;
  const double half_bc = 0.5 * t.b * t.c;
  std::map<std::string, QualityReport> q;
  for (auto& r : rows) {
    q[r.name] = r.quality;
    o.detail << r.name << ": " << r.quality.sliver_count << " slivers, min area " << fmt(r.quality.min_area, 3) << "; ";
  }
  o.require(q.at("E1").sliver_count == 0, "E1 no slivers");
  for (auto e : {"E3", "E4", "E5"}) {
    o.require(q.at(e).sliver_count >= 1, std::string(e) + " has slivers");
    o.require(q.at(e).min_area < half_bc, std::string(e) + " min area < bc/2");
  }
  o.require(q.at("E2").sliver_count <= q.at("E5").sliver_count, "E2 slivers <= E5 slivers");
  double s = seconds_since(t0);
  o.detail << fmt(s, 3) << " s";
  o.require(s < 180, "under 3 min");
}

void criterion8(Outcome& o) {
  const double ar = 2 / std::sqrt(3.0);
  auto raw = quality_report(build_grid(make_grid_spec({0, 0}, {20, 20})));
  o.detail << "raw grid median " << fmt(raw.ar_median, 12) << " max " << fmt(raw.ar_max, 12) << "; ";
  o.require(std::abs(raw.ar_median - ar) < 1e-9 && std::abs(raw.ar_max - ar) < 1e-9, "raw grid AR = 2/sqrt(3)");
  for (auto& n : kFixtures) {
    auto q = quality_report(fixtures()[n].inside);
    o.detail << n << " median " << fmt(q.ar_median, 8) << "; ";
    o.require(std::abs(q.ar_median - ar) < 1e-3, n + " median AR");
  }
}

void criterion9(Outcome& o) {
  const double theta = theoretical_bounds(Thresholds{}).first;
  for (auto& n : kFixtures) {
    auto h = angle_histogram(fixtures()[n].inside);
    const int bound_bin = h.bin_of(theta);
    o.require(bound_bin >= 0 && bound_bin < static_cast<int>(h.raw.size()), "bound falls in a histogram bin");
    long below = 0;
    for (int i = 0; i < bound_bin; ++i) below += h.raw[i];
    int mode = h.mode_bin();
    o.detail << n << ": mode [" << fmt(h.centers[mode] - 1) << "," << fmt(h.centers[mode] + 1) << "), mass below bin "
             << bound_bin << " = " << below << "; ";
    o.require(h.centers[mode] - 1 <= 60 && 60 < h.centers[mode] + 1, n + " mode bin holds 60 deg");
    o.require(below == 0, n + " no mass below the bound");
  }
}

Point2 centroid(const HalfEdgeMesh& m) {
  Point2 c = Point2::Zero();
  double a = 0;
  for (int f = 0; f < m.num_faces(); ++f) {
    auto& t = m.face(f);
    double w = m.face_area(f);
    c += w * (m.vertex(t[0]) + m.vertex(t[1]) + m.vertex(t[2])) / 3.0;
    a += w;
  }
  return c / a;
}

void criterion10(Outcome& o) {
  // heat on the star
  {
    auto& f = fixtures()["star.pgm"];
    auto sys = assemble(f.inside, f.chains);
    ScalarField u = gaussian_field(f.inside, centroid(f.inside), 5.0, 100.0);
    for (int v = 0; v < f.inside.num_vertices(); ++v)
      if (sys.boundary[v]) u[v] = 0;
    HeatSolver solver(sys, 500.0, 1e-3);
    double peak = u.maxCoeff(), energy = dirichlet_energy(sys, u), peak0 = peak;
    bool peak_ok = true, energy_ok = true;
    for (int s = 0; s < 500; ++s) {
      u = solver.step(u);
      double p = u.maxCoeff(), e = dirichlet_energy(sys, u);
      peak_ok &= p < peak;
      energy_ok &= e <= energy;
      peak = p;
      energy = e;
    }
    o.detail << "heat: peak " << fmt(peak0) << " -> " << fmt(peak) << ", " << sys.obtuse_faces << " obtuse faces; ";
    o.require(peak_ok, "peak strictly decreasing");
    o.require(energy_ok, "energy non-increasing");
  }
  // affine data on a convex raw-grid patch
  {
    auto m = build_grid(make_grid_spec({0, 0}, {12, 12}));
    auto sys = assemble(m);
    ScalarField g(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) g[v] = 0.7 * m.vertex(v).x() - 1.3 * m.vertex(v).y() + 4;
    double err = (solve_harmonic(sys, g) - g).cwiseAbs().maxCoeff();
    o.detail << "affine error " << fmt(err, 3) << "; ";
    o.require(err < 1e-6, "affine reproduction");
  }
  // mirror-symmetric hexagon with the lattice pinned so the axis is a lattice line
  {
    auto chains = load_chains(testing::fixture("hexagon.chain"));
    auto spec = grid_for_chains(chains, kDefaultEdgeLength);
    spec.origin = Point2::Zero();
    auto r = remesh(chains, spec, Thresholds{});
    auto in = inside_region(r.mesh, chains);
    const double e = kDefaultEdgeLength, h = e * std::sqrt(3.0) / 2;
    const Point2 center(75 * e, 86 * h);
    auto sys = assemble(in, chains);
    ScalarField u = gaussian_field(in, center, 5.0, 100.0);
    for (int v = 0; v < in.num_vertices(); ++v)
      if (sys.boundary[v]) u[v] = 0;
    HeatSolver solver(sys, 500.0, 1e-3);
    for (int s = 0; s < 50; ++s) u = solver.step(u);
    auto key = [](const Point2& p) {
      return std::to_string(std::llround(p.x() * 1e7)) + "," + std::to_string(std::llround(p.y() * 1e7));
    };
    std::unordered_map<std::string, int> at;
    for (int v = 0; v < in.num_vertices(); ++v) at[key(in.vertex(v))] = v;
    int unmatched = 0;
    double diff = 0;
    for (int v = 0; v < in.num_vertices(); ++v) {
      Point2 m(2 * center.x() - in.vertex(v).x(), in.vertex(v).y());
      auto it = at.find(key(m));
      if (it == at.end()) {
        ++unmatched;
        continue;
      }
      diff = std::max(diff, std::abs(u[v] - u[it->second]));
    }
    double rel = diff / u.cwiseAbs().maxCoeff();
    o.detail << "hexagon: " << in.num_faces() << " faces, " << unmatched << " unmatched vertices, max asymmetry "
             << fmt(rel, 3);
    o.require(unmatched == 0, "mesh is mirror-symmetric");
    o.require(rel < 1e-8, "field symmetric to 1e-8");
  }
}

void criterion11(Outcome& o) {
  std::vector<double> lx, ly;
  for (auto n : {"star100.pgm", "star.pgm", "star400.pgm"}) {
    auto mask = load_bitmap(testing::fixture(n));
    double best = 1e30;
    int faces = 0;
    for (int rep = 0; rep < 3; ++rep) {
      auto t0 = Clock::now();
      auto r = remesh(mask, Thresholds{});
      best = std::min(best, seconds_since(t0));
      faces = r.mesh.num_faces();
    }
    lx.push_back(std::log(faces));
    ly.push_back(std::log(best));
    o.detail << n << ": " << faces << " faces " << fmt(best * 1e3, 4) << " ms; ";
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / lx.size();
    my += ly[i] / ly.size();
  }
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  double slope = sxy / sxx;
  o.detail << "exponent " << fmt(slope, 4);
  o.require(slope < 1.3, "exponent < 1.3");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"theoretical bounds", criterion1},
      {"sampling rule", criterion2},
      {"bound satisfaction on fixtures", criterion3},
      {"watertightness and boundary exactness", criterion4},
      {"path independence", criterion5},
      {"template table golden suite", criterion6},
      {"ablation direction", criterion7},
      {"aspect-ratio statistics", criterion8},
      {"histogram shape", criterion9},
      {"FEM sanity", criterion10},
      {"scaling", criterion11},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail << " [exception: " << ex.what() << "]";
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
