#include "sbmt/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "sbmt/errors.hpp"

namespace sbmt {

namespace {

constexpr double kPi = 3.14159265358979323846;

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  size_t i = static_cast<size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  double f = pos - static_cast<double>(i);
  return v[i] + f * (v[i + 1] - v[i]);
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

double aspect_ratio(const Point2& a, const Point2& b, const Point2& c) {
  double l = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
  double area = std::abs(triangle_area(a, b, c));
  return l / (2.0 * area);
}

bool is_equilateral(const Point2& a, const Point2& b, const Point2& c, double rel) {
  double l0 = (b - a).norm(), l1 = (c - b).norm(), l2 = (a - c).norm();
  double lo = std::min({l0, l1, l2}), hi = std::max({l0, l1, l2});
  return hi - lo <= rel * hi;
}

QualityReport quality_report(const HalfEdgeMesh& mesh) {
  if (mesh.num_faces() == 0) throw EmptyMesh("mesh has no faces");
  QualityReport q;
  q.triangle_count = mesh.num_faces();
  q.min_angle = std::numeric_limits<double>::infinity();
  q.min_area = std::numeric_limits<double>::infinity();
  std::vector<double> ars, areas;
  ars.reserve(mesh.num_faces());
  areas.reserve(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Tri& t = mesh.face(f);
    const Point2 &a = mesh.vertex(t[0]), &b = mesh.vertex(t[1]), &c = mesh.vertex(t[2]);
    auto ang = triangle_angles(a, b, c);
    double lo = std::min({ang[0], ang[1], ang[2]}) * 180.0 / kPi;
    double hi = std::max({ang[0], ang[1], ang[2]}) * 180.0 / kPi;
    double area = triangle_area(a, b, c);
    q.min_angle = std::min(q.min_angle, lo);
    q.max_angle = std::max(q.max_angle, hi);
    q.min_area = std::min(q.min_area, area);
    q.max_area = std::max(q.max_area, area);
    if (lo < kSliverAngle) ++q.sliver_count;
    if (hi > 90.0) ++q.obtuse_count;
    if (is_equilateral(a, b, c)) ++q.equilateral_count;
    ars.push_back(aspect_ratio(a, b, c));
    areas.push_back(area);
  }
  q.equilateral_ratio = static_cast<double>(q.equilateral_count) / q.triangle_count;
  double sum = 0;
  for (double a : areas) sum += a;
  q.area_mean = sum / q.triangle_count;
  double var = 0;
  for (double a : areas) var += (a - q.area_mean) * (a - q.area_mean);
  q.area_variance = var / q.triangle_count;
  q.ar_median = quantile(ars, 0.5);
  q.ar_p95 = quantile(ars, 0.95);
  q.ar_max = *std::max_element(ars.begin(), ars.end());
  return q;
}

std::pair<double, double> theoretical_bounds(const Thresholds& t) {
  if (t.a * t.a < t.b * t.b) throw InvalidThresholds("a² < b²: angle bound undefined");
  double t1 = std::atan(t.b / (t.e + t.a - std::sqrt(t.a * t.a - t.b * t.b)));
  double t2 = std::atan(t.c / (t.e + t.a));
  return {std::min(t1, t2) * 180.0 / kPi, 0.5 * t.b * t.c};
}

int AngleHistogram::bin_of(double angle_deg) const {
  // nudge so an exact bin edge (60°) lands in the upper bin on every platform
  int b = static_cast<int>(std::floor((angle_deg + 1e-9) / bin_width));
  return std::clamp(b, 0, static_cast<int>(raw.size()) - 1);
}

int AngleHistogram::mode_bin() const {
  return static_cast<int>(std::max_element(raw.begin(), raw.end()) - raw.begin());
}

AngleHistogram angle_histogram(const HalfEdgeMesh& mesh) {
  if (mesh.num_faces() == 0) throw EmptyMesh("mesh has no faces");
  AngleHistogram h;
  const int bins = 31;  // [0, 62)
  h.raw.assign(bins, 0);
  for (int i = 0; i < bins; ++i) h.centers.push_back(h.bin_width * i + h.bin_width / 2);
  for (auto& t : mesh.faces()) {
    auto ang = triangle_angles(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]));
    ++h.raw[h.bin_of(std::min({ang[0], ang[1], ang[2]}) * 180.0 / kPi)];
  }
  double w[7], norm = 0;
  for (int k = -3; k <= 3; ++k) norm += w[k + 3] = std::exp(-0.5 * k * k);
  h.smoothed.assign(bins, 0.0);
  for (int i = 0; i < bins; ++i)
    for (int k = -3; k <= 3; ++k)
      if (i + k >= 0 && i + k < bins) h.smoothed[i] += w[k + 3] / norm * static_cast<double>(h.raw[i + k]);
  return h;
}

void write_quality_csv(const QualityReport& q, std::ostream& os) {
  os << "metric,value\n";
  os << "triangle_count," << q.triangle_count << "\n";
  os << "min_angle_deg," << fmt(q.min_angle) << "\n";
  os << "max_angle_deg," << fmt(q.max_angle) << "\n";
  os << "min_area," << fmt(q.min_area) << "\n";
  os << "max_area," << fmt(q.max_area) << "\n";
  os << "sliver_count," << q.sliver_count << "\n";
  os << "equilateral_count," << q.equilateral_count << "\n";
  os << "equilateral_ratio," << fmt(q.equilateral_ratio) << "\n";
  os << "area_mean," << fmt(q.area_mean) << "\n";
  os << "area_variance," << fmt(q.area_variance) << "\n";
  os << "ar_median," << fmt(q.ar_median) << "\n";
  os << "ar_p95," << fmt(q.ar_p95) << "\n";
  os << "ar_max," << fmt(q.ar_max) << "\n";
  os << "obtuse_count," << q.obtuse_count << "\n";
}

void write_histogram_csv(const AngleHistogram& h, std::ostream& os) {
  os << "bin_lo,bin_hi,center,raw,smoothed\n";
  for (size_t i = 0; i < h.raw.size(); ++i)
    os << fmt(h.centers[i] - h.bin_width / 2) << "," << fmt(h.centers[i] + h.bin_width / 2) << ","
       << fmt(h.centers[i]) << "," << h.raw[i] << "," << fmt(h.smoothed[i]) << "\n";
}

std::vector<AblationRow> run_ablation(const std::vector<PolyChain>& chains, const GridSpec& grid,
                                      const Thresholds& t, int threads) {
  struct Cfg {
    const char* name;
    bool snap, repel, eliminate;
  };
  const Cfg cfgs[] = {{"E1", true, true, true},
                      {"E2", false, true, true},
                      {"E3", true, false, true},
                      {"E4", true, true, false},
                      {"E5", false, false, false}};
  std::vector<AblationRow> rows;
  for (auto& c : cfgs) {
    AblationRow row;
    row.name = c.name;
    row.rules.snap = c.snap;
    row.rules.repel = c.repel;
    row.rules.eliminate = c.eliminate;
    RemeshOptions opt;
    opt.pre = row.rules;
    opt.strict = c.snap && c.repel && c.eliminate;
    opt.threads = threads;
    auto res = remesh(chains, grid, t, opt);
    row.stats = res.stats;
    row.quality = quality_report(inside_region(res.mesh, chains));
    if (res.stats.protocol_violations)
      row.warnings.push_back(std::to_string(res.stats.protocol_violations) + " faces violate template preconditions");
    if (res.stats.fallback_faces)
      row.warnings.push_back(std::to_string(res.stats.fallback_faces) + " faces fan-split from the centroid");
    if (res.stats.elimination.conflicts)
      row.warnings.push_back(std::to_string(res.stats.elimination.conflicts) + " elimination conflicts");
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_ablation_csv(const std::vector<AblationRow>& rows, std::ostream& os) {
  os << "config,snap,repel,eliminate,triangles,min_angle_deg,min_area,slivers,equilateral_ratio,ar_median,ar_max,"
        "fallback_faces,protocol_violations\n";
  for (auto& r : rows)
    os << r.name << "," << r.rules.snap << "," << r.rules.repel << "," << r.rules.eliminate << ","
       << r.quality.triangle_count << "," << fmt(r.quality.min_angle) << "," << fmt(r.quality.min_area) << ","
       << r.quality.sliver_count << "," << fmt(r.quality.equilateral_ratio) << "," << fmt(r.quality.ar_median) << ","
       << fmt(r.quality.ar_max) << "," << r.stats.fallback_faces << "," << r.stats.protocol_violations << "\n";
}

std::vector<SweepRow> sensitivity_sweep(const std::vector<PolyChain>& chains, const GridSpec& grid,
                                        const std::vector<Thresholds>& triplets, int threads) {
  std::vector<SweepRow> rows;
  for (auto& t : triplets) {
    SweepRow row;
    row.t = t;
    auto problems = validate_thresholds(t, min_segment_length(chains));
    if (!problems.empty()) {
      row.problem = problems.front();
      rows.push_back(row);
      continue;
    }
    GridSpec g = grid;
    g.edge_length = t.e;
    RemeshOptions opt;
    opt.threads = threads;
    try {
      auto res = remesh(chains, g, t, opt);
      row.quality = quality_report(inside_region(res.mesh, chains));
      row.valid = true;
    } catch (const Error& e) {
      row.problem = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "a,b,c,e,valid,problem,min_angle_deg,min_area,slivers,equilateral_ratio\n";
  for (auto& r : rows) {
    os << fmt(r.t.a) << "," << fmt(r.t.b) << "," << fmt(r.t.c) << "," << fmt(r.t.e) << "," << r.valid << ",\""
       << r.problem << "\",";
    if (r.valid)
      os << fmt(r.quality.min_angle) << "," << fmt(r.quality.min_area) << "," << r.quality.sliver_count << ","
         << fmt(r.quality.equilateral_ratio);
    else
      os << ",,,";
    os << "\n";
  }
}

}  // namespace sbmt
