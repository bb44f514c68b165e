#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sbmt/remesh.hpp"

namespace sbmt {

constexpr double kSliverAngle = 5.0;  // degrees
constexpr double kEquilateralTol = 1e-6;

struct QualityReport {
  int triangle_count = 0;
  double min_angle = 0;  // degrees
  double max_angle = 0;
  double min_area = 0;
  double max_area = 0;
  int sliver_count = 0;
  int equilateral_count = 0;
  double equilateral_ratio = 0;
  double area_mean = 0;
  double area_variance = 0;
  double ar_median = 0;
  double ar_p95 = 0;
  double ar_max = 0;
  int obtuse_count = 0;
};

// longest edge over shortest altitude
double aspect_ratio(const Point2& a, const Point2& b, const Point2& c);
bool is_equilateral(const Point2& a, const Point2& b, const Point2& c, double rel = kEquilateralTol);
QualityReport quality_report(const HalfEdgeMesh& mesh);

// Lower bounds on the minimum angle (degrees) and area guaranteed by the thresholds.
std::pair<double, double> theoretical_bounds(const Thresholds& t);

struct AngleHistogram {
  double bin_width = 2.0;
  std::vector<double> centers;  // 1, 3, 5, ...
  std::vector<long> raw;
  std::vector<double> smoothed;  // Gaussian, sigma 1 bin, radius 3 bins
  int mode_bin() const;
  int bin_of(double angle_deg) const;
};

AngleHistogram angle_histogram(const HalfEdgeMesh& mesh);

void write_quality_csv(const QualityReport& q, std::ostream& os);
void write_histogram_csv(const AngleHistogram& h, std::ostream& os);

struct AblationRow {
  std::string name;  // E1..E5
  PreprocessOptions rules;
  QualityReport quality;
  RemeshStats stats;
  std::vector<std::string> warnings;
};

// E1 all rules, E2 no snapping, E3 no repulsion, E4 no elimination, E5 none.
// Quality is measured on the faces inside the domain.
std::vector<AblationRow> run_ablation(const std::vector<PolyChain>& chains, const GridSpec& grid,
                                      const Thresholds& t, int threads = 0);
void write_ablation_csv(const std::vector<AblationRow>& rows, std::ostream& os);

struct SweepRow {
  Thresholds t;
  bool valid = false;
  std::string problem;
  QualityReport quality;
};

std::vector<SweepRow> sensitivity_sweep(const std::vector<PolyChain>& chains, const GridSpec& grid,
                                        const std::vector<Thresholds>& triplets, int threads = 0);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

}  // namespace sbmt
