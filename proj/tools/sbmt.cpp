#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sbmt/errors.hpp"
#include "sbmt/fem.hpp"
#include "sbmt/quality.hpp"
#include "sbmt/remesh.hpp"
#include "sbmt/svg.hpp"

#ifndef SBMT_VERSION
#define SBMT_VERSION "dev"
#endif

namespace {

using namespace sbmt;
using json = nlohmann::ordered_json;

struct Common {
  double a = 0.26, b = 0.125, c = 0.183;
  double e = kDefaultEdgeLength;
  double margin = 1.0;
  int threads = 0;
  bool invert = false;
  std::string region = "inside";

  Thresholds thresholds() const { return {a, b, c, e}; }
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_bitmap(const std::string& path) { return ends_with(path, ".pgm") || ends_with(path, ".pbm"); }

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("IOError", "cannot write " + path);
  return os;
}

std::vector<PolyChain> input_chains(const std::string& path, const Common& opt) {
  if (is_bitmap(path)) return chains_from_mask(load_bitmap(path, opt.invert), opt.e);
  return load_chains(path);
}

json thresholds_json(const Common& o) {
  return {{"a", o.a}, {"b", o.b}, {"c", o.c}, {"edge_length", o.e}, {"margin", o.margin}};
}

void write_manifest(const std::string& artifact, const std::string& command, const Common& o, json extra) {
  json m;
  m["tool"] = "sbmt";
  m["version"] = SBMT_VERSION;
  m["command"] = command;
  m["artifact"] = artifact;
  m["thresholds"] = thresholds_json(o);
  m["eps"] = default_tolerance().eps;
  m["threads"] = o.threads;
  m["seed"] = 0;
  for (auto& [k, v] : extra.items()) m[k] = v;
  auto os = open_out(artifact + ".manifest.json");
  os << m.dump(2) << "\n";
}

json report_json(const QualityReport& q) {
  return {{"triangles", q.triangle_count},    {"min_angle_deg", q.min_angle},
          {"min_area", q.min_area},           {"slivers", q.sliver_count},
          {"equilateral_ratio", q.equilateral_ratio}, {"ar_median", q.ar_median},
          {"ar_max", q.ar_max}};
}

void print_report(const QualityReport& q) {
  std::cerr << "triangles " << q.triangle_count << ", min angle " << q.min_angle << " deg, min area " << q.min_area
            << ", slivers " << q.sliver_count << ", equilateral " << q.equilateral_ratio * 100 << "%, AR median "
            << q.ar_median << "\n";
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-conforming equilateral triangulation of bitmaps and polygon chains"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  Common opt;
  app.add_option("--a", opt.a, "vertex snapping radius");
  app.add_option("--b", opt.b, "edge elimination distance");
  app.add_option("--c", opt.c, "repulsion distance");
  app.add_option("--edge-length,-e", opt.e, "grid edge length (pixels)");
  app.add_option("--margin", opt.margin, "grid margin around the domain (pixels)");
  app.add_option("--threads", opt.threads, "worker threads (0 = all cores)");
  app.add_flag("--invert", opt.invert, "treat light pixels as foreground");

  // trace
  auto* trace = app.add_subcommand("trace", "trace a bitmap into protocol-conforming chains");
  std::string tr_in, tr_out;
  bool tr_raw = false;
  trace->add_option("--input,input", tr_in, "PGM/PBM bitmap")->required();
  trace->add_option("--out", tr_out, "chain file")->required();
  trace->add_flag("--raw", tr_raw, "skip protocol enforcement");

  // mesh
  auto* mesh = app.add_subcommand("mesh", "mesh a bitmap or chain file");
  std::string m_in, m_out, m_dump, m_chains_out;
  int m_det = 0;
  uint64_t m_seed = 0;
  bool no_snap = false, no_repel = false, no_elim = false, lenient = false;
  mesh->add_option("--input,input", m_in, "PGM/PBM bitmap or chain file")->required();
  mesh->add_option("--out", m_out, "mesh file (.off or .obj)")->required();
  mesh->add_option("--region", opt.region, "inside | all")->check(CLI::IsMember({"inside", "all"}));
  mesh->add_option("--check-determinism", m_det, "compare K shuffled schedules");
  mesh->add_option("--seed", m_seed, "face schedule seed");
  mesh->add_option("--dump-classes", m_dump, "per-face class CSV for render --color-by class");
  mesh->add_option("--chains-out", m_chains_out, "write the chains used");
  mesh->add_flag("--no-snap", no_snap);
  mesh->add_flag("--no-repel", no_repel);
  mesh->add_flag("--no-eliminate", no_elim);
  mesh->add_flag("--lenient", lenient, "fan-split faces that violate template preconditions");

  // quality
  auto* quality = app.add_subcommand("quality", "mesh quality statistics");
  std::string q_in, q_csv;
  quality->add_option("mesh", q_in)->required();
  quality->add_option("--csv", q_csv, "report CSV")->required();

  // hist
  auto* hist = app.add_subcommand("hist", "minimum-angle histogram");
  std::string h_in, h_csv, h_svg;
  hist->add_option("mesh", h_in)->required();
  hist->add_option("--csv", h_csv);
  hist->add_option("--svg", h_svg);

  // render
  auto* render = app.add_subcommand("render", "SVG rendering of a mesh");
  std::string r_in, r_svg, r_color = "none", r_classes, r_chains;
  render->add_option("mesh", r_in)->required();
  render->add_option("--svg", r_svg)->required();
  render->add_option("--color-by", r_color)->check(CLI::IsMember({"none", "angle", "class"}));
  render->add_option("--classes", r_classes, "CSV from mesh --dump-classes");
  render->add_option("--chains", r_chains, "chain file drawn on top");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "E1..E5 rule ablation");
  std::string ab_in, ab_csv;
  ablate->add_option("--input,input", ab_in)->required();
  ablate->add_option("--csv", ab_csv)->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "threshold sensitivity sweep");
  std::string sw_in, sw_csv;
  std::vector<std::string> sw_triplets;
  sweep->add_option("--input,input", sw_in)->required();
  sweep->add_option("--triplet", sw_triplets, "a,b,c (repeatable)")->required();
  sweep->add_option("--csv", sw_csv)->required();

  // heat
  auto* heat = app.add_subcommand("heat", "transient heat diffusion on a mesh");
  std::string he_in, he_out, he_snaps = "0.1,0.3,0.5", he_chains;
  double alpha = 500, dt = 1e-3, t_end = 0.5, sigma = 5, amplitude = 100;
  heat->add_option("mesh", he_in)->required();
  heat->add_option("--out", he_out, "output prefix")->required();
  heat->add_option("--alpha", alpha);
  heat->add_option("--dt", dt);
  heat->add_option("--t", t_end, "final time");
  heat->add_option("--snapshots", he_snaps, "comma-separated times");
  heat->add_option("--sigma", sigma, "initial Gaussian width");
  heat->add_option("--amplitude", amplitude);
  heat->add_option("--chains", he_chains, "chain file whose vertices are held at zero");

  // verify-table
  auto* verify = app.add_subcommand("verify-table", "self-test of the template table");
  std::string v_report;
  verify->add_option("--report", v_report, "write the report to a file");

  // export
  auto* exportc = app.add_subcommand("export", "convert between OFF and OBJ");
  std::string ex_in, ex_out;
  exportc->add_option("mesh", ex_in)->required();
  exportc->add_option("--out", ex_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return 1;
  }

  const Tolerance tol = default_tolerance();
  try {
    auto problems = validate_thresholds(opt.thresholds(), std::numeric_limits<double>::infinity());
    if (!problems.empty()) {
      std::string msg;
      for (auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
      throw InvalidThresholds(msg);
    }
    if (!(opt.threads >= 0)) throw ValidationError("InvalidOption", "--threads must be >= 0");

    if (*trace) {
      auto mask = load_bitmap(tr_in, opt.invert);
      int rejected = 0;
      auto chains = trace_contours(mask, &rejected);
      if (chains.empty()) throw EmptyMask("no contour found in " + tr_in);
      if (!tr_raw)
        for (auto& c : chains) c = enforce_protocol(c, opt.e);
      auto os = open_out(tr_out);
      write_chains(chains, os);
      write_manifest(tr_out, "trace", opt, {{"input", tr_in}, {"chains", chains.size()}, {"rejected", rejected}});
      std::cerr << chains.size() << " chains (" << rejected << " rejected) -> " << tr_out << "\n";
    } else if (*mesh) {
      auto chains = input_chains(m_in, opt);
      GridSpec grid = grid_for_chains(chains, opt.e, opt.margin);
      RemeshOptions ro;
      ro.threads = opt.threads;
      ro.schedule_seed = m_seed;
      ro.pre.snap = !no_snap;
      ro.pre.repel = !no_repel;
      ro.pre.eliminate = !no_elim;
      ro.strict = !lenient;
      auto res = remesh(chains, grid, opt.thresholds(), ro, tol);
      json det = nullptr;
      if (m_det > 0) {
        auto rep = check_path_independence(chains, grid, opt.thresholds(), ro, m_det, tol);
        det = {{"runs", rep.runs}, {"identical", rep.ok}};
        if (!rep.ok)
          throw PipelineError("Nondeterminism", "schedule seed " + std::to_string(*rep.counterexample_seed) +
                                                    " changed the output at byte " +
                                                    std::to_string(rep.first_difference));
        std::cerr << "determinism: " << rep.runs << " schedules identical\n";
      }
      HalfEdgeMesh out = res.mesh;
      std::vector<std::string> classes = res.face_class;
      if (opt.region == "inside") {
        std::vector<int> kept;
        out = inside_region(res.mesh, chains, &kept);
        classes.clear();
        for (int f : kept) classes.push_back(res.face_class[f]);
      }
      save_mesh(out, m_out);
      if (!m_dump.empty()) {
        auto os = open_out(m_dump);
        os << "face,class\n";
        for (size_t f = 0; f < classes.size(); ++f) os << f << "," << (classes[f].empty() ? "-" : classes[f]) << "\n";
      }
      if (!m_chains_out.empty()) {
        auto os = open_out(m_chains_out);
        write_chains(chains, os);
      }
      auto q = quality_report(out);
      write_manifest(m_out, "mesh", opt,
                     {{"input", m_in},
                      {"region", opt.region},
                      {"seed", m_seed},
                      {"rules", {{"snap", !no_snap}, {"repel", !no_repel}, {"eliminate", !no_elim}}},
                      {"strict", !lenient},
                      {"grid", {{"origin", {grid.origin.x(), grid.origin.y()}}}},
                      {"stats",
                       {{"base_faces", res.stats.base_faces},
                        {"replaced_faces", res.stats.replaced_faces},
                        {"catalog_patches", res.stats.catalog_patches},
                        {"synthesized_patches", res.stats.synthesized_patches},
                        {"fallback_faces", res.stats.fallback_faces},
                        {"seconds", res.stats.seconds}}},
                      {"quality", report_json(q)},
                      {"determinism", det}});
      std::cerr << m_out << ": ";
      print_report(q);
    } else if (*quality) {
      auto m = load_mesh(q_in);
      auto q = quality_report(m);
      auto os = open_out(q_csv);
      write_quality_csv(q, os);
      print_report(q);
    } else if (*hist) {
      auto h = angle_histogram(load_mesh(h_in));
      if (h_csv.empty() && h_svg.empty()) throw ValidationError("InvalidOption", "hist needs --csv and/or --svg");
      if (!h_csv.empty()) {
        auto os = open_out(h_csv);
        write_histogram_csv(h, os);
      }
      if (!h_svg.empty()) {
        auto os = open_out(h_svg);
        render_histogram_svg(h, os);
      }
      std::cerr << "mode bin [" << h.centers[h.mode_bin()] - 1 << ", " << h.centers[h.mode_bin()] + 1 << ") deg\n";
    } else if (*render) {
      auto m = load_mesh(r_in);
      SvgOptions so;
      so.color_by = r_color == "angle" ? ColorBy::Angle : r_color == "class" ? ColorBy::Class : ColorBy::None;
      std::vector<std::string> classes;
      std::vector<PolyChain> chains;
      if (so.color_by == ColorBy::Class) {
        if (r_classes.empty()) throw ValidationError("InvalidOption", "--color-by class needs --classes");
        std::ifstream is(r_classes);
        if (!is) throw ValidationError("IOError", "cannot read " + r_classes);
        std::string line;
        std::getline(is, line);
        while (std::getline(is, line)) {
          auto comma = line.find(',');
          std::string c = comma == std::string::npos ? "" : line.substr(comma + 1);
          classes.push_back(c == "-" ? "" : c);
        }
        if (static_cast<int>(classes.size()) != m.num_faces())
          throw ValidationError("InvalidOption", "class file does not match the mesh face count");
        so.face_class = &classes;
      }
      if (!r_chains.empty()) {
        chains = load_chains(r_chains);
        so.chains = &chains;
      }
      auto os = open_out(r_svg);
      render_mesh_svg(m, os, so);
    } else if (*ablate) {
      auto chains = input_chains(ab_in, opt);
      auto rows = run_ablation(chains, grid_for_chains(chains, opt.e, opt.margin), opt.thresholds(), opt.threads);
      auto os = open_out(ab_csv);
      write_ablation_csv(rows, os);
      for (auto& r : rows) {
        std::cerr << r.name << ": ";
        print_report(r.quality);
        for (auto& w : r.warnings) std::cerr << "  WARNING: " << w << "\n";
      }
      write_manifest(ab_csv, "ablate", opt, {{"input", ab_in}});
    } else if (*sweep) {
      auto chains = input_chains(sw_in, opt);
      std::vector<Thresholds> triplets;
      for (auto& s : sw_triplets) {
        auto v = parse_list(s);
        if (v.size() != 3) throw ValidationError("InvalidOption", "triplet '" + s + "' needs three values");
        triplets.push_back({v[0], v[1], v[2], opt.e});
      }
      auto rows = sensitivity_sweep(chains, grid_for_chains(chains, opt.e, opt.margin), triplets, opt.threads);
      auto os = open_out(sw_csv);
      write_sweep_csv(rows, os);
      for (auto& r : rows)
        if (!r.valid) std::cerr << "skipped (" << r.t.a << "," << r.t.b << "," << r.t.c << "): " << r.problem << "\n";
      write_manifest(sw_csv, "sweep", opt, {{"input", sw_in}, {"triplets", sw_triplets}});
    } else if (*heat) {
      auto m = load_mesh(he_in);
      std::vector<PolyChain> chains;
      if (!he_chains.empty()) chains = load_chains(he_chains);
      auto sys = assemble(m, chains, tol);
      Point2 centre = Point2::Zero();
      double area = 0;
      for (int f = 0; f < m.num_faces(); ++f) {
        const Tri& t = m.face(f);
        double a = m.face_area(f);
        centre += a * (m.vertex(t[0]) + m.vertex(t[1]) + m.vertex(t[2])) / 3.0;
        area += a;
      }
      centre /= area;
      ScalarField u = gaussian_field(m, centre, sigma, amplitude);
      for (int v = 0; v < m.num_vertices(); ++v)
        if (sys.boundary[v]) u[v] = 0;
      auto snaps = parse_list(he_snaps);
      std::sort(snaps.begin(), snaps.end());
      HeatSolver solver(sys, alpha, dt);
      const int steps = static_cast<int>(std::lround(t_end / dt));
      size_t next = 0;
      json log = json::array();
      auto emit = [&](double t) {
        std::string base = he_out + "_t" + snapshot_name(t);
        auto csv = open_out(base + ".csv");
        csv << "vertex,x,y,u\n";
        for (int v = 0; v < m.num_vertices(); ++v)
          csv << v << "," << format_double(m.vertex(v).x()) << "," << format_double(m.vertex(v).y()) << ","
              << format_double(u[v]) << "\n";
        auto svg = open_out(base + ".svg");
        render_field_svg(m, u, svg, 0.0, amplitude);
        log.push_back({{"t", t}, {"peak", u.maxCoeff()}, {"energy", dirichlet_energy(sys, u)}});
      };
      for (int s = 1; s <= steps; ++s) {
        u = solver.step(u);
        double t = s * dt;
        while (next < snaps.size() && snaps[next] <= t + dt / 2) emit(snaps[next++]);
      }
      write_manifest(he_out, "heat", opt,
                     {{"input", he_in},
                      {"alpha", alpha},
                      {"dt", dt},
                      {"t", t_end},
                      {"sigma", sigma},
                      {"amplitude", amplitude},
                      {"obtuse_faces", sys.obtuse_faces},
                      {"snapshots", log}});
      std::cerr << steps << " steps, final peak " << u.maxCoeff() << ", obtuse faces " << sys.obtuse_faces << "\n";
    } else if (*verify) {
      auto rep = verify_table();
      std::ostringstream os;
      os << rep.entries << " catalog entries, " << rep.keys << " keys, " << rep.figures_checked
         << " figures checked, " << rep.defects << " defects\n";
      for (auto& msg : rep.messages) os << "  " << msg << "\n";
      std::cerr << os.str();
      if (!v_report.empty()) {
        auto f = open_out(v_report);
        f << os.str();
      }
      if (rep.defects) return 2;
    } else if (*exportc) {
      save_mesh(load_mesh(ex_in), ex_out);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
