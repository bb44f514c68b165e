#include "sbmt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include "sbmt/errors.hpp"

namespace sbmt {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string rgb(double r, double g, double b) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::clamp(r, 0.0, 1.0) * 255 + 0.5),
                static_cast<int>(std::clamp(g, 0.0, 1.0) * 255 + 0.5),
                static_cast<int>(std::clamp(b, 0.0, 1.0) * 255 + 0.5));
  return buf;
}

// blue -> cyan -> yellow -> red
std::string ramp(double s) {
  s = std::clamp(s, 0.0, 1.0);
  if (s < 1.0 / 3) return rgb(0, 3 * s, 1);
  if (s < 2.0 / 3) return rgb(3 * s - 1, 1, 2 - 3 * s);
  return rgb(1, 3 - 3 * s, 0);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct Frame {
  Point2 lo, hi;
  double scale;
  double x(const Point2& p) const { return (p.x() - lo.x()) * scale; }
  double y(const Point2& p) const { return (p.y() - lo.y()) * scale; }
};

Frame frame_of(const HalfEdgeMesh& mesh, double scale) {
  Frame f{Point2::Constant(std::numeric_limits<double>::infinity()),
          Point2::Constant(-std::numeric_limits<double>::infinity()), scale};
  for (auto& p : mesh.vertices()) {
    f.lo = f.lo.cwiseMin(p);
    f.hi = f.hi.cwiseMax(p);
  }
  return f;
}

void header(std::ostream& os, double w, double h) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void polygon(std::ostream& os, const Frame& fr, const HalfEdgeMesh& mesh, const Tri& t, const std::string& fill,
             const std::string& stroke) {
  os << "<polygon points=\"";
  for (int k = 0; k < 3; ++k) os << (k ? " " : "") << num(fr.x(mesh.vertex(t[k]))) << "," << num(fr.y(mesh.vertex(t[k])));
  os << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" stroke-width=\"0.3\"/>\n";
}

}  // namespace

void render_mesh_svg(const HalfEdgeMesh& mesh, std::ostream& os, const SvgOptions& opt) {
  if (mesh.num_faces() == 0) throw EmptyMesh("nothing to render");
  Frame fr = frame_of(mesh, opt.scale);
  header(os, (fr.hi.x() - fr.lo.x()) * fr.scale, (fr.hi.y() - fr.lo.y()) * fr.scale);
  static const char* palette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
                                  "#a6cee3", "#f781bf", "#a65628", "#999999", "#66c2a5"};
  std::map<std::string, std::string> class_color;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Tri& t = mesh.face(f);
    std::string fill = "#f4f4f4";
    if (opt.color_by == ColorBy::Angle) {
      auto a = triangle_angles(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]));
      double m = std::min({a[0], a[1], a[2]}) * 180.0 / kPi;
      fill = ramp(m / 60.0);
    } else if (opt.color_by == ColorBy::Class && opt.face_class && f < static_cast<int>(opt.face_class->size())) {
      const std::string& c = (*opt.face_class)[f];
      if (!c.empty()) {
        auto it = class_color.find(c);
        if (it == class_color.end())
          it = class_color.emplace(c, palette[class_color.size() % (sizeof palette / sizeof *palette)]).first;
        fill = it->second;
      }
    }
    polygon(os, fr, mesh, t, fill, "#333333");
  }
  if (opt.chains)
    for (auto& c : *opt.chains) {
      os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
      for (size_t i = 0; i < c.points.size(); ++i) os << (i ? " " : "") << num(fr.x(c.points[i])) << "," << num(fr.y(c.points[i]));
      if (c.closed && !c.points.empty()) os << " " << num(fr.x(c.points[0])) << "," << num(fr.y(c.points[0]));
      os << "\"/>\n";
    }
  double ly = 14;
  for (auto& [name, color] : class_color) {
    os << "<rect x=\"4\" y=\"" << num(ly - 10) << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>"
       << "<text x=\"18\" y=\"" << num(ly) << "\" font-size=\"11\">" << name << "</text>\n";
    ly += 14;
  }
  os << "</svg>\n";
}

void render_histogram_svg(const AngleHistogram& h, std::ostream& os) {
  const double W = 640, H = 320, left = 50, bottom = 30, top = 10;
  header(os, W, H);
  double maxlog = 1;
  for (long c : h.raw) maxlog = std::max(maxlog, std::log10(1.0 + static_cast<double>(c)));
  const double bw = (W - left - 10) / static_cast<double>(h.raw.size());
  auto ypos = [&](double v) { return H - bottom - (H - bottom - top) * std::log10(1.0 + v) / maxlog; };
  for (size_t i = 0; i < h.raw.size(); ++i) {
    double y = ypos(static_cast<double>(h.raw[i]));
    os << "<rect x=\"" << num(left + i * bw) << "\" y=\"" << num(y) << "\" width=\"" << num(bw * 0.9)
       << "\" height=\"" << num(H - bottom - y) << "\" fill=\"#9ecae1\"/>\n";
  }
  os << "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < h.smoothed.size(); ++i)
    os << (i ? " " : "") << num(left + (i + 0.45) * bw) << "," << num(ypos(h.smoothed[i]));
  os << "\"/>\n";
  for (size_t i = 0; i < h.raw.size(); i += 5)
    os << "<text x=\"" << num(left + i * bw) << "\" y=\"" << num(H - 10) << "\" font-size=\"10\">"
       << static_cast<int>(h.centers[i] - h.bin_width / 2) << "</text>\n";
  os << "<text x=\"4\" y=\"14\" font-size=\"10\">log10(1+count)</text>\n";
  os << "<text x=\"" << num(W - 120) << "\" y=\"" << num(H - 10) << "\" font-size=\"10\">min angle (deg)</text>\n";
  os << "</svg>\n";
}

void render_field_svg(const HalfEdgeMesh& mesh, const ScalarField& u, std::ostream& os, double lo, double hi,
                      double scale) {
  if (mesh.num_faces() == 0) throw EmptyMesh("nothing to render");
  Frame fr = frame_of(mesh, scale);
  header(os, (fr.hi.x() - fr.lo.x()) * fr.scale, (fr.hi.y() - fr.lo.y()) * fr.scale);
  double span = hi > lo ? hi - lo : 1.0;
  for (auto& t : mesh.faces()) {
    double v = (u[t[0]] + u[t[1]] + u[t[2]]) / 3.0;
    std::string c = ramp((v - lo) / span);
    polygon(os, fr, mesh, t, c, c);
  }
  os << "</svg>\n";
}

}  // namespace sbmt
