#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sbmt/boundary.hpp"
#include "sbmt/fem.hpp"
#include "sbmt/mesh.hpp"
#include "sbmt/quality.hpp"

namespace sbmt {

enum class ColorBy { None, Angle, Class };

struct SvgOptions {
  ColorBy color_by = ColorBy::None;
  const std::vector<std::string>* face_class = nullptr;  // for ColorBy::Class
  const std::vector<PolyChain>* chains = nullptr;        // drawn on top
  double scale = 4.0;                                    // px per unit
};

void render_mesh_svg(const HalfEdgeMesh& mesh, std::ostream& os, const SvgOptions& opt = {});
void render_histogram_svg(const AngleHistogram& h, std::ostream& os);
void render_field_svg(const HalfEdgeMesh& mesh, const ScalarField& u, std::ostream& os, double lo, double hi,
                      double scale = 4.0);

}  // namespace sbmt
