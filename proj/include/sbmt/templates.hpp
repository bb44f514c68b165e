#pragma once

#include <array>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "sbmt/classify.hpp"

namespace sbmt {

// Faces refer to cycle positions of a canonical configuration (kApex for the
// interior apex).
struct Patch {
  std::vector<std::array<int, 3>> faces;
  std::string source;  // catalog case name(s), or "synthesized"
};

struct CatalogEntry {
  std::string name;
  std::vector<std::string> labels;  // cycle labels
  std::string apex;
  std::vector<std::vector<std::string>> traces;
  std::vector<std::array<std::string, 3>> face_labels;  // verbatim
  std::map<std::string, std::string> bind;
  bool noop = false;
  std::vector<Point2> figure;
  SymConfig config;                          // in the entry's own labelling
  std::vector<std::array<int, 3>> faces;     // positions in config
};

std::vector<CatalogEntry> parse_catalog(const std::string& text);
const std::string& builtin_catalog_text();

class TemplateTable {
 public:
  explicit TemplateTable(std::vector<CatalogEntry> entries);
  static const TemplateTable& builtin();

  // Patch for a canonical configuration: catalog entry, its mirror image, or
  // a deterministic synthesized triangulation.
  Patch lookup(const Canonical& c) const;
  Patch lookup(const SymConfig& c) const { return lookup(canonicalize(c)); }

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  struct Slot {
    SymConfig config;  // canonical
    Patch patch;
  };
  const std::unordered_map<std::string, Slot>& table() const { return table_; }
  // problems found while loading (conflicting keys)
  const std::vector<std::string>& load_defects() const { return load_defects_; }

 private:
  std::vector<CatalogEntry> entries_;
  std::unordered_map<std::string, Slot> table_;
  std::vector<std::string> load_defects_;
};

// Patch expressed in entry positions -> canonical positions.
Patch to_canonical(const SymConfig& config, const std::vector<std::array<int, 3>>& faces, const std::string& source);
Patch mirror_patch(const SymConfig& config, const std::vector<std::array<int, 3>>& faces, SymConfig* mirrored);

// Triangulation of a canonical configuration without a catalog entry.
Patch synthesize(const SymConfig& canonical);

// Concrete realization of a configuration on the canonical triangle
// A=(0,0) B=(1,0) C=(1/2, sqrt(3)/2): edge tokens evenly spaced, apex at the centroid.
std::vector<Point2> canonical_realization(const SymConfig& c, Point2* apex);

// Tiling, CCW, boundary realization, duplicates. Empty when the patch is valid.
std::vector<std::string> verify_patch(const SymConfig& config, const std::vector<std::array<int, 3>>& faces,
                                      const std::vector<Point2>& pos, const Point2& apex);
std::vector<std::string> verify_patch(const SymConfig& config, const Patch& patch);

struct TableReport {
  int entries = 0;
  int keys = 0;
  int figures_checked = 0;
  int defects = 0;
  std::vector<std::string> messages;
};

TableReport verify_table(const TemplateTable& table = TemplateTable::builtin());

// Global-id triangles for one classified face.
std::vector<Tri> instantiate(const Patch& patch, const FaceConfig& fc);

}  // namespace sbmt
