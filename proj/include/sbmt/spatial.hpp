#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sbmt/geom.hpp"

namespace sbmt {

// Uniform bucket grid over integer ids. Items are registered by bounding box;
// queries return candidate ids (possibly with duplicates removed, unsorted).
class BucketGrid {
 public:
  explicit BucketGrid(double cell = 1.0) : cell_(cell) {}

  void insert(int id, const Point2& lo, const Point2& hi) {
    auto [i0, j0] = cell_of(lo);
    auto [i1, j1] = cell_of(hi);
    for (int64_t i = i0; i <= i1; ++i)
      for (int64_t j = j0; j <= j1; ++j) cells_[key(i, j)].push_back(id);
  }
  void insert(int id, const Point2& p) { insert(id, p, p); }

  template <class F>
  void visit(const Point2& lo, const Point2& hi, F&& f) const {
    auto [i0, j0] = cell_of(lo);
    auto [i1, j1] = cell_of(hi);
    for (int64_t i = i0; i <= i1; ++i)
      for (int64_t j = j0; j <= j1; ++j) {
        auto it = cells_.find(key(i, j));
        if (it == cells_.end()) continue;
        for (int id : it->second) f(id);
      }
  }

  // Sorted, deduplicated candidates within the box.
  std::vector<int> query(const Point2& lo, const Point2& hi) const {
    std::vector<int> out;
    visit(lo, hi, [&](int id) { out.push_back(id); });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  std::vector<int> query(const Point2& p, double r) const {
    return query(Point2(p.x() - r, p.y() - r), Point2(p.x() + r, p.y() + r));
  }

 private:
  std::pair<int64_t, int64_t> cell_of(const Point2& p) const {
    return {static_cast<int64_t>(std::floor(p.x() / cell_)), static_cast<int64_t>(std::floor(p.y() / cell_))};
  }
  static uint64_t key(int64_t i, int64_t j) {
    return (static_cast<uint64_t>(i) << 32) ^ (static_cast<uint64_t>(j) & 0xffffffffULL);
  }
  double cell_;
  std::unordered_map<uint64_t, std::vector<int>> cells_;
};

}  // namespace sbmt
