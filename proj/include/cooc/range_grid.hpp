#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cooc/correlogram.hpp"

namespace cooc {

/// Uniform 3-D grid over labeled points for orthogonal range counting.
///
/// Each non-empty cell keeps its point list, the tight bounding box of
/// those points and a per-label count. A box query adds whole-cell counts
/// for cells whose bounding box lies inside the query and tests points
/// individually otherwise, so results match exhaustive scanning exactly.
class RangeGrid {
public:
  RangeGrid(const LabeledVideo& video, const Kernel& cell, std::size_t k_star);

  /// Adds to `histogram` the per-label count of points q with
  /// |q - center| <= half on every axis (center included if present).
  void count_box(const InterestPoint& center, const Kernel& half,
                 std::vector<std::int64_t>& histogram) const;

  std::size_t cell_count() const { return cells_.size(); }

private:
  struct Cell {
    std::array<double, 3> lo;
    std::array<double, 3> hi;
    std::size_t first = 0;  // into order_
    std::size_t count = 0;
    std::vector<std::pair<WordIndex, std::int64_t>> label_counts;
  };

  std::array<std::int64_t, 3> cell_of(double x, double y, double t) const;
  static std::uint64_t key(const std::array<std::int64_t, 3>& c);

  const LabeledVideo& video_;
  std::array<double, 3> origin_{};
  std::array<double, 3> size_{};
  std::vector<std::size_t> order_;
  std::vector<Cell> cells_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

}  // namespace cooc
