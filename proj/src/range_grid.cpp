#include "cooc/range_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cooc/error.hpp"

namespace cooc {

namespace {

constexpr std::int64_t kAxisBits = 21;
constexpr std::int64_t kAxisLimit = std::int64_t{1} << kAxisBits;

double coord(const InterestPoint& p, int axis) {
  return axis == 0 ? p.x : axis == 1 ? p.y : p.t;
}

}  // namespace

RangeGrid::RangeGrid(const LabeledVideo& video, const Kernel& cell,
                     std::size_t k_star)
    : video_(video) {
  size_ = {double(std::max<std::int64_t>(1, cell.half_x)),
           double(std::max<std::int64_t>(1, cell.half_y)),
           double(std::max<std::int64_t>(1, cell.half_t))};
  const auto& pts = video.points;
  if (pts.empty()) return;
  for (int a = 0; a < 3; ++a) {
    origin_[a] = coord(pts[0], a);
    for (const auto& p : pts) origin_[a] = std::min(origin_[a], coord(p, a));
  }

  std::vector<std::uint64_t> keys(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = cell_of(pts[i].x, pts[i].y, pts[i].t);
    for (auto v : c)
      if (v < 0 || v >= kAxisLimit)
        throw DataError("video '" + video.video_id + "' is too large for the range grid");
    keys[i] = key(c);
  }
  order_.resize(pts.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return keys[a] != keys[b] ? keys[a] < keys[b] : a < b;
  });

  std::vector<std::int64_t> tally(k_star, 0);
  for (std::size_t s = 0; s < order_.size();) {
    Cell cellv;
    cellv.first = s;
    const auto k = keys[order_[s]];
    cellv.lo = {std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    cellv.hi = {-cellv.lo[0], -cellv.lo[1], -cellv.lo[2]};
    std::size_t e = s;
    for (; e < order_.size() && keys[order_[e]] == k; ++e) {
      const auto& p = pts[order_[e]];
      for (int a = 0; a < 3; ++a) {
        cellv.lo[a] = std::min(cellv.lo[a], coord(p, a));
        cellv.hi[a] = std::max(cellv.hi[a], coord(p, a));
      }
      ++tally[video.labels[order_[e]]];
    }
    cellv.count = e - s;
    for (std::size_t l = 0; l < k_star; ++l) {
      if (tally[l] == 0) continue;
      cellv.label_counts.emplace_back(static_cast<WordIndex>(l), tally[l]);
      tally[l] = 0;
    }
    index_.emplace(k, cells_.size());
    cells_.push_back(std::move(cellv));
    s = e;
  }
}

std::array<std::int64_t, 3> RangeGrid::cell_of(double x, double y, double t) const {
  return {static_cast<std::int64_t>(std::floor((x - origin_[0]) / size_[0])),
          static_cast<std::int64_t>(std::floor((y - origin_[1]) / size_[1])),
          static_cast<std::int64_t>(std::floor((t - origin_[2]) / size_[2]))};
}

std::uint64_t RangeGrid::key(const std::array<std::int64_t, 3>& c) {
  return (std::uint64_t(c[0]) << (2 * kAxisBits)) |
         (std::uint64_t(c[1]) << kAxisBits) | std::uint64_t(c[2]);
}

void RangeGrid::count_box(const InterestPoint& center, const Kernel& half,
                          std::vector<std::int64_t>& histogram) const {
  if (cells_.empty()) return;
  const std::array<double, 3> c{center.x, center.y, center.t};
  const std::array<double, 3> h{double(half.half_x), double(half.half_y),
                                double(half.half_t)};
  const auto lo = cell_of(c[0] - h[0], c[1] - h[1], c[2] - h[2]);
  const auto hi = cell_of(c[0] + h[0], c[1] + h[1], c[2] + h[2]);
  // One extra cell each way absorbs rounding in the cell computation; the
  // bounding-box tests below decide membership exactly.
  std::array<std::int64_t, 3> from{}, to{};
  for (int a = 0; a < 3; ++a) {
    from[a] = std::max<std::int64_t>(0, lo[a] - 1);
    to[a] = std::min<std::int64_t>(kAxisLimit - 1, hi[a] + 1);
  }
  const auto& pts = video_.points;
  for (auto cx = from[0]; cx <= to[0]; ++cx)
    for (auto cy = from[1]; cy <= to[1]; ++cy)
      for (auto ct = from[2]; ct <= to[2]; ++ct) {
        const auto it = index_.find(key({cx, cy, ct}));
        if (it == index_.end()) continue;
        const Cell& cell = cells_[it->second];
        bool disjoint = false, inside = true;
        for (int a = 0; a < 3; ++a) {
          const double dlo = cell.lo[a] - c[a];
          const double dhi = cell.hi[a] - c[a];
          if (dhi < -h[a] || dlo > h[a]) disjoint = true;
          if (!(dlo >= -h[a] && dhi <= h[a])) inside = false;
        }
        if (disjoint) continue;
        if (inside) {
          for (const auto& [label, n] : cell.label_counts) histogram[label] += n;
          continue;
        }
        for (std::size_t s = cell.first; s < cell.first + cell.count; ++s) {
          const auto& q = pts[order_[s]];
          if (std::abs(q.x - c[0]) <= h[0] && std::abs(q.y - c[1]) <= h[1] &&
              std::abs(q.t - c[2]) <= h[2])
            ++histogram[video_.labels[order_[s]]];
        }
      }
}

}  // namespace cooc
