#include "cooc/correlogram.hpp"

#include <cmath>
#include <sstream>

#include "cooc/error.hpp"
#include "cooc/parallel.hpp"
#include "cooc/range_grid.hpp"

namespace cooc {

KernelSet::KernelSet(std::vector<Kernel> kernels) : kernels_(std::move(kernels)) {
  if (kernels_.empty()) throw ConfigError("kernel set is empty");
  for (std::size_t r = 0; r < kernels_.size(); ++r) {
    const auto& k = kernels_[r];
    if (k.half_x < 1 || k.half_y < 1 || k.half_t < 1)
      throw ConfigError("kernel half-extents must be at least 1");
    if (r > 0) {
      const auto& p = kernels_[r - 1];
      if (!(k.half_x > p.half_x && k.half_y > p.half_y && k.half_t > p.half_t)) {
        std::ostringstream msg;
        msg << "kernel " << r + 1 << " (" << k.half_x << "," << k.half_y << ","
            << k.half_t << ") is not strictly larger than kernel " << r << " ("
            << p.half_x << "," << p.half_y << "," << p.half_t << ")";
        throw ConfigError(msg.str());
      }
    }
  }
}

KernelSet make_kernels(const KernelSchedule& s) {
  if (s.count < 1) throw ConfigError("kernel count must be at least 1");
  if (s.spatial_lo < 1 || s.temporal_lo < 1)
    throw ConfigError("kernel lower bounds must be at least 1");
  if (s.spatial_hi < s.spatial_lo || s.temporal_hi < s.temporal_lo)
    throw ConfigError("kernel upper bound below lower bound");
  if (s.count == 1)
    return KernelSet({{s.spatial_hi, s.spatial_hi, s.temporal_hi}});

  auto schedule = [&](std::int64_t lo, std::int64_t hi, std::size_t i) {
    if (i == 0) return lo;
    if (i + 1 == s.count) return hi;
    const double f = double(i) / double(s.count - 1);
    return static_cast<std::int64_t>(
        std::llround(double(lo) * std::pow(double(hi) / double(lo), f)));
  };
  std::vector<Kernel> ks;
  for (std::size_t i = 0; i < s.count; ++i) {
    const auto sp = schedule(s.spatial_lo, s.spatial_hi, i);
    ks.push_back({sp, sp, schedule(s.temporal_lo, s.temporal_hi, i)});
  }
  return KernelSet(std::move(ks));
}

Correlogram::Correlogram(std::string video_id, std::size_t k_star,
                         std::size_t kernels)
    : video_id_(std::move(video_id)), k_star_(k_star), kernel_count_(kernels),
      values_(kernels * k_star * k_star, 0.0), populations_(k_star, 0) {}

std::vector<double> Correlogram::vectorize() const {
  std::vector<double> out(values_.size());
  for (std::size_t a = 0; a < k_star_; ++a)
    for (std::size_t b = 0; b < k_star_; ++b)
      for (std::size_t r = 0; r < kernel_count_; ++r)
        out[(a * k_star_ + b) * kernel_count_ + r] = value(r, a, b);
  return out;
}

namespace {

void check_labels(const LabeledVideo& video, std::size_t k_star) {
  if (!video.labeled())
    throw DataError("video '" + video.video_id + "' is not labeled");
  for (auto l : video.labels)
    if (l >= k_star)
      throw DataError("video '" + video.video_id + "' has label " +
                      std::to_string(l + 1) + " beyond K* = " +
                      std::to_string(k_star));
}

bool in_box(const InterestPoint& q, const InterestPoint& p, const Kernel& k) {
  return std::abs(q.x - p.x) <= double(k.half_x) &&
         std::abs(q.y - p.y) <= double(k.half_y) &&
         std::abs(q.t - p.t) <= double(k.half_t);
}

// Divides the integer neighbor sums by the center-label populations.
Correlogram finish(const LabeledVideo& video, const KernelSet& kernels,
                   std::size_t k_star, const std::vector<std::int64_t>& sums) {
  Correlogram cg(video.video_id, k_star, kernels.size());
  for (auto l : video.labels) ++cg.label_populations()[l];
  for (std::size_t r = 0; r < kernels.size(); ++r)
    for (std::size_t a = 0; a < k_star; ++a) {
      const auto pop = cg.label_populations()[a];
      if (pop == 0) continue;
      for (std::size_t b = 0; b < k_star; ++b)
        cg.value(r, a, b) =
            double(sums[(r * k_star + a) * k_star + b]) / double(pop);
    }
  return cg;
}

}  // namespace

std::vector<std::int64_t> local_histogram(const LabeledVideo& video,
                                          std::size_t center,
                                          const Kernel& kernel,
                                          std::size_t k_star) {
  check_labels(video, k_star);
  if (center >= video.points.size())
    throw ConfigError("center index out of range");
  std::vector<std::int64_t> h(k_star, 0);
  const auto& p = video.points[center];
  for (std::size_t q = 0; q < video.points.size(); ++q)
    if (q != center && in_box(video.points[q], p, kernel)) ++h[video.labels[q]];
  return h;
}

Correlogram correlogram(const LabeledVideo& video, const KernelSet& kernels,
                        std::size_t k_star) {
  check_labels(video, k_star);
  std::vector<std::int64_t> sums(kernels.size() * k_star * k_star, 0);
  std::vector<std::int64_t> hist(k_star);
  for (std::size_t r = 0; r < kernels.size(); ++r) {
    const RangeGrid grid(video, kernels[r], k_star);
    for (std::size_t i = 0; i < video.points.size(); ++i) {
      std::fill(hist.begin(), hist.end(), 0);
      grid.count_box(video.points[i], kernels[r], hist);
      const auto a = video.labels[i];
      --hist[a];  // the center itself
      auto* row = &sums[(r * k_star + a) * k_star];
      for (std::size_t b = 0; b < k_star; ++b) row[b] += hist[b];
    }
  }
  return finish(video, kernels, k_star, sums);
}

Correlogram brute_force_correlogram(const LabeledVideo& video,
                                    const KernelSet& kernels,
                                    std::size_t k_star) {
  check_labels(video, k_star);
  std::vector<std::int64_t> sums(kernels.size() * k_star * k_star, 0);
  const auto& pts = video.points;
  for (std::size_t r = 0; r < kernels.size(); ++r)
    for (std::size_t p = 0; p < pts.size(); ++p) {
      auto* row = &sums[(r * k_star + video.labels[p]) * k_star];
      for (std::size_t q = 0; q < pts.size(); ++q)
        if (q != p && in_box(pts[q], pts[p], kernels[r])) ++row[video.labels[q]];
    }
  return finish(video, kernels, k_star, sums);
}

std::vector<Correlogram> correlograms(const Dataset& labeled,
                                      const KernelSet& kernels,
                                      std::size_t k_star, unsigned threads) {
  std::vector<Correlogram> out(labeled.size());
  parallel_for(labeled.size(), threads, [&](std::size_t i) {
    out[i] = correlogram(labeled.videos()[i], kernels, k_star);
  });
  return out;
}

std::vector<CorrelogramElement> elements(const Correlogram& cg) {
  std::vector<CorrelogramElement> out;
  const auto k = cg.k_star();
  out.reserve(k * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      CorrelogramElement e;
      e.center_label = a;
      e.neighbor_label = b;
      e.video_id = cg.video_id();
      e.profile.resize(cg.kernel_count());
      for (std::size_t r = 0; r < cg.kernel_count(); ++r)
        e.profile[r] = cg.value(r, a, b);
      out.push_back(std::move(e));
    }
  return out;
}

}  // namespace cooc
