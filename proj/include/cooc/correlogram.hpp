#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cooc/datamodel.hpp"

namespace cooc {

/// Axis-aligned box of half-extents around a center point. A point q is
/// inside the box around p when |q - p| <= half on every axis.
struct Kernel {
  std::int64_t half_x = 0;
  std::int64_t half_y = 0;
  std::int64_t half_t = 0;

  friend bool operator==(const Kernel&, const Kernel&) = default;
};

/// Nested kernels, strictly increasing on every axis.
class KernelSet {
public:
  KernelSet() = default;
  /// Throws ConfigError unless non-empty, positive and strictly increasing.
  explicit KernelSet(std::vector<Kernel> kernels);

  std::size_t size() const { return kernels_.size(); }
  const Kernel& operator[](std::size_t r) const { return kernels_[r]; }
  const std::vector<Kernel>& kernels() const { return kernels_; }

  friend bool operator==(const KernelSet&, const KernelSet&) = default;

private:
  std::vector<Kernel> kernels_;
};

struct KernelSchedule {
  std::size_t count = 5;
  std::int64_t spatial_lo = 2;
  std::int64_t spatial_hi = 40;
  std::int64_t temporal_lo = 2;
  std::int64_t temporal_hi = 60;
};

/// Log-spaced integer half-extents from lo to hi inclusive; a single kernel
/// uses the upper bounds. half_y follows half_x.
KernelSet make_kernels(const KernelSchedule& schedule = {});

/// Label-averaged local histograms of one video, stored as
/// values[(r * K + a) * K + b] for kernel r, center label a, neighbor b.
class Correlogram {
public:
  Correlogram() = default;
  Correlogram(std::string video_id, std::size_t k_star, std::size_t kernels);

  const std::string& video_id() const { return video_id_; }
  std::size_t k_star() const { return k_star_; }
  std::size_t kernel_count() const { return kernel_count_; }

  double value(std::size_t r, std::size_t a, std::size_t b) const {
    return values_[(r * k_star_ + a) * k_star_ + b];
  }
  double& value(std::size_t r, std::size_t a, std::size_t b) {
    return values_[(r * k_star_ + a) * k_star_ + b];
  }
  const std::vector<double>& values() const { return values_; }

  std::vector<std::int64_t>& label_populations() { return populations_; }
  const std::vector<std::int64_t>& label_populations() const {
    return populations_;
  }

  /// Flat vector with index (a * K + b) * J + r.
  std::vector<double> vectorize() const;

  friend bool operator==(const Correlogram&, const Correlogram&) = default;

private:
  std::string video_id_;
  std::size_t k_star_ = 0;
  std::size_t kernel_count_ = 0;
  std::vector<double> values_;
  std::vector<std::int64_t> populations_;
};

/// Per-label neighbor counts inside `kernel` around point `center`,
/// excluding the center itself.
std::vector<std::int64_t> local_histogram(const LabeledVideo& video,
                                          std::size_t center,
                                          const Kernel& kernel,
                                          std::size_t k_star);

/// Correlogram computed with a uniform-grid range counter.
Correlogram correlogram(const LabeledVideo& video, const KernelSet& kernels,
                        std::size_t k_star);

/// Same contract as correlogram(), by direct O(n^2 J) enumeration.
Correlogram brute_force_correlogram(const LabeledVideo& video,
                                    const KernelSet& kernels,
                                    std::size_t k_star);

std::vector<Correlogram> correlograms(const Dataset& labeled,
                                      const KernelSet& kernels,
                                      std::size_t k_star,
                                      unsigned threads = 1);

struct CorrelogramElement {
  std::size_t center_label = 0;
  std::size_t neighbor_label = 0;
  std::vector<double> profile;  // one value per kernel
  std::string video_id;
};

/// K*^2 elements, center label major.
std::vector<CorrelogramElement> elements(const Correlogram& cg);

}  // namespace cooc
