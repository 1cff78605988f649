#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cooc/correlogram.hpp"
#include "cooc/datamodel.hpp"
#include "cooc/matrix.hpp"

namespace cooc {

enum class Channel { bovw, boc, hara, pcacooc };

inline constexpr std::array<Channel, 4> kAllChannels{
    Channel::bovw, Channel::boc, Channel::hara, Channel::pcacooc};

std::string_view channel_name(Channel c);
/// Throws ConfigError for unknown names.
Channel parse_channel(std::string_view name);

struct ChannelFeatures {
  std::string video_id;
  std::map<Channel, std::vector<double>> channels;

  /// Throws DataError when the channel is absent.
  const std::vector<double>& at(Channel c) const;
};

/// L1-normalized label histogram; zero vector for a video without points.
std::vector<double> bovw(const LabeledVideo& video, std::size_t k_star);

// --- bag of correlations ---------------------------------------------------

struct Correlations {
  RowMatrix centers;  // Q x J

  std::size_t size() const { return static_cast<std::size_t>(centers.rows()); }
  std::size_t kernel_count() const {
    return static_cast<std::size_t>(centers.cols());
  }
};

inline constexpr std::size_t kDefaultCorrelationCount = 400;

/// Clusters every element profile into q centers.
Correlations fit_correlations(const std::vector<CorrelogramElement>& elements,
                              std::size_t q, std::uint64_t seed,
                              unsigned threads = 1);

/// Nearest-center vote per element, L1-normalized over Q bins.
std::vector<double> boc(const Correlogram& cg, const Correlations& u);

// --- Haralick texture --------------------------------------------------------

inline constexpr std::size_t kHaralickCount = 13;

/// The 13 Haralick measures of a K x K nonnegative matrix (row-major),
/// normalized to a distribution first. Entropies in bits.
std::array<double, kHaralickCount> haralick_slice(const std::vector<double>& m,
                                                  std::size_t k);

/// haralick_slice of every kernel slice, concatenated in kernel order.
std::vector<double> haralick_vector(const Correlogram& cg);

// --- PCA co-occurrence ---------------------------------------------------------

struct PcaModel {
  Vector mean;
  RowMatrix basis;  // S x D, orthonormal rows
  Vector explained_variance;

  std::size_t components() const {
    return static_cast<std::size_t>(basis.rows());
  }
  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
};

inline constexpr std::size_t kDefaultPcaComponents = 100;

/// min(100, n_train - 1).
std::size_t default_pca_components(std::size_t n_train);

/// Rows of `data` are training vectors. Throws ConfigError unless
/// 1 <= s <= rows - 1.
PcaModel fit_pca(const RowMatrix& data, std::size_t s);

std::vector<double> pca_project(const PcaModel& model,
                                const std::vector<double>& v);

/// Projection of the vectorized correlogram.
std::vector<double> pca_cooc(const Correlogram& cg, const PcaModel& model);

}  // namespace cooc
