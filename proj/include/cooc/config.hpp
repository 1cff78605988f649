#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cooc/classify.hpp"
#include "cooc/correlogram.hpp"
#include "cooc/vocabulary.hpp"

namespace cooc {

struct SplitConfig {
  enum class Kind { folds, grouped, fixed };
  Kind kind = Kind::folds;
  std::size_t folds = 5;
  // Groups held out for testing when kind == fixed.
  std::vector<std::string> test_groups;
};

/// Every knob of the pipeline. Parsed from a JSON document; omitted fields
/// take the defaults below.
struct PipelineConfig {
  std::uint64_t seed = 0;

  std::size_t vocabulary_k = kDefaultVocabularySize;
  std::size_t vocabulary_sample = kDefaultVocabularySample;
  KMeansOptions kmeans;

  // Reduced vocabulary size; unset keeps the full vocabulary.
  std::optional<std::size_t> reduction_target;
  std::vector<std::size_t> sweep_sizes;

  KernelSchedule kernels;
  std::size_t correlations = kDefaultCorrelationCount;
  // Unset means min(100, n_train - 1).
  std::optional<std::size_t> pca_components;

  ChannelConfig channels = ChannelConfig::with_channels({Channel::bovw});
  SvmOptions svm;
  // When non-empty, C is chosen from this grid by inner cross-validation.
  std::vector<double> c_grid;

  SplitConfig split;

  // Sweep replay: (size, rate percent) pairs scored without training.
  std::size_t replay_orig_size = 0;
  std::vector<std::pair<std::size_t, double>> replay_rates;

  bool uses(Channel c) const;
  bool needs_correlograms() const;
};

/// Throws ConfigError naming the offending field.
PipelineConfig parse_config(const std::string& json_text);

/// Resolved configuration with every default spelled out.
std::string config_to_json(const PipelineConfig& config);

/// Data-independent checks.
void validate_config(const PipelineConfig& config);

/// Checks that need the training-set size and point count. Throws
/// ConfigError.
void validate_config_for_data(const PipelineConfig& config,
                              std::size_t n_train, std::size_t total_points);

}  // namespace cooc
