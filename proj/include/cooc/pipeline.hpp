#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cooc/characterize.hpp"
#include "cooc/classify.hpp"
#include "cooc/config.hpp"
#include "cooc/correlogram.hpp"
#include "cooc/datamodel.hpp"
#include "cooc/vocabulary.hpp"

namespace cooc {

/// Everything learned from one training set.
struct FittedPipeline {
  PipelineConfig config;
  std::vector<std::string> class_names;
  Vocabulary base_vocabulary;
  Vocabulary vocabulary;  // reduced; used for labeling
  KernelSet kernels;
  std::optional<Correlations> correlations;
  std::optional<PcaModel> pca;
  ChannelConfig channels;  // with fitted normalizers
  SvmModel svm;
  std::vector<ChannelFeatures> training_features;
  std::vector<std::string> training_truth;
  std::vector<std::string> training_predictions;

  double training_accuracy() const;
};

/// Vocabulary, reduction, labeling, correlograms, channel models,
/// normalizers and SVM, all fitted on `train`. Model arrays are rounded to
/// 32-bit floats before the training predictions are made so a saved bundle
/// reproduces them exactly.
FittedPipeline fit_pipeline(const Dataset& train, const PipelineConfig& config,
                            unsigned threads = 1);

/// Labels `data` with the fitted vocabulary and computes active channels.
std::vector<ChannelFeatures> featurize(const FittedPipeline& model,
                                       const Dataset& data,
                                       unsigned threads = 1);

std::vector<std::string> predict(const FittedPipeline& model,
                                 const Dataset& data, unsigned threads = 1);

/// Rounds every learned array through float.
void round_to_float32(FittedPipeline& model);

/// Test-index sets per split, in ascending index order.
std::vector<std::vector<std::size_t>> split_test_sets(const Dataset& data,
                                                      const SplitConfig& split,
                                                      std::uint64_t seed);

struct CvReport {
  EvalReport pooled;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

/// Fits the full pipeline on each training side and scores the held-out
/// side. Throws DataError when a class is missing from a training side.
CvReport cross_validate(const Dataset& data, const PipelineConfig& config,
                        unsigned threads = 1);

/// Accuracy of a bovw-only pipeline at every sweep size under the
/// configured split, scored by the vocabulary trade-off factor.
TradeoffSweep run_sweep(const Dataset& data, const PipelineConfig& config,
                        unsigned threads = 1);

/// Trade-off factors for the injected (size, rate) pairs.
TradeoffSweep replay_sweep(const PipelineConfig& config);

}  // namespace cooc
