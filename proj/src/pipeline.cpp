#include "cooc/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cooc/error.hpp"
#include "cooc/parallel.hpp"

namespace cooc {

namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(stage) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(stage) + ": " + e.what());
  }
}

void require_classes(const Dataset& data, const char* what) {
  for (const auto& v : data.videos())
    if (v.action_class.empty())
      throw DataError(std::string(what) + " video '" + v.video_id +
                      "' has no action class");
}

std::vector<ChannelFeatures> features_of(const FittedPipeline& model,
                                         const Dataset& labeled,
                                         const std::vector<Correlogram>& cgs,
                                         unsigned threads) {
  const auto k_star = model.vocabulary.size();
  std::vector<ChannelFeatures> out(labeled.size());
  parallel_for(labeled.size(), threads, [&](std::size_t i) {
    const auto& video = labeled.videos()[i];
    auto& f = out[i];
    f.video_id = video.video_id;
    for (const auto& spec : model.channels.channels) {
      switch (spec.channel) {
        case Channel::bovw: f.channels[spec.channel] = bovw(video, k_star); break;
        case Channel::boc: f.channels[spec.channel] = boc(cgs[i], *model.correlations); break;
        case Channel::hara: f.channels[spec.channel] = haralick_vector(cgs[i]); break;
        case Channel::pcacooc: f.channels[spec.channel] = pca_cooc(cgs[i], *model.pca); break;
      }
    }
  });
  return out;
}

std::vector<int> class_ids(const std::vector<std::string>& names,
                           const std::vector<std::string>& truth) {
  std::vector<int> ids;
  ids.reserve(truth.size());
  for (const auto& t : truth) {
    const auto it = std::lower_bound(names.begin(), names.end(), t);
    if (it == names.end() || *it != t)
      throw DataError("class '" + t + "' unknown to the model");
    ids.push_back(int(it - names.begin()));
  }
  return ids;
}

std::vector<ChannelFeatures> pick(const std::vector<ChannelFeatures>& all,
                                  const std::vector<std::size_t>& idx) {
  std::vector<ChannelFeatures> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

// Inner stratified CV over a fixed feature set; ties keep the smaller C.
double select_c(const std::vector<ChannelFeatures>& features,
                const std::vector<int>& labels,
                const std::vector<std::string>& truth,
                const PipelineConfig& config, unsigned threads) {
  std::map<std::string, std::size_t> support;
  for (const auto& t : truth) ++support[t];
  std::size_t smallest = truth.size();
  for (const auto& [_, n] : support) smallest = std::min(smallest, n);
  const std::size_t folds = std::min<std::size_t>(3, smallest);
  if (folds < 2) return config.svm.c;

  const auto fold_of = stratified_folds(truth, folds, config.seed + 3);
  std::vector<double> grid = config.c_grid;
  std::sort(grid.begin(), grid.end());
  double best_c = grid.front(), best_acc = -1.0;
  for (double c : grid) {
    std::size_t correct = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> tr, te;
      for (std::size_t i = 0; i < truth.size(); ++i)
        (fold_of[i] == f ? te : tr).push_back(i);
      const auto train_feat = pick(features, tr);
      std::vector<int> train_labels;
      for (auto i : tr) train_labels.push_back(labels[i]);
      SvmOptions opts = config.svm;
      opts.c = c;
      const auto svm = svm_train(gram_matrix(train_feat, config.channels, threads),
                                 train_labels, opts);
      const auto pred = svm_predict(
          svm, kernel_rows(pick(features, te), train_feat, config.channels, threads));
      for (std::size_t q = 0; q < te.size(); ++q)
        if (pred[q] == labels[te[q]]) ++correct;
    }
    const double acc = double(correct) / double(truth.size());
    if (acc > best_acc) {
      best_acc = acc;
      best_c = c;
    }
  }
  return best_c;
}

void round_vec(std::vector<double>& v) {
  for (auto& x : v) x = double(float(x));
}

template <typename M>
void round_mat(M& m) {
  m = m.template cast<float>().template cast<double>();
}

std::string split_description(const SplitConfig& split, std::uint64_t seed) {
  switch (split.kind) {
    case SplitConfig::Kind::folds:
      return std::to_string(split.folds) + "-fold stratified, seed " +
             std::to_string(seed);
    case SplitConfig::Kind::grouped:
      return std::to_string(split.folds) + "-fold grouped, seed " +
             std::to_string(seed);
    case SplitConfig::Kind::fixed: {
      std::string s = "fixed test groups";
      for (const auto& g : split.test_groups) s += " " + g;
      return s;
    }
  }
  return {};
}

}  // namespace

double FittedPipeline::training_accuracy() const {
  return evaluate(training_predictions, training_truth).overall_percent;
}

FittedPipeline fit_pipeline(const Dataset& train, const PipelineConfig& config,
                            unsigned threads) {
  validate_config(config);
  require_classes(train, "training");
  validate_config_for_data(config, train.size(), train.total_points());
  if (train.class_set().size() < 2)
    throw DataError("training set has a single class '" + train.class_set().front() +
                    "'");

  FittedPipeline model;
  model.config = config;
  model.class_names = train.class_set();
  model.kernels = make_kernels(config.kernels);

  KMeansOptions km = config.kmeans;
  km.threads = threads;
  model.base_vocabulary = in_stage("vocabulary", [&] {
    return build_vocabulary(train, config.vocabulary_k, config.vocabulary_sample,
                            config.seed, km);
  });
  Dataset labeled = label_dataset(train, model.base_vocabulary, threads);

  model.vocabulary = model.base_vocabulary;
  if (config.reduction_target && *config.reduction_target < config.vocabulary_k) {
    model.vocabulary = in_stage("reduction", [&] {
      const auto counts = class_word_counts(labeled, config.vocabulary_k);
      return reduce_vocabulary(model.base_vocabulary, counts,
                               *config.reduction_target)
          .vocabulary;
    });
    labeled = label_dataset(train, model.vocabulary, threads);
  }
  const auto k_star = model.vocabulary.size();

  std::vector<Correlogram> cgs;
  if (config.needs_correlograms())
    cgs = in_stage("correlograms", [&] {
      return correlograms(labeled, model.kernels, k_star, threads);
    });

  if (config.uses(Channel::boc))
    model.correlations = in_stage("correlations", [&] {
      std::vector<CorrelogramElement> all;
      for (const auto& cg : cgs) {
        auto e = elements(cg);
        all.insert(all.end(), std::make_move_iterator(e.begin()),
                   std::make_move_iterator(e.end()));
      }
      return fit_correlations(all, config.correlations, config.seed + 2, threads);
    });

  if (config.uses(Channel::pcacooc))
    model.pca = in_stage("pca", [&] {
      const auto dim = Eigen::Index(k_star * k_star * model.kernels.size());
      RowMatrix data(Eigen::Index(cgs.size()), dim);
      for (std::size_t i = 0; i < cgs.size(); ++i) {
        const auto v = cgs[i].vectorize();
        data.row(Eigen::Index(i)) = Eigen::Map<const Vector>(v.data(), dim);
      }
      // The default also respects the input dimension; an explicit S does not.
      const auto s = config.pca_components.value_or(
          std::min(default_pca_components(train.size()), std::size_t(dim)));
      return fit_pca(data, s);
    });

  model.channels = config.channels;
  model.training_features = features_of(model, labeled, cgs, threads);
  model.channels = in_stage("normalizers", [&] {
    return fit_normalizers(model.training_features, config.channels);
  });

  for (const auto& v : train.videos()) model.training_truth.push_back(v.action_class);
  const auto labels = class_ids(model.class_names, model.training_truth);

  model.svm = in_stage("svm", [&] {
    SvmOptions opts = config.svm;
    if (!config.c_grid.empty()) {
      PipelineConfig inner = config;
      inner.channels = model.channels;
      opts.c = select_c(model.training_features, labels, model.training_truth,
                        inner, threads);
    }
    return svm_train(gram_matrix(model.training_features, model.channels, threads),
                     labels, opts);
  });

  round_to_float32(model);
  model.training_predictions = predict(model, train, threads);
  return model;
}

std::vector<ChannelFeatures> featurize(const FittedPipeline& model,
                                       const Dataset& data, unsigned threads) {
  if (data.total_points() > 0 && data.descriptor_len() != model.vocabulary.dim())
    throw DataError("descriptor length " + std::to_string(data.descriptor_len()) +
                    " does not match the model's " +
                    std::to_string(model.vocabulary.dim()));
  const auto labeled = label_dataset(data, model.vocabulary, threads);
  std::vector<Correlogram> cgs;
  if (model.config.needs_correlograms())
    cgs = correlograms(labeled, model.kernels, model.vocabulary.size(), threads);
  return features_of(model, labeled, cgs, threads);
}

std::vector<std::string> predict(const FittedPipeline& model, const Dataset& data,
                                 unsigned threads) {
  const auto features = featurize(model, data, threads);
  const auto ids = svm_predict(
      model.svm,
      kernel_rows(features, model.training_features, model.channels, threads));
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(model.class_names[std::size_t(id)]);
  return out;
}

void round_to_float32(FittedPipeline& model) {
  round_mat(model.base_vocabulary.centroids);
  round_mat(model.vocabulary.centroids);
  if (model.correlations) round_mat(model.correlations->centers);
  if (model.pca) {
    round_mat(model.pca->mean);
    round_mat(model.pca->basis);
    round_mat(model.pca->explained_variance);
  }
  for (auto& spec : model.channels.channels) spec.omega = double(float(spec.omega));
  for (auto& pm : model.svm.pairs) {
    round_vec(pm.coef);
    pm.rho = double(float(pm.rho));
    pm.c = double(float(pm.c));
  }
  for (auto& f : model.training_features)
    for (auto& [_, v] : f.channels) round_vec(v);
}

std::vector<std::vector<std::size_t>> split_test_sets(const Dataset& data,
                                                      const SplitConfig& split,
                                                      std::uint64_t seed) {
  std::vector<std::size_t> fold_of;
  std::size_t folds = split.folds;
  switch (split.kind) {
    case SplitConfig::Kind::folds: {
      require_classes(data, "cross-validation");
      std::vector<std::string> classes;
      for (const auto& v : data.videos()) classes.push_back(v.action_class);
      fold_of = stratified_folds(classes, folds, seed);
      break;
    }
    case SplitConfig::Kind::grouped: {
      std::vector<std::string> groups;
      for (const auto& v : data.videos()) groups.push_back(v.group.value_or(""));
      fold_of = grouped_folds(groups, folds, seed);
      break;
    }
    case SplitConfig::Kind::fixed: {
      const std::set<std::string> test(split.test_groups.begin(),
                                       split.test_groups.end());
      std::vector<std::size_t> held;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& g = data.videos()[i].group;
        if (!g) throw ConfigError("fixed split requires a group on every video");
        if (test.count(*g)) held.push_back(i);
      }
      if (held.empty()) throw ConfigError("fixed split: no video in the test groups");
      if (held.size() == data.size())
        throw ConfigError("fixed split: every video is in the test groups");
      return {held};
    }
  }
  std::vector<std::vector<std::size_t>> sets(folds);
  for (std::size_t i = 0; i < fold_of.size(); ++i) sets[fold_of[i]].push_back(i);
  sets.erase(std::remove_if(sets.begin(), sets.end(),
                            [](const auto& s) { return s.empty(); }),
             sets.end());
  return sets;
}

namespace {

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& held) {
  std::vector<std::size_t> out;
  std::size_t h = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (h < held.size() && held[h] == i) { ++h; continue; }
    out.push_back(i);
  }
  return out;
}

void check_training_side(const Dataset& all, const Dataset& train, std::size_t fold) {
  for (const auto& c : all.class_set())
    if (!std::binary_search(train.class_set().begin(), train.class_set().end(), c))
      throw DataError("fold " + std::to_string(fold + 1) + ": class '" + c +
                      "' is absent from the training side");
}

}  // namespace

CvReport cross_validate(const Dataset& data, const PipelineConfig& config,
                        unsigned threads) {
  validate_config(config);
  require_classes(data, "cross-validation");
  const auto sets = split_test_sets(data, config.split, config.seed);
  CvReport report;
  std::vector<std::string> preds, truths;
  for (std::size_t f = 0; f < sets.size(); ++f) {
    const auto train = data.subset(complement(data.size(), sets[f]));
    const auto test = data.subset(sets[f]);
    check_training_side(data, train, f);
    const auto model = fit_pipeline(train, config, threads);
    const auto p = predict(model, test, threads);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      preds.push_back(p[i]);
      truths.push_back(test.videos()[i].action_class);
      if (p[i] == truths.back()) ++correct;
    }
    report.fold_accuracy.push_back(100.0 * double(correct) / double(p.size()));
  }
  report.pooled = evaluate(preds, truths, split_description(config.split, config.seed));
  double sum = 0.0;
  for (double a : report.fold_accuracy) sum += a;
  report.mean_accuracy = sum / double(report.fold_accuracy.size());
  return report;
}

TradeoffSweep run_sweep(const Dataset& data, const PipelineConfig& config,
                        unsigned threads) {
  validate_config(config);
  require_classes(data, "sweep");
  if (config.sweep_sizes.empty()) throw ConfigError("reduction.sweep is empty");
  const auto sets = split_test_sets(data, config.split, config.seed);

  struct Fold {
    Dataset train, test;
    Vocabulary base;
    CountMatrix counts;
  };
  std::vector<Fold> folds;
  for (std::size_t f = 0; f < sets.size(); ++f) {
    Fold fold;
    fold.train = data.subset(complement(data.size(), sets[f]));
    fold.test = data.subset(sets[f]);
    check_training_side(data, fold.train, f);
    validate_config_for_data(config, fold.train.size(), fold.train.total_points());
    KMeansOptions km = config.kmeans;
    km.threads = threads;
    fold.base = build_vocabulary(fold.train, config.vocabulary_k,
                                 config.vocabulary_sample, config.seed, km);
    fold.counts = class_word_counts(label_dataset(fold.train, fold.base, threads),
                                    config.vocabulary_k);
    folds.push_back(std::move(fold));
  }

  return sweep_tradeoff(config.sweep_sizes, config.vocabulary_k, [&](std::size_t size) {
    std::size_t correct = 0, total = 0;
    for (const auto& fold : folds) {
      const auto vocab =
          size < config.vocabulary_k
              ? reduce_vocabulary(fold.base, fold.counts, size).vocabulary
              : fold.base;
      auto hist = [&](const Dataset& d) {
        const auto labeled = label_dataset(d, vocab, threads);
        std::vector<ChannelFeatures> out(labeled.size());
        for (std::size_t i = 0; i < labeled.size(); ++i) {
          out[i].video_id = labeled.videos()[i].video_id;
          out[i].channels[Channel::bovw] = bovw(labeled.videos()[i], vocab.size());
        }
        return out;
      };
      const auto train_f = hist(fold.train);
      const auto test_f = hist(fold.test);
      const auto channels = fit_normalizers(
          train_f, ChannelConfig::with_channels({Channel::bovw}));
      std::vector<std::string> truth;
      for (const auto& v : fold.train.videos()) truth.push_back(v.action_class);
      const auto names = fold.train.class_set();
      const auto svm = svm_train(gram_matrix(train_f, channels, threads),
                                 class_ids(names, truth), config.svm);
      const auto pred =
          svm_predict(svm, kernel_rows(test_f, train_f, channels, threads));
      for (std::size_t q = 0; q < pred.size(); ++q) {
        if (names[std::size_t(pred[q])] == fold.test.videos()[q].action_class)
          ++correct;
        ++total;
      }
    }
    return 100.0 * double(correct) / double(total);
  });
}

TradeoffSweep replay_sweep(const PipelineConfig& config) {
  if (config.replay_rates.empty()) throw ConfigError("replay.rates is empty");
  if (config.replay_orig_size == 0) throw ConfigError("replay.orig_size must be set");
  std::map<std::size_t, double> rate;
  std::vector<std::size_t> sizes;
  for (const auto& [size, r] : config.replay_rates) {
    if (!rate.emplace(size, r).second)
      throw ConfigError("replay size " + std::to_string(size) + " listed twice");
    sizes.push_back(size);
  }
  return sweep_tradeoff(sizes, config.replay_orig_size,
                        [&](std::size_t size) { return rate.at(size); });
}

}  // namespace cooc
