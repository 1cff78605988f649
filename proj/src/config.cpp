#include "cooc/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "cooc/error.hpp"

namespace cooc {

using nlohmann::json;

bool PipelineConfig::uses(Channel c) const {
  return std::any_of(channels.channels.begin(), channels.channels.end(),
                     [c](const ChannelSpec& s) { return s.channel == c; });
}

bool PipelineConfig::needs_correlograms() const {
  return uses(Channel::boc) || uses(Channel::hara) || uses(Channel::pcacooc);
}

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }))
      throw ConfigError("unknown config field '" + where + "." + key + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& into) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null())
    into = it->get<T>();
}

std::vector<ChannelSpec> parse_channels(const json& j) {
  std::vector<ChannelSpec> specs;
  std::set<Channel> seen;
  auto add = [&](Channel c, DistanceKind d) {
    if (!seen.insert(c).second)
      throw ConfigError("channel '" + std::string(channel_name(c)) + "' listed twice");
    specs.push_back({c, d, 1.0});
  };
  if (j.is_array()) {
    for (const auto& item : j) {
      const auto c = parse_channel(item.get<std::string>());
      add(c, default_distance(c));
    }
  } else if (j.is_object()) {
    for (const auto& [name, dist] : j.items())
      add(parse_channel(name), parse_distance(dist.get<std::string>()));
  } else {
    throw ConfigError("channels must be a list or an object");
  }
  // Canonical order keeps the kernel sum independent of spelling order.
  std::sort(specs.begin(), specs.end(), [](const auto& a, const auto& b) {
    return static_cast<int>(a.channel) < static_cast<int>(b.channel);
  });
  return specs;
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  try {
    const auto j = json::parse(text);
    reject_unknown(j, "config",
                   {"seed", "vocabulary", "reduction", "kernels", "correlations",
                    "pca", "channels", "svm", "split", "replay"});
    read(j, "seed", cfg.seed);
    if (auto it = j.find("vocabulary"); it != j.end()) {
      reject_unknown(*it, "vocabulary", {"k", "sample_size", "max_iters", "tol"});
      read(*it, "k", cfg.vocabulary_k);
      read(*it, "sample_size", cfg.vocabulary_sample);
      read(*it, "max_iters", cfg.kmeans.max_iters);
      read(*it, "tol", cfg.kmeans.tol);
    }
    if (auto it = j.find("reduction"); it != j.end()) {
      reject_unknown(*it, "reduction", {"target", "sweep"});
      if (auto t = it->find("target"); t != it->end() && !t->is_null())
        cfg.reduction_target = t->get<std::size_t>();
      read(*it, "sweep", cfg.sweep_sizes);
    }
    if (auto it = j.find("kernels"); it != j.end()) {
      reject_unknown(*it, "kernels", {"count", "spatial", "temporal"});
      read(*it, "count", cfg.kernels.count);
      std::vector<std::int64_t> sp{cfg.kernels.spatial_lo, cfg.kernels.spatial_hi};
      std::vector<std::int64_t> tp{cfg.kernels.temporal_lo, cfg.kernels.temporal_hi};
      read(*it, "spatial", sp);
      read(*it, "temporal", tp);
      if (sp.size() != 2 || tp.size() != 2)
        throw ConfigError("kernels.spatial and kernels.temporal take [lo, hi]");
      cfg.kernels.spatial_lo = sp[0];
      cfg.kernels.spatial_hi = sp[1];
      cfg.kernels.temporal_lo = tp[0];
      cfg.kernels.temporal_hi = tp[1];
    }
    if (auto it = j.find("correlations"); it != j.end()) {
      reject_unknown(*it, "correlations", {"count"});
      read(*it, "count", cfg.correlations);
    }
    if (auto it = j.find("pca"); it != j.end()) {
      reject_unknown(*it, "pca", {"components"});
      if (auto c = it->find("components"); c != it->end() && !c->is_null())
        cfg.pca_components = c->get<std::size_t>();
    }
    if (auto it = j.find("channels"); it != j.end())
      cfg.channels.channels = parse_channels(*it);
    if (auto it = j.find("svm"); it != j.end()) {
      reject_unknown(*it, "svm", {"c", "tol", "max_iter", "c_grid"});
      read(*it, "c", cfg.svm.c);
      read(*it, "tol", cfg.svm.tol);
      read(*it, "max_iter", cfg.svm.max_iter);
      read(*it, "c_grid", cfg.c_grid);
    }
    if (auto it = j.find("split"); it != j.end()) {
      reject_unknown(*it, "split", {"kind", "folds", "test_groups"});
      std::string kind = "folds";
      read(*it, "kind", kind);
      if (kind == "folds") cfg.split.kind = SplitConfig::Kind::folds;
      else if (kind == "grouped") cfg.split.kind = SplitConfig::Kind::grouped;
      else if (kind == "fixed") cfg.split.kind = SplitConfig::Kind::fixed;
      else throw ConfigError("split.kind must be folds, grouped or fixed");
      read(*it, "folds", cfg.split.folds);
      read(*it, "test_groups", cfg.split.test_groups);
    }
    if (auto it = j.find("replay"); it != j.end()) {
      reject_unknown(*it, "replay", {"orig_size", "rates"});
      read(*it, "orig_size", cfg.replay_orig_size);
      read(*it, "rates", cfg.replay_rates);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["vocabulary"] = {{"k", cfg.vocabulary_k},
                     {"sample_size", cfg.vocabulary_sample},
                     {"max_iters", cfg.kmeans.max_iters},
                     {"tol", cfg.kmeans.tol}};
  nlohmann::ordered_json red;
  red["target"] = cfg.reduction_target ? nlohmann::ordered_json(*cfg.reduction_target)
                                       : nlohmann::ordered_json(nullptr);
  red["sweep"] = cfg.sweep_sizes;
  j["reduction"] = red;
  j["kernels"] = {{"count", cfg.kernels.count},
                  {"spatial", {cfg.kernels.spatial_lo, cfg.kernels.spatial_hi}},
                  {"temporal", {cfg.kernels.temporal_lo, cfg.kernels.temporal_hi}}};
  j["correlations"] = {{"count", cfg.correlations}};
  nlohmann::ordered_json pca;
  pca["components"] = cfg.pca_components ? nlohmann::ordered_json(*cfg.pca_components)
                                         : nlohmann::ordered_json(nullptr);
  j["pca"] = pca;
  nlohmann::ordered_json ch = nlohmann::ordered_json::object();
  for (const auto& s : cfg.channels.channels)
    ch[std::string(channel_name(s.channel))] = std::string(distance_name(s.distance));
  j["channels"] = ch;
  j["svm"] = {{"c", cfg.svm.c},
              {"tol", cfg.svm.tol},
              {"max_iter", cfg.svm.max_iter},
              {"c_grid", cfg.c_grid}};
  const char* kind = cfg.split.kind == SplitConfig::Kind::folds     ? "folds"
                     : cfg.split.kind == SplitConfig::Kind::grouped ? "grouped"
                                                                    : "fixed";
  j["split"] = {{"kind", kind},
                {"folds", cfg.split.folds},
                {"test_groups", cfg.split.test_groups}};
  j["replay"] = {{"orig_size", cfg.replay_orig_size}, {"rates", cfg.replay_rates}};
  return j.dump(2);
}

void validate_config(const PipelineConfig& cfg) {
  if (cfg.vocabulary_k < 1) throw ConfigError("vocabulary.k must be at least 1");
  if (cfg.vocabulary_sample < cfg.vocabulary_k)
    throw ConfigError("vocabulary.sample_size must be at least vocabulary.k");
  if (cfg.kmeans.max_iters < 1) throw ConfigError("vocabulary.max_iters must be >= 1");
  if (!(cfg.kmeans.tol >= 0)) throw ConfigError("vocabulary.tol must be >= 0");
  if (cfg.reduction_target &&
      (*cfg.reduction_target < 1 || *cfg.reduction_target > cfg.vocabulary_k))
    throw ConfigError("reduction.target = " + std::to_string(*cfg.reduction_target) +
                      " must lie in [1, vocabulary.k = " + std::to_string(cfg.vocabulary_k) + "]");
  for (auto s : cfg.sweep_sizes)
    if (s < 1 || s > cfg.vocabulary_k)
      throw ConfigError("reduction.sweep size " + std::to_string(s) +
                        " must lie in [1, vocabulary.k = " + std::to_string(cfg.vocabulary_k) + "]");
  make_kernels(cfg.kernels);
  if (cfg.correlations < 1) throw ConfigError("correlations.count must be >= 1");
  if (cfg.pca_components && *cfg.pca_components < 1)
    throw ConfigError("pca.components must be >= 1");
  if (cfg.channels.channels.empty()) throw ConfigError("no channels selected");
  if (!(cfg.svm.c > 0)) throw ConfigError("svm.c must be positive");
  if (!(cfg.svm.tol > 0)) throw ConfigError("svm.tol must be positive");
  if (cfg.svm.max_iter < 1) throw ConfigError("svm.max_iter must be >= 1");
  for (double c : cfg.c_grid)
    if (!(c > 0)) throw ConfigError("svm.c_grid entries must be positive");
  if (cfg.split.kind != SplitConfig::Kind::fixed && cfg.split.folds < 2)
    throw ConfigError("split.folds must be at least 2");
  if (cfg.split.kind == SplitConfig::Kind::fixed && cfg.split.test_groups.empty())
    throw ConfigError("split.kind = fixed needs split.test_groups");
  for (const auto& [size, rate] : cfg.replay_rates) {
    if (size < 1 || size > cfg.replay_orig_size)
      throw ConfigError("replay sizes must lie in [1, replay.orig_size]");
    if (!(rate >= 0 && rate <= 100))
      throw ConfigError("replay rates must lie in [0, 100]");
  }
}

void validate_config_for_data(const PipelineConfig& cfg, std::size_t n_train,
                              std::size_t total_points) {
  if (n_train < 2)
    throw ConfigError("need at least 2 training videos, got " + std::to_string(n_train));
  if (cfg.vocabulary_k > total_points)
    throw ConfigError("vocabulary.k = " + std::to_string(cfg.vocabulary_k) +
                      " exceeds the " + std::to_string(total_points) +
                      " training interest points");
  if (cfg.uses(Channel::pcacooc) && cfg.pca_components &&
      *cfg.pca_components > n_train - 1)
    throw ConfigError("pca.components = " + std::to_string(*cfg.pca_components) +
                      " exceeds N_train - 1 = " + std::to_string(n_train - 1) +
                      ": the number of principal components is capped at one "
                      "less than the number of training videos");
  if (cfg.uses(Channel::boc)) {
    const auto k_star = cfg.reduction_target.value_or(cfg.vocabulary_k);
    const auto elements = k_star * k_star * n_train;
    if (cfg.correlations > elements)
      throw ConfigError("correlations.count = " + std::to_string(cfg.correlations) +
                        " exceeds the " + std::to_string(elements) +
                        " correlogram elements of the training set");
  }
}

}  // namespace cooc
