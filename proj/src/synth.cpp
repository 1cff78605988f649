#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cooc/datamodel.hpp"
#include "cooc/error.hpp"

namespace cooc {

namespace {

std::vector<std::size_t> word_emissions(const SynthClass& cls,
                                        std::size_t words) {
  std::vector<std::size_t> out(words, 0);
  for (const auto& r : cls.rules) {
    out[r.first] += r.pairs_per_video;
    out[r.second] += r.pairs_per_video;
  }
  return out;
}

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

}  // namespace

void validate_synth_spec(const SynthSpec& spec) {
  if (spec.classes.empty()) throw ConfigError("synth spec: no classes");
  if (spec.videos_per_class == 0)
    throw ConfigError("synth spec: videos_per_class must be at least 1");
  if (spec.prototypes.empty()) throw ConfigError("synth spec: no prototypes");
  const auto len = spec.prototypes.front().size();
  for (const auto& p : spec.prototypes) {
    if (p.size() != len)
      throw ConfigError("synth spec: prototypes differ in length");
    for (double x : p)
      if (!std::isfinite(x))
        throw ConfigError("synth spec: non-finite prototype value");
  }
  if (!(spec.noise_sigma >= 0) || !std::isfinite(spec.noise_sigma))
    throw ConfigError("synth spec: noise_sigma must be finite and >= 0");
  if (spec.background_min > spec.background_max)
    throw ConfigError("synth spec: background min exceeds max");
  if (spec.extent.width <= 0 || spec.extent.height <= 0 ||
      spec.extent.frames <= 0)
    throw ConfigError("synth spec: extent must be positive");

  std::set<std::string> names;
  const std::size_t words = spec.prototypes.size();
  for (const auto& cls : spec.classes) {
    if (cls.name.empty() || !names.insert(cls.name).second)
      throw ConfigError("synth spec: class names must be unique and non-empty");
    for (const auto& r : cls.rules) {
      if (r.first >= words || r.second >= words)
        throw ConfigError("synth spec: class '" + cls.name +
                          "' references a word without a prototype");
      const bool fits = r.radius_x >= 0 && r.radius_y >= 0 && r.radius_t >= 0 &&
                        2 * r.radius_x <= double(spec.extent.width) &&
                        2 * r.radius_y <= double(spec.extent.height) &&
                        2 * r.radius_t <= double(spec.extent.frames);
      if (!fits)
        throw ConfigError("synth spec: class '" + cls.name +
                          "' has a pair radius that does not fit the extent");
    }
  }
  const auto reference = word_emissions(spec.classes.front(), words);
  for (const auto& cls : spec.classes) {
    const auto counts = word_emissions(cls, words);
    for (std::size_t w = 0; w < words; ++w) {
      if (counts[w] != reference[w]) {
        std::ostringstream msg;
        msg << "synth spec violates marginal matching: word " << (w + 1)
            << " is emitted " << counts[w] << " times per video by class '"
            << cls.name << "' but " << reference[w] << " times by class '"
            << spec.classes.front().name << "'";
        throw ConfigError(msg.str());
      }
    }
  }
}

Dataset synth_dataset(const SynthSpec& spec, std::uint64_t seed) {
  validate_synth_spec(spec);
  const std::size_t words = spec.prototypes.size();
  const auto& ext = spec.extent;

  std::vector<LabeledVideo> videos;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const auto& cls = spec.classes[c];
    for (std::size_t i = 0; i < spec.videos_per_class; ++i) {
      // Background counts depend on the video ordinal only, so every class
      // receives the same totals.
      std::seed_seq bg_seed{std::uint64_t{seed}, std::uint64_t{0x5eed}, std::uint64_t{i}};
      std::mt19937_64 bg_rng(bg_seed);
      std::vector<std::size_t> background(words);
      for (auto& b : background)
        b = static_cast<std::size_t>(uniform_int(
            bg_rng, std::int64_t(spec.background_min),
            std::int64_t(spec.background_max)));

      std::seed_seq video_seed{std::uint64_t{seed}, std::uint64_t{c + 1}, std::uint64_t{i}};
      std::mt19937_64 rng(video_seed);
      std::normal_distribution<double> noise(0.0, spec.noise_sigma);

      LabeledVideo v;
      char id[64];
      std::snprintf(id, sizeof id, "%s_%03zu", cls.name.c_str(), i);
      v.video_id = id;
      v.action_class = cls.name;
      if (spec.groups > 0) v.group = "g" + std::to_string(i % spec.groups);
      v.extent = ext;

      auto emit = [&](WordIndex w, double x, double y, double t) {
        InterestPoint p;
        p.x = x;
        p.y = y;
        p.t = t;
        p.scale = 2.0;
        p.descriptor = spec.prototypes[w];
        if (spec.noise_sigma > 0)
          for (auto& d : p.descriptor) d += noise(rng);
        v.points.push_back(std::move(p));
        v.labels.push_back(w);
      };

      for (const auto& rule : cls.rules) {
        const auto rx = static_cast<std::int64_t>(std::floor(rule.radius_x));
        const auto ry = static_cast<std::int64_t>(std::floor(rule.radius_y));
        const auto rt = static_cast<std::int64_t>(std::floor(rule.radius_t));
        for (std::size_t k = 0; k < rule.pairs_per_video; ++k) {
          const auto ax = uniform_int(rng, rx, ext.width - rx);
          const auto ay = uniform_int(rng, ry, ext.height - ry);
          const auto at = uniform_int(rng, rt, ext.frames - rt);
          const auto bx = ax + uniform_int(rng, -rx, rx);
          const auto by = ay + uniform_int(rng, -ry, ry);
          const auto bt = at + uniform_int(rng, -rt, rt);
          emit(rule.first, double(ax), double(ay), double(at));
          emit(rule.second, double(bx), double(by), double(bt));
        }
      }
      for (std::size_t w = 0; w < words; ++w) {
        for (std::size_t k = 0; k < background[w]; ++k) {
          const auto x = uniform_int(rng, 0, ext.width);
          const auto y = uniform_int(rng, 0, ext.height);
          const auto t = uniform_int(rng, 0, ext.frames);
          emit(static_cast<WordIndex>(w), double(x), double(y), double(t));
        }
      }
      videos.push_back(std::move(v));
    }
  }
  return Dataset(std::move(videos));
}

SynthSpec synth_spec_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SynthSpec s;
    s.videos_per_class = j.at("videos_per_class").get<std::size_t>();
    if (auto it = j.find("extent"); it != j.end()) {
      const auto e = it->get<std::vector<std::int64_t>>();
      if (e.size() != 3) throw ConfigError("synth spec: extent needs 3 values");
      s.extent = {e[0], e[1], e[2]};
    }
    s.noise_sigma = j.value("noise_sigma", 0.0);
    if (auto it = j.find("background"); it != j.end()) {
      const auto b = it->get<std::vector<std::size_t>>();
      if (b.size() != 2) throw ConfigError("synth spec: background needs [min, max]");
      s.background_min = b[0];
      s.background_max = b[1];
    }
    s.groups = j.value("groups", std::size_t{0});
    s.prototypes = j.at("prototypes").get<std::vector<std::vector<double>>>();
    for (const auto& c : j.at("classes")) {
      SynthClass cls;
      cls.name = c.at("name").get<std::string>();
      for (const auto& r : c.at("rules")) {
        PairRule rule;
        const auto pair = r.at("pair").get<std::vector<std::int64_t>>();
        if (pair.size() != 2 || pair[0] < 1 || pair[1] < 1)
          throw ConfigError("synth spec: pair must be two 1-based word indices");
        rule.first = static_cast<WordIndex>(pair[0] - 1);
        rule.second = static_cast<WordIndex>(pair[1] - 1);
        rule.pairs_per_video = r.at("count").get<std::size_t>();
        const auto rad = r.at("radius").get<std::vector<double>>();
        if (rad.size() != 3) throw ConfigError("synth spec: radius needs 3 values");
        rule.radius_x = rad[0];
        rule.radius_y = rad[1];
        rule.radius_t = rad[2];
        cls.rules.push_back(rule);
      }
      s.classes.push_back(std::move(cls));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synth spec: ") + e.what());
  }
}

std::string synth_spec_to_json(const SynthSpec& s) {
  nlohmann::ordered_json j;
  j["videos_per_class"] = s.videos_per_class;
  j["extent"] = {s.extent.width, s.extent.height, s.extent.frames};
  j["noise_sigma"] = s.noise_sigma;
  j["background"] = {s.background_min, s.background_max};
  j["groups"] = s.groups;
  j["prototypes"] = s.prototypes;
  auto classes = nlohmann::ordered_json::array();
  for (const auto& c : s.classes) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    auto rules = nlohmann::ordered_json::array();
    for (const auto& r : c.rules) {
      nlohmann::ordered_json jr;
      jr["pair"] = {std::int64_t{r.first} + 1, std::int64_t{r.second} + 1};
      jr["count"] = r.pairs_per_video;
      jr["radius"] = {r.radius_x, r.radius_y, r.radius_t};
      rules.push_back(std::move(jr));
    }
    jc["rules"] = std::move(rules);
    classes.push_back(std::move(jc));
  }
  j["classes"] = std::move(classes);
  return j.dump(2) + "\n";
}

SynthSpec default_synth_spec(std::size_t videos_per_class) {
  SynthSpec s;
  s.videos_per_class = videos_per_class;
  s.extent = {160, 120, 100};
  s.noise_sigma = 0.5;
  s.background_min = 0;
  s.background_max = 4;
  s.groups = 8;
  const std::size_t words = 4;
  for (std::size_t w = 0; w < words; ++w) {
    std::vector<double> proto(words, 0.0);
    proto[w] = 10.0;
    s.prototypes.push_back(std::move(proto));
  }
  auto rule = [](WordIndex a, WordIndex b) {
    return PairRule{a, b, 6, 3.0, 3.0, 3.0};
  };
  s.classes.push_back({"cross", {rule(0, 1), rule(2, 3)}});
  s.classes.push_back({"skip", {rule(0, 2), rule(1, 3)}});
  return s;
}

}  // namespace cooc
