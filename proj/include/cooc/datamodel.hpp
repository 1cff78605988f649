#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cooc {

struct Vocabulary;

/// Word index into a vocabulary, 0-based in memory and 1-based on disk.
using WordIndex = std::uint32_t;

struct InterestPoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  // Detector scale. Carried through I/O, unused downstream.
  double scale = 1.0;
  std::vector<double> descriptor;

  friend bool operator==(const InterestPoint&, const InterestPoint&) = default;
};

struct Extent {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::int64_t frames = 0;

  friend bool operator==(const Extent&, const Extent&) = default;
};

/// One video's interest points. `labels` is either empty or parallel to
/// `points`. An empty `action_class` means the class is unknown.
struct LabeledVideo {
  std::string video_id;
  std::string action_class;
  std::optional<std::string> group;
  Extent extent;
  std::vector<InterestPoint> points;
  std::vector<WordIndex> labels;

  bool labeled() const { return labels.size() == points.size(); }

  friend bool operator==(const LabeledVideo&, const LabeledVideo&) = default;
};

class Dataset {
public:
  Dataset() = default;

  /// Validates every invariant and derives the class set and descriptor
  /// length. Throws DataError on violation.
  explicit Dataset(std::vector<LabeledVideo> videos);

  const std::vector<LabeledVideo>& videos() const { return videos_; }
  /// Distinct non-empty action classes, sorted.
  const std::vector<std::string>& class_set() const { return class_set_; }
  std::size_t descriptor_len() const { return descriptor_len_; }
  std::size_t size() const { return videos_.size(); }
  std::size_t total_points() const;

  /// Index of `name` in class_set(); throws DataError when absent.
  std::size_t class_index(const std::string& name) const;

  /// Subset in the given order.
  Dataset subset(const std::vector<std::size_t>& indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

private:
  std::vector<LabeledVideo> videos_;
  std::vector<std::string> class_set_;
  std::size_t descriptor_len_ = 0;
};

/// Reads a line-delimited feature file. Errors carry the 1-based line number.
Dataset load_dataset(const std::filesystem::path& path);

/// Writes the feature file format; output is byte-deterministic.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Serializes one video as a single feature-file record (no newline).
std::string video_to_record(const LabeledVideo& video);

/// Assigns each point the Euclidean-nearest centroid, lowest index on ties.
LabeledVideo label_points(const LabeledVideo& video, const Vocabulary& vocab);

/// Labels every video against `vocab`, in parallel over videos.
Dataset label_dataset(const Dataset& dataset, const Vocabulary& vocab,
                      unsigned threads = 1);

// --- synthetic data -------------------------------------------------------

struct PairRule {
  WordIndex first = 0;
  WordIndex second = 0;
  std::size_t pairs_per_video = 0;
  // Largest per-axis offset between the two points of one pair.
  double radius_x = 0.0;
  double radius_y = 0.0;
  double radius_t = 0.0;
};

struct SynthClass {
  std::string name;
  std::vector<PairRule> rules;
};

/// Recipe for a dataset in which every class emits each word equally often,
/// so only the spatio-temporal arrangement of words separates classes.
struct SynthSpec {
  std::vector<SynthClass> classes;
  std::size_t videos_per_class = 0;
  Extent extent{160, 120, 100};
  std::vector<std::vector<double>> prototypes;
  double noise_sigma = 0.0;
  // Per-word background point count drawn uniformly from [min, max]. The
  // draw for video i is shared by every class, so class totals still match.
  std::size_t background_min = 0;
  std::size_t background_max = 0;
  // When > 0 videos get group "g<i % groups>".
  std::size_t groups = 0;
};

/// Throws ConfigError naming the violated invariant.
void validate_synth_spec(const SynthSpec& spec);

/// Deterministic for a fixed (spec, seed). Labels are filled with the
/// emitted word indices.
Dataset synth_dataset(const SynthSpec& spec, std::uint64_t seed);

SynthSpec synth_spec_from_json(const std::string& text);
std::string synth_spec_to_json(const SynthSpec& spec);

/// Two classes over four words: class "cross" pairs (1,2),(3,4) and class
/// "skip" pairs (1,3),(2,4), identical word marginals.
SynthSpec default_synth_spec(std::size_t videos_per_class = 40);

}  // namespace cooc
