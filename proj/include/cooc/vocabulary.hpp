#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cooc/datamodel.hpp"
#include "cooc/matrix.hpp"

namespace cooc {

// --- k-means --------------------------------------------------------------

struct KMeansOptions {
  std::size_t max_iters = 100;
  // Stop when the relative inertia improvement drops below this.
  double tol = 1e-6;
  unsigned threads = 1;
};

struct KMeansResult {
  RowMatrix centroids;
  std::vector<std::size_t> assignments;
  double inertia = 0.0;
  // Inertia after every assignment step; non-increasing.
  std::vector<double> inertia_trace;
};

/// Lloyd iterations from k-means++ seeding. Rows of `vectors` are samples.
/// Empty clusters are re-seeded with the point farthest from its centroid.
KMeansResult kmeans(const RowMatrix& vectors, std::size_t k,
                    std::uint64_t seed, const KMeansOptions& options = {});

/// Index of the nearest row of `centroids` (squared Euclidean), lowest
/// index on ties.
std::size_t nearest_row(const RowMatrix& centroids,
                        const double* point);

// --- vocabulary -----------------------------------------------------------

struct Vocabulary {
  RowMatrix centroids;
  // For each word, the sorted original word indices it absorbed.
  std::vector<std::vector<WordIndex>> merged_from;

  std::size_t size() const { return static_cast<std::size_t>(centroids.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(centroids.cols()); }

  /// Fresh vocabulary with singleton provenance.
  static Vocabulary from_centroids(RowMatrix centroids);
};

inline constexpr std::size_t kDefaultVocabularySize = 1000;
inline constexpr std::size_t kDefaultVocabularySample = 100000;

/// Samples min(sample_size, total) descriptors without replacement and
/// clusters them.
Vocabulary build_vocabulary(const Dataset& dataset,
                            std::size_t k = kDefaultVocabularySize,
                            std::size_t sample_size = kDefaultVocabularySample,
                            std::uint64_t seed = 0,
                            const KMeansOptions& options = {});

// --- word/class statistics ------------------------------------------------

/// Word-by-class occurrence counts.
class CountMatrix {
public:
  CountMatrix() = default;
  CountMatrix(std::size_t words, std::vector<std::string> classes);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return classes_.size(); }
  const std::vector<std::string>& classes() const { return classes_; }

  std::int64_t& at(std::size_t word, std::size_t cls) {
    return counts_[word * cols() + cls];
  }
  std::int64_t at(std::size_t word, std::size_t cls) const {
    return counts_[word * cols() + cls];
  }
  std::int64_t row_total(std::size_t word) const;
  std::int64_t col_total(std::size_t cls) const;
  std::int64_t total() const;

  /// Rows i and j replaced by their sum at position min(i, j).
  CountMatrix merged(std::size_t i, std::size_t j) const;

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::vector<std::string> classes_;
  std::vector<std::int64_t> counts_;
};

/// counts(word, class) over all labeled points, classes in dataset order.
CountMatrix class_word_counts(const Dataset& labeled, std::size_t vocab_size);

/// I(words; classes) in bits.
double mutual_information(const CountMatrix& counts);

/// Information lost by merging words i and j, computed locally as the
/// weighted Jensen-Shannon divergence of their class conditionals.
double merge_loss(const CountMatrix& counts, std::size_t i, std::size_t j);

struct Reduction {
  Vocabulary vocabulary;
  CountMatrix counts;
  // Indices (i < j) merged at each step, in the vocabulary of that step;
  // the merged word takes position i.
  std::vector<std::pair<std::size_t, std::size_t>> merges;
  std::vector<double> losses;
};

/// Greedy minimal-loss pairwise merging down to `target_size` words.
/// Merged centroids are the plain component-wise average of the pair.
Reduction reduce_vocabulary(const Vocabulary& vocab, const CountMatrix& counts,
                            std::size_t target_size);

// --- vocabulary size trade-off ---------------------------------------------

/// (1 - (reduced/orig)^2) * rate.
double tradeoff_factor(std::size_t reduced_size, std::size_t orig_size,
                       double classification_rate);

struct TradeoffRow {
  std::size_t reduced_size = 0;
  double classification_rate = 0.0;
  double m_factor = 0.0;
};

struct TradeoffSweep {
  std::vector<TradeoffRow> rows;
  std::size_t best_size = 0;
};

/// Scores every size with `rate_for_size` (a percentage) and selects the
/// size with the largest factor, smaller size on ties. Exceptions from the
/// callback are rethrown as DataError/ConfigError naming the size.
TradeoffSweep sweep_tradeoff(
    const std::vector<std::size_t>& sizes, std::size_t orig_size,
    const std::function<double(std::size_t)>& rate_for_size);

/// `size,rate_percent,m_factor` table plus a trailing `best,<size>` line.
std::string tradeoff_table(const TradeoffSweep& sweep);

}  // namespace cooc
