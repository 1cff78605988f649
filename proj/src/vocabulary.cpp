#include "cooc/vocabulary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "cooc/error.hpp"

namespace cooc {

Vocabulary Vocabulary::from_centroids(RowMatrix centroids) {
  Vocabulary v;
  v.centroids = std::move(centroids);
  v.merged_from.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v.merged_from[i] = {static_cast<WordIndex>(i)};
  return v;
}

Vocabulary build_vocabulary(const Dataset& dataset, std::size_t k,
                            std::size_t sample_size, std::uint64_t seed,
                            const KMeansOptions& options) {
  const std::size_t total = dataset.total_points();
  if (k == 0) throw ConfigError("vocabulary size must be at least 1");
  if (total < k)
    throw ConfigError("vocabulary size k = " + std::to_string(k) +
                      " exceeds the " + std::to_string(total) +
                      " available interest points");
  const std::size_t take = std::min(sample_size, total);
  if (take < k)
    throw ConfigError("vocabulary sample size " + std::to_string(take) +
                      " is smaller than k = " + std::to_string(k));

  std::vector<std::size_t> picked(total);
  std::iota(picked.begin(), picked.end(), std::size_t{0});
  if (take < total) {
    std::vector<std::size_t> sample;
    sample.reserve(take);
    std::mt19937_64 rng(seed);
    std::sample(picked.begin(), picked.end(), std::back_inserter(sample), take,
                rng);
    picked = std::move(sample);
  }

  const auto dim = static_cast<Eigen::Index>(dataset.descriptor_len());
  RowMatrix x(static_cast<Eigen::Index>(take), dim);
  std::size_t flat = 0, next = 0;
  for (const auto& v : dataset.videos()) {
    for (const auto& p : v.points) {
      if (next < picked.size() && picked[next] == flat) {
        for (Eigen::Index d = 0; d < dim; ++d)
          x(static_cast<Eigen::Index>(next), d) = p.descriptor[static_cast<std::size_t>(d)];
        ++next;
      }
      ++flat;
    }
  }
  auto km = kmeans(x, k, seed + 1, options);
  return Vocabulary::from_centroids(std::move(km.centroids));
}

// --- CountMatrix -------------------------------------------------------------

CountMatrix::CountMatrix(std::size_t words, std::vector<std::string> classes)
    : rows_(words), classes_(std::move(classes)),
      counts_(words * classes_.size(), 0) {}

std::int64_t CountMatrix::row_total(std::size_t word) const {
  std::int64_t s = 0;
  for (std::size_t c = 0; c < cols(); ++c) s += at(word, c);
  return s;
}

std::int64_t CountMatrix::col_total(std::size_t cls) const {
  std::int64_t s = 0;
  for (std::size_t r = 0; r < rows_; ++r) s += at(r, cls);
  return s;
}

std::int64_t CountMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

CountMatrix CountMatrix::merged(std::size_t i, std::size_t j) const {
  if (i == j || i >= rows_ || j >= rows_)
    throw ConfigError("merge needs two distinct existing rows");
  const auto lo = std::min(i, j), hi = std::max(i, j);
  CountMatrix out(rows_ - 1, classes_);
  std::size_t dst = 0;
  for (std::size_t r = 0; r < rows_; ++r) {
    if (r == hi) continue;
    for (std::size_t c = 0; c < cols(); ++c)
      out.at(dst, c) = at(r, c) + (r == lo ? at(hi, c) : 0);
    ++dst;
  }
  return out;
}

CountMatrix class_word_counts(const Dataset& labeled, std::size_t vocab_size) {
  CountMatrix cm(vocab_size, labeled.class_set());
  for (const auto& v : labeled.videos()) {
    if (v.action_class.empty())
      throw DataError("video '" + v.video_id + "' has no action class");
    if (!v.labeled() || (v.labels.empty() && !v.points.empty()))
      throw DataError("video '" + v.video_id + "' is not labeled");
    const auto cls = labeled.class_index(v.action_class);
    for (auto l : v.labels) {
      if (l >= vocab_size)
        throw DataError("video '" + v.video_id + "' has label " +
                        std::to_string(l + 1) + " beyond vocabulary size " +
                        std::to_string(vocab_size));
      ++cm.at(l, cls);
    }
  }
  return cm;
}

// --- information measures ----------------------------------------------------------

double mutual_information(const CountMatrix& cm) {
  const auto n = cm.total();
  if (n <= 0) throw DataError("mutual information of an all-zero count matrix");
  std::vector<double> col(cm.cols());
  for (std::size_t c = 0; c < cm.cols(); ++c) col[c] = double(cm.col_total(c));
  const double total = double(n);
  double info = 0.0;
  for (std::size_t r = 0; r < cm.rows(); ++r) {
    const double row = double(cm.row_total(r));
    for (std::size_t c = 0; c < cm.cols(); ++c) {
      const auto v = cm.at(r, c);
      if (v < 0) throw DataError("negative count");
      if (v == 0) continue;
      const double joint = double(v);
      info += joint / total * std::log2(joint * total / (row * col[c]));
    }
  }
  return std::max(0.0, info);
}

namespace {

// (p_i + p_j) * JS_pi(p(y|i), p(y|j)) from raw counts.
double pair_loss(const std::int64_t* ri, const std::int64_t* rj, std::size_t cols,
                 double total) {
  double ti = 0.0, tj = 0.0;
  for (std::size_t c = 0; c < cols; ++c) {
    ti += double(ri[c]);
    tj += double(rj[c]);
  }
  const double tm = ti + tj;
  double s = 0.0;
  for (std::size_t c = 0; c < cols; ++c) {
    const double a = double(ri[c]), b = double(rj[c]);
    const double m = a + b;
    if (a > 0) s += a * std::log2((a * tm) / (ti * m));
    if (b > 0) s += b * std::log2((b * tm) / (tj * m));
  }
  return std::max(0.0, s / total);
}

}  // namespace

double merge_loss(const CountMatrix& cm, std::size_t i, std::size_t j) {
  if (i == j) throw ConfigError("merge_loss needs two distinct words");
  if (i >= cm.rows() || j >= cm.rows())
    throw ConfigError("merge_loss word index out of range");
  const auto n = cm.total();
  if (n <= 0) throw DataError("merge loss of an all-zero count matrix");
  std::vector<std::int64_t> a(cm.cols()), b(cm.cols());
  for (std::size_t c = 0; c < cm.cols(); ++c) {
    a[c] = cm.at(i, c);
    b[c] = cm.at(j, c);
  }
  return pair_loss(a.data(), b.data(), cm.cols(), double(n));
}

Reduction reduce_vocabulary(const Vocabulary& vocab, const CountMatrix& cm,
                            std::size_t target) {
  const std::size_t k = vocab.size();
  if (cm.rows() != k)
    throw DataError("count matrix has " + std::to_string(cm.rows()) +
                    " rows for a vocabulary of " + std::to_string(k));
  if (target < 1 || target > k)
    throw ConfigError("reduction target " + std::to_string(target) +
                      " outside [1, " + std::to_string(k) + "]");
  const auto n = cm.total();
  if (target < k && n <= 0)
    throw DataError("cannot reduce with an all-zero count matrix");

  const std::size_t cols = cm.cols();
  const double total = double(n);
  std::vector<std::int64_t> rows(k * cols);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < cols; ++c) rows[r * cols + c] = cm.at(r, c);
  RowMatrix centroids = vocab.centroids;
  auto merged_from = vocab.merged_from;
  std::vector<bool> active(k, true);

  constexpr auto none = std::numeric_limits<std::size_t>::max();
  // Pair losses for i < j, cached in the upper triangle.
  std::vector<double> loss(k * k, 0.0);
  auto L = [&](std::size_t i, std::size_t j) -> double& {
    return i < j ? loss[i * k + j] : loss[j * k + i];
  };
  auto compute = [&](std::size_t i, std::size_t j) {
    return pair_loss(&rows[i * cols], &rows[j * cols], cols, total);
  };
  std::vector<std::size_t> best(k, none);
  std::vector<double> best_val(k, 0.0);
  auto rescan = [&](std::size_t i) {
    best[i] = none;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (!active[j]) continue;
      if (best[i] == none || L(i, j) < best_val[i]) {
        best[i] = j;
        best_val[i] = L(i, j);
      }
    }
  };
  if (target < k) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) L(i, j) = compute(i, j);
    for (std::size_t i = 0; i < k; ++i) rescan(i);
  }

  Reduction out;
  for (std::size_t live = k; live > target; --live) {
    std::size_t i = none;
    for (std::size_t r = 0; r < k; ++r) {
      if (!active[r] || best[r] == none) continue;
      if (i == none || best_val[r] < best_val[i]) i = r;
    }
    const std::size_t j = best[i];
    out.losses.push_back(L(i, j));
    const auto rank = [&](std::size_t slot) {
      return static_cast<std::size_t>(
          std::count(active.begin(), active.begin() + std::ptrdiff_t(slot), true));
    };
    out.merges.emplace_back(rank(i), rank(j));

    centroids.row(Eigen::Index(i)) =
        (centroids.row(Eigen::Index(i)) + centroids.row(Eigen::Index(j))) / 2.0;
    for (std::size_t c = 0; c < cols; ++c) rows[i * cols + c] += rows[j * cols + c];
    auto& into = merged_from[i];
    into.insert(into.end(), merged_from[j].begin(), merged_from[j].end());
    std::sort(into.begin(), into.end());
    active[j] = false;
    best[j] = none;

    for (std::size_t r = 0; r < k; ++r)
      if (active[r] && r != i) L(r, i) = compute(std::min(r, i), std::max(r, i));
    rescan(i);
    for (std::size_t r = 0; r < j; ++r) {
      if (!active[r] || r == i) continue;
      if (best[r] == i || best[r] == j) {
        rescan(r);
      } else if (r < i) {
        const double v = L(r, i);
        if (best[r] == none || v < best_val[r] || (v == best_val[r] && i < best[r])) {
          best[r] = i;
          best_val[r] = v;
        }
      }
    }
  }

  const std::size_t kept = static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
  out.vocabulary.centroids.resize(Eigen::Index(kept), centroids.cols());
  out.counts = CountMatrix(kept, cm.classes());
  std::size_t dst = 0;
  for (std::size_t r = 0; r < k; ++r) {
    if (!active[r]) continue;
    out.vocabulary.centroids.row(Eigen::Index(dst)) = centroids.row(Eigen::Index(r));
    out.vocabulary.merged_from.push_back(std::move(merged_from[r]));
    for (std::size_t c = 0; c < cols; ++c) out.counts.at(dst, c) = rows[r * cols + c];
    ++dst;
  }
  return out;
}

// --- trade-off ------------------------------------------------------------------

double tradeoff_factor(std::size_t reduced_size, std::size_t orig_size,
                       double rate) {
  if (orig_size == 0 || reduced_size == 0)
    throw ConfigError("vocabulary sizes must be positive");
  if (reduced_size > orig_size)
    throw ConfigError("reduced size " + std::to_string(reduced_size) +
                      " exceeds original size " + std::to_string(orig_size));
  if (!(rate >= 0.0 && rate <= 100.0))
    throw ConfigError("classification rate must lie in [0, 100]");
  const double ratio = double(reduced_size) / double(orig_size);
  return (1.0 - ratio * ratio) * rate;
}

TradeoffSweep sweep_tradeoff(const std::vector<std::size_t>& sizes,
                             std::size_t orig_size,
                             const std::function<double(std::size_t)>& rate_for_size) {
  if (sizes.empty()) throw ConfigError("sweep needs at least one size");
  std::vector<std::size_t> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  TradeoffSweep out;
  for (auto size : sorted) {
    auto context = [size](const std::exception& e) {
      return "sweep size " + std::to_string(size) + ": " + e.what();
    };
    try {
      if (size == 0 || size > orig_size)
        throw ConfigError("size outside [1, " + std::to_string(orig_size) + "]");
      const double rate = rate_for_size(size);
      out.rows.push_back({size, rate, tradeoff_factor(size, orig_size, rate)});
    } catch (const ConfigError& e) {
      throw ConfigError(context(e));
    } catch (const DataError& e) {
      throw DataError(context(e));
    }
  }
  const TradeoffRow* best = &out.rows.front();
  for (const auto& row : out.rows)
    if (row.m_factor > best->m_factor) best = &row;
  out.best_size = best->reduced_size;
  return out;
}

std::string tradeoff_table(const TradeoffSweep& sweep) {
  std::ostringstream out;
  out << "size,rate_percent,m_factor\n";
  char buf[96];
  for (const auto& r : sweep.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.2f,%.2f\n", r.reduced_size,
                  r.classification_rate, r.m_factor);
    out << buf;
  }
  out << "best," << sweep.best_size << "\n";
  return out.str();
}

}  // namespace cooc
