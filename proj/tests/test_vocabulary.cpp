#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "cooc/error.hpp"
#include "cooc/vocabulary.hpp"
#include "support.hpp"

using namespace cooc;

namespace {

// I(words; classes) straight from the definition, independent of the
// library's implementation.
double mi_oracle(const std::vector<std::vector<double>>& c) {
  double n = 0;
  for (const auto& r : c)
    for (double v : r) n += v;
  std::vector<double> py(c[0].size(), 0.0);
  for (const auto& r : c)
    for (std::size_t y = 0; y < r.size(); ++y) py[y] += r[y] / n;
  double mi = 0;
  for (const auto& r : c) {
    double pl = 0;
    for (double v : r) pl += v / n;
    for (std::size_t y = 0; y < r.size(); ++y) {
      const double p = r[y] / n;
      if (p > 0) mi += p * std::log2(p / (pl * py[y]));
    }
  }
  return mi;
}

std::vector<std::vector<double>> as_rows(const CountMatrix& cm) {
  std::vector<std::vector<double>> out(cm.rows(), std::vector<double>(cm.cols()));
  for (std::size_t i = 0; i < cm.rows(); ++i)
    for (std::size_t y = 0; y < cm.cols(); ++y) out[i][y] = double(cm.at(i, y));
  return out;
}

CountMatrix counts(const std::vector<std::vector<std::int64_t>>& rows) {
  std::vector<std::string> classes;
  for (std::size_t y = 0; y < rows[0].size(); ++y) classes.push_back("c" + std::to_string(y));
  CountMatrix cm(rows.size(), classes);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t y = 0; y < rows[i].size(); ++y) cm.at(i, y) = rows[i][y];
  return cm;
}

CountMatrix random_counts(std::mt19937_64& rng, std::size_t k, std::size_t y) {
  std::uniform_int_distribution<std::int64_t> d(0, 20);
  CountMatrix cm(k, std::vector<std::string>(y, ""));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t c = 0; c < y; ++c) cm.at(i, c) = d(rng);
  cm.at(0, 0) += 1;
  return cm;
}

RowMatrix random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  return x;
}

}  // namespace

TEST_CASE("kmeans with k = n puts every point in its own cluster") {
  std::mt19937_64 rng(1);
  const auto x = random_points(rng, 9, 3);
  const auto r = kmeans(x, 9, 5);
  CHECK(r.inertia == doctest::Approx(0.0));
  CHECK(std::set<std::size_t>(r.assignments.begin(), r.assignments.end()).size() == 9);
}

TEST_CASE("kmeans with k = 1 returns the mean") {
  std::mt19937_64 rng(2);
  const auto x = random_points(rng, 50, 4);
  const auto r = kmeans(x, 1, 3);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  CHECK((r.centroids.row(0) - mean).norm() < 1e-12);
}

TEST_CASE("kmeans separates two distant blobs") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  RowMatrix x(60, 2);
  for (int i = 0; i < 60; ++i) {
    const double base = i % 2 ? 100.0 : 0.0;
    x(i, 0) = base + u(rng);
    x(i, 1) = base + u(rng);
  }
  const auto r = kmeans(x, 2, 9);
  for (int c = 0; c < 2; ++c) {
    const double d0 = r.centroids.row(c).norm();
    const double d1 = (r.centroids.row(c) - Eigen::RowVector2d(100, 100)).norm();
    CHECK(std::min(d0, d1) <= 1.0);
  }
  // Exhaustive assignment oracle.
  for (int i = 0; i < 60; ++i) {
    const double d0 = (x.row(i) - r.centroids.row(0)).squaredNorm();
    const double d1 = (x.row(i) - r.centroids.row(1)).squaredNorm();
    CHECK(r.assignments[std::size_t(i)] == (d1 < d0 ? 1u : 0u));
  }
}

TEST_CASE("kmeans inertia never increases and runs are reproducible") {
  std::mt19937_64 rng(4);
  const auto x = random_points(rng, 300, 5);
  KMeansOptions opts;
  opts.tol = 0;
  opts.max_iters = 50;
  const auto a = kmeans(x, 12, 17, opts);
  for (std::size_t i = 1; i < a.inertia_trace.size(); ++i)
    CHECK(a.inertia_trace[i] <= a.inertia_trace[i - 1] + 1e-9);
  opts.threads = 4;
  const auto b = kmeans(x, 12, 17, opts);
  CHECK(a.centroids == b.centroids);
  CHECK(a.assignments == b.assignments);
}

TEST_CASE("kmeans rejects bad k") {
  std::mt19937_64 rng(5);
  const auto x = random_points(rng, 4, 2);
  CHECK_THROWS_AS(kmeans(x, 0, 1), ConfigError);
  CHECK_THROWS_AS(kmeans(x, 5, 1), ConfigError);
}

TEST_CASE("build_vocabulary defaults and determinism") {
  CHECK(kDefaultVocabularySize == 1000);
  CHECK(kDefaultVocabularySample == 100000);
  const auto d = synth_dataset(default_synth_spec(6), 2);
  const auto a = build_vocabulary(d, 4, 100000, 3);
  const auto b = build_vocabulary(d, 4, 100000, 3);
  CHECK(a.centroids == b.centroids);
  CHECK(a.size() == 4);
  CHECK(a.merged_from.size() == 4);
  CHECK(a.merged_from[2] == std::vector<WordIndex>{2});
  // Four prototypes at 10 e_i: each recovered within noise.
  for (int w = 0; w < 4; ++w) {
    double best = 1e9;
    for (int c = 0; c < 4; ++c) {
      Eigen::RowVector4d proto = Eigen::RowVector4d::Zero();
      proto(w) = 10;
      best = std::min(best, (a.centroids.row(c) - proto).norm());
    }
    CHECK(best < 1.0);
  }
  CHECK_THROWS_AS(build_vocabulary(d, d.total_points() + 1, 100000, 3), ConfigError);
  CHECK_NOTHROW(build_vocabulary(d, 4, 50, 3));
}

TEST_CASE("class_word_counts") {
  LabeledVideo v;
  v.video_id = "v";
  v.action_class = "a";
  v.extent = {5, 5, 5};
  for (int i = 0; i < 3; ++i) v.points.push_back(testing::point(1, 1, 1));
  v.labels = {0, 0, 1};
  const auto cm = class_word_counts(Dataset({v}), 2);
  CHECK(cm.at(0, 0) == 2);
  CHECK(cm.at(1, 0) == 1);
  v.labels.clear();
  CHECK_THROWS_AS(class_word_counts(Dataset({v}), 2), DataError);
}

TEST_CASE("class_word_counts matches an independent tally on synthetic data") {
  const auto d = synth_dataset(default_synth_spec(8), 6);
  const auto cm = class_word_counts(d, 4);
  std::map<std::pair<std::string, WordIndex>, std::int64_t> tally;
  for (const auto& v : d.videos())
    for (auto l : v.labels) ++tally[{v.action_class, l}];
  REQUIRE(cm.classes() == d.class_set());
  for (std::size_t w = 0; w < 4; ++w)
    for (std::size_t c = 0; c < cm.cols(); ++c)
      CHECK(cm.at(w, c) == tally[{cm.classes()[c], WordIndex(w)}]);
}

TEST_CASE("mutual information examples") {
  CHECK(mutual_information(counts({{2, 0}, {0, 2}})) == doctest::Approx(1.0));
  CHECK(mutual_information(counts({{1, 2}, {2, 4}, {3, 6}})) == doctest::Approx(0.0));
  CHECK_THROWS_AS(mutual_information(counts({{0, 0}})), DataError);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto cm = random_counts(rng, 6, 3);
    const double mi = mutual_information(cm);
    CHECK(mi == doctest::Approx(mi_oracle(as_rows(cm))).epsilon(1e-12));
    CHECK(mi >= 0.0);
    CHECK(mi <= std::min(std::log2(6.0), std::log2(3.0)) + 1e-12);
  }
}

TEST_CASE("merge loss examples and locality") {
  CHECK(merge_loss(counts({{2, 0}, {0, 2}}), 0, 1) == doctest::Approx(1.0));
  CHECK(merge_loss(counts({{1, 3}, {2, 6}, {5, 0}}), 0, 1) == 0.0);
  CHECK_THROWS_AS(merge_loss(counts({{1, 3}, {2, 6}}), 1, 1), ConfigError);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto cm = random_counts(rng, 6, 3);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i + 1; j < 6; ++j) {
        const double global = mi_oracle(as_rows(cm)) - mi_oracle(as_rows(cm.merged(i, j)));
        CHECK(std::abs(merge_loss(cm, i, j) - global) <= 1e-10);
        CHECK(merge_loss(cm, i, j) >= 0.0);
      }
  }
}

TEST_CASE("reduce_vocabulary to K is the identity") {
  std::mt19937_64 rng(9);
  const auto cm = random_counts(rng, 5, 2);
  const auto vocab = Vocabulary::from_centroids(random_points(rng, 5, 2));
  const auto r = reduce_vocabulary(vocab, cm, 5);
  CHECK(r.merges.empty());
  CHECK(r.vocabulary.centroids == vocab.centroids);
  CHECK_THROWS_AS(reduce_vocabulary(vocab, cm, 0), ConfigError);
  CHECK_THROWS_AS(reduce_vocabulary(vocab, cm, 6), ConfigError);
}

TEST_CASE("words with identical class conditionals merge first at zero loss") {
  const auto cm = counts({{5, 1}, {1, 5}, {2, 4}, {10, 2}});
  RowMatrix c(4, 1);
  c << 0, 1, 2, 3;
  const auto r = reduce_vocabulary(Vocabulary::from_centroids(c), cm, 3);
  REQUIRE(r.merges.size() == 1);
  CHECK(r.merges[0] == std::pair<std::size_t, std::size_t>{0, 3});
  CHECK(r.losses[0] == 0.0);
  CHECK(r.vocabulary.centroids(0, 0) == doctest::Approx(1.5));
  CHECK(r.vocabulary.merged_from[0] == std::vector<WordIndex>{0, 3});
}

TEST_CASE("greedy reduction replays exactly and is minimal at every step") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    const auto cm = random_counts(rng, 6, 3);
    const auto vocab = Vocabulary::from_centroids(random_points(rng, 6, 2));
    const auto r = reduce_vocabulary(vocab, cm, 3);
    REQUIRE(r.merges.size() == 3);

    // Replay oracle over plain vectors.
    auto rows = as_rows(cm);
    std::vector<std::vector<double>> cent;
    std::vector<std::set<WordIndex>> from;
    for (int i = 0; i < 6; ++i) {
      cent.push_back({vocab.centroids(i, 0), vocab.centroids(i, 1)});
      from.push_back({WordIndex(i)});
    }
    double mi = mi_oracle(rows);
    for (std::size_t s = 0; s < r.merges.size(); ++s) {
      // Minimal loss among all pairs of this step, via global recomputation.
      double best = 1e300;
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
          auto m = rows;
          for (std::size_t y = 0; y < m[i].size(); ++y) m[i][y] += m[j][y];
          m.erase(m.begin() + std::ptrdiff_t(j));
          best = std::min(best, mi - mi_oracle(m));
        }
      const auto [i, j] = r.merges[s];
      REQUIRE(i < j);
      for (std::size_t y = 0; y < rows[i].size(); ++y) rows[i][y] += rows[j][y];
      rows.erase(rows.begin() + std::ptrdiff_t(j));
      for (int d = 0; d < 2; ++d) cent[i][std::size_t(d)] = (cent[i][std::size_t(d)] + cent[j][std::size_t(d)]) / 2;
      cent.erase(cent.begin() + std::ptrdiff_t(j));
      from[i].insert(from[j].begin(), from[j].end());
      from.erase(from.begin() + std::ptrdiff_t(j));

      const double after = mi_oracle(rows);
      CHECK(std::abs(r.losses[s] - (mi - after)) <= 1e-10);
      CHECK(r.losses[s] <= best + 1e-10);
      CHECK(after <= mi + 1e-12);
      mi = after;
    }
    CHECK(std::abs(mutual_information(r.counts) - mi) <= 1e-10);
    CHECK(as_rows(r.counts) == rows);
    std::set<WordIndex> all;
    for (std::size_t w = 0; w < 3; ++w) {
      CHECK(r.vocabulary.centroids(Eigen::Index(w), 0) == cent[w][0]);
      CHECK(r.vocabulary.centroids(Eigen::Index(w), 1) == cent[w][1]);
      const std::set<WordIndex> got(r.vocabulary.merged_from[w].begin(),
                                    r.vocabulary.merged_from[w].end());
      CHECK(got == from[w]);
      for (auto o : got) CHECK(all.insert(o).second);
    }
    CHECK(all.size() == 6);
  }
}

TEST_CASE("trade-off factor") {
  CHECK(tradeoff_factor(1000, 1000, 91.67) == 0.0);
  CHECK(std::abs(tradeoff_factor(200, 1000, 88.89) - 85.33) <= 0.01);
  CHECK(std::abs(tradeoff_factor(300, 1000, 83.04) - 75.57) <= 0.01);
  CHECK(tradeoff_factor(10, 20, 50) == doctest::Approx(37.5));
  for (std::size_t s = 1; s < 100; ++s)
    CHECK(tradeoff_factor(s, 100, 60) > tradeoff_factor(s + 1, 100, 60));
  CHECK_THROWS_AS(tradeoff_factor(11, 10, 50), ConfigError);
  CHECK_THROWS_AS(tradeoff_factor(5, 10, 101), ConfigError);
}

TEST_CASE("sweep_tradeoff selection and errors") {
  const auto single = sweep_tradeoff({7}, 7, [](std::size_t) { return 80.0; });
  REQUIRE(single.rows.size() == 1);
  CHECK(single.rows[0].m_factor == 0.0);
  CHECK(single.best_size == 7);

  const auto sorted = sweep_tradeoff({20, 10, 10}, 20, [](std::size_t s) {
    return s == 10 ? 60.0 : 100.0;
  });
  REQUIRE(sorted.rows.size() == 2);
  CHECK(sorted.rows[0].reduced_size == 10);
  CHECK(sorted.best_size == 10);

  // 15/16 * 48 = 12/16 * 60 = 45 exactly.
  const auto tie = sweep_tradeoff({2, 1}, 4, [](std::size_t s) {
    return s == 1 ? 48.0 : 60.0;
  });
  CHECK(tie.rows[0].m_factor == tie.rows[1].m_factor);
  CHECK(tie.best_size == 1);

  CHECK_THROWS_WITH_AS(sweep_tradeoff({3}, 4, [](std::size_t) -> double {
                         throw DataError("boom");
                       }),
                       doctest::Contains("sweep size 3"), DataError);
  CHECK_THROWS_AS(sweep_tradeoff({}, 4, [](std::size_t) { return 1.0; }), ConfigError);
}

TEST_CASE("tradeoff table layout") {
  const auto s = sweep_tradeoff({200, 1000}, 1000, [](std::size_t size) {
    return size == 200 ? 88.89 : 91.67;
  });
  CHECK(tradeoff_table(s) ==
        "size,rate_percent,m_factor\n200,88.89,85.33\n1000,91.67,0.00\nbest,200\n");
}
