#include <limits>
#include <random>

#include "cooc/error.hpp"
#include "cooc/parallel.hpp"
#include "cooc/vocabulary.hpp"

namespace cooc {

namespace {

double squared_distance(const double* a, const double* b, Eigen::Index dim) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

RowMatrix plus_plus_seeds(const RowMatrix& x, std::size_t k,
                          std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto dim = x.cols();
  RowMatrix centers(static_cast<Eigen::Index>(k), dim);
  std::vector<bool> chosen(n, false);

  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  centers.row(0) = x.row(static_cast<Eigen::Index>(first));
  chosen[first] = true;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i)
    d2[i] = squared_distance(x.row(i).data(), centers.row(0).data(), dim);

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n;
    if (total > 0) {
      const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0) continue;
        acc += d2[i];
        pick = i;
        if (acc > r) break;
      }
    }
    if (pick == n) {
      // Remaining points all coincide with a center.
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) { pick = i; break; }
    }
    chosen[pick] = true;
    centers.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], squared_distance(x.row(i).data(),
                                               centers.row(c).data(), dim));
  }
  return centers;
}

}  // namespace

std::size_t nearest_row(const RowMatrix& centroids, const double* point) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < centroids.rows(); ++r) {
    const double d = squared_distance(centroids.row(r).data(), point,
                                      centroids.cols());
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(r);
    }
  }
  return best;
}

KMeansResult kmeans(const RowMatrix& x, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0) throw ConfigError("kmeans: no input vectors");
  if (k == 0) throw ConfigError("kmeans: k must be at least 1");
  if (k > n)
    throw ConfigError("kmeans: k = " + std::to_string(k) + " exceeds the " +
                      std::to_string(n) + " input vectors");
  if (options.max_iters == 0) throw ConfigError("kmeans: max_iters must be >= 1");

  std::mt19937_64 rng(seed);
  KMeansResult res;
  res.centroids = plus_plus_seeds(x, k, rng);
  res.assignments.assign(n, 0);
  std::vector<double> dist(n, 0.0);
  const auto dim = x.cols();

  double prev = 0.0;
  for (std::size_t iter = 0;; ++iter) {
    parallel_for(n, options.threads, [&](std::size_t i) {
      const auto c = nearest_row(res.centroids, x.row(i).data());
      res.assignments[i] = c;
      dist[i] = squared_distance(x.row(i).data(), res.centroids.row(c).data(), dim);
    });
    double inertia = 0.0;
    for (double d : dist) inertia += d;
    res.inertia = inertia;
    res.inertia_trace.push_back(inertia);
    if (iter > 0 && prev - inertia <= options.tol * prev) break;
    if (iter + 1 >= options.max_iters) break;
    prev = inertia;

    std::vector<std::size_t> counts(k, 0);
    for (auto a : res.assignments) ++counts[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[res.assignments[i]] < 2) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) continue;  // nothing to split; keep the old center
      --counts[res.assignments[far]];
      res.assignments[far] = c;
      counts[c] = 1;
      dist[far] = 0.0;
    }
    RowMatrix sums = RowMatrix::Zero(static_cast<Eigen::Index>(k), dim);
    for (std::size_t i = 0; i < n; ++i)
      sums.row(static_cast<Eigen::Index>(res.assignments[i])) += x.row(static_cast<Eigen::Index>(i));
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0)
        res.centroids.row(static_cast<Eigen::Index>(c)) =
            sums.row(static_cast<Eigen::Index>(c)) / double(counts[c]);
  }
  return res;
}

}  // namespace cooc
