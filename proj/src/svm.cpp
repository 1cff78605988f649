#include <algorithm>
#include <cmath>
#include <limits>

#include "cooc/classify.hpp"
#include "cooc/error.hpp"

namespace cooc {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

double dual_objective(const Eigen::MatrixXd& kernel, std::span<const int> y,
                      std::span<const double> alpha) {
  double quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    lin += alpha[i];
    for (std::size_t j = 0; j < alpha.size(); ++j)
      quad += alpha[i] * alpha[j] * y[i] * y[j] *
              kernel(Eigen::Index(i), Eigen::Index(j));
  }
  return 0.5 * quad - lin;
}

BinaryDual solve_binary_svm(const Eigen::MatrixXd& kernel,
                            std::span<const int> y, const SvmOptions& opts) {
  const std::size_t l = y.size();
  if (kernel.rows() != Eigen::Index(l) || kernel.cols() != Eigen::Index(l))
    throw DataError("kernel size does not match label count");
  const double c = opts.c;
  auto q = [&](std::size_t i, std::size_t j) {
    return double(y[i] * y[j]) * kernel(Eigen::Index(i), Eigen::Index(j));
  };

  BinaryDual out;
  out.alpha.assign(l, 0.0);
  auto& alpha = out.alpha;
  std::vector<double> grad(l, -1.0);

  const auto in_up = [&](std::size_t t) {
    return (y[t] == +1 && alpha[t] < c) || (y[t] == -1 && alpha[t] > 0);
  };
  const auto in_low = [&](std::size_t t) {
    return (y[t] == +1 && alpha[t] > 0) || (y[t] == -1 && alpha[t] < c);
  };

  for (;;) {
    // Maximal violating pair, lowest indices on ties.
    constexpr auto none = std::numeric_limits<std::size_t>::max();
    std::size_t i = none, j = none;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < l; ++t) {
      const double v = -double(y[t]) * grad[t];
      if (in_up(t) && v > gmax) { gmax = v; i = t; }
      if (in_low(t) && v < gmin) { gmin = v; j = t; }
    }
    out.max_violation = (i == none || j == none) ? 0.0 : gmax - gmin;
    if (i == none || j == none || gmax - gmin < opts.tol) break;
    if (out.iterations >= opts.max_iter) break;
    ++out.iterations;

    const double old_i = alpha[i], old_j = alpha[j];
    const double qii = q(i, i), qjj = q(j, j), qij = q(i, j);
    if (y[i] != y[j]) {
      double quad = qii + qjj + 2 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
      }
    } else {
      double quad = qii + qjj - 2 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > c) {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < l; ++t) grad[t] += q(i, t) * di + q(j, t) * dj;
  }

  // Bias from free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < l; ++t) {
    const double yg = double(y[t]) * grad[t];
    if (alpha[t] >= c) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] == +1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  out.rho = n_free > 0 ? sum_free / double(n_free) : (ub + lb) / 2;
  return out;
}

SvmModel svm_train(const Eigen::MatrixXd& gram, std::span<const int> labels,
                   const SvmOptions& options) {
  const auto n = labels.size();
  if (gram.rows() != Eigen::Index(n) || gram.cols() != Eigen::Index(n))
    throw DataError("gram matrix is " + std::to_string(gram.rows()) + "x" +
                    std::to_string(gram.cols()) + " for " + std::to_string(n) +
                    " labels");
  if (!(options.c > 0)) throw ConfigError("svm C must be positive");
  if (!(options.tol > 0)) throw ConfigError("svm tolerance must be positive");
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j)
      if (std::abs(gram(i, j) - gram(j, i)) >
          1e-12 * (1.0 + std::abs(gram(i, j))))
        throw DataError("gram matrix is not symmetric");

  SvmModel model;
  model.classes.assign(labels.begin(), labels.end());
  std::sort(model.classes.begin(), model.classes.end());
  model.classes.erase(std::unique(model.classes.begin(), model.classes.end()),
                      model.classes.end());
  if (model.classes.size() < 2)
    throw ConfigError("svm training needs at least two classes");
  model.tol = options.tol;
  model.max_iter = options.max_iter;
  model.train_size = n;

  for (std::size_t a = 0; a < model.classes.size(); ++a)
    for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
      std::vector<std::size_t> rows;
      std::vector<int> y;
      for (std::size_t t = 0; t < n; ++t) {
        if (labels[t] == model.classes[a]) { rows.push_back(t); y.push_back(+1); }
        else if (labels[t] == model.classes[b]) { rows.push_back(t); y.push_back(-1); }
      }
      Eigen::MatrixXd sub(Eigen::Index(rows.size()), Eigen::Index(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t s = 0; s < rows.size(); ++s)
          sub(Eigen::Index(r), Eigen::Index(s)) =
              gram(Eigen::Index(rows[r]), Eigen::Index(rows[s]));
      const auto dual = solve_binary_svm(sub, y, options);

      PairModel pm;
      pm.first = a;
      pm.second = b;
      pm.rho = dual.rho;
      pm.c = options.c;
      pm.iterations = dual.iterations;
      pm.max_violation = dual.max_violation;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (dual.alpha[r] <= 0) continue;
        pm.support.push_back(rows[r]);
        pm.coef.push_back(dual.alpha[r] * y[r]);
      }
      model.pairs.push_back(std::move(pm));
    }
  return model;
}

std::vector<int> svm_predict(const SvmModel& model,
                             const Eigen::MatrixXd& kernel) {
  if (kernel.cols() != Eigen::Index(model.train_size))
    throw DataError("kernel rows have " + std::to_string(kernel.cols()) +
                    " columns, model was trained on " +
                    std::to_string(model.train_size));
  const auto nc = model.classes.size();
  std::vector<int> out;
  out.reserve(std::size_t(kernel.rows()));
  std::vector<std::size_t> votes(nc);
  std::vector<double> strength(nc);
  for (Eigen::Index q = 0; q < kernel.rows(); ++q) {
    std::fill(votes.begin(), votes.end(), 0);
    std::fill(strength.begin(), strength.end(), 0.0);
    for (const auto& pm : model.pairs) {
      double d = -pm.rho;
      for (std::size_t s = 0; s < pm.support.size(); ++s)
        d += pm.coef[s] * kernel(q, Eigen::Index(pm.support[s]));
      const auto winner = d > 0 ? pm.first : pm.second;
      ++votes[winner];
      strength[winner] += std::abs(d);
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < nc; ++c)
      if (votes[c] > votes[best] ||
          (votes[c] == votes[best] && strength[c] > strength[best]))
        best = c;
    out.push_back(model.classes[best]);
  }
  return out;
}

}  // namespace cooc
