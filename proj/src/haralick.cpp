#include <cmath>

#include "cooc/characterize.hpp"
#include "cooc/error.hpp"

namespace cooc {

namespace {

double plogp(double p) { return p > 0 ? p * std::log2(p) : 0.0; }

}  // namespace

// Haralick f1..f13 with 1-based gray levels. Sum variance is taken about the
// sum average; f13 is evaluated base-independently as 1 - 2^(-2 (HXY2 - HXY))
// with bit entropies.
std::array<double, kHaralickCount> haralick_slice(const std::vector<double>& m,
                                                  std::size_t n) {
  if (m.size() != n * n)
    throw ConfigError("haralick: matrix is not " + std::to_string(n) + "x" +
                      std::to_string(n));
  double total = 0.0;
  for (double v : m) {
    if (!std::isfinite(v) || v < 0)
      throw DataError("haralick: entries must be finite and nonnegative");
    total += v;
  }
  std::array<double, kHaralickCount> f{};
  if (total == 0.0) return f;

  std::vector<double> p(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = m[i] / total;
  auto P = [&](std::size_t i, std::size_t j) { return p[i * n + j]; };

  std::vector<double> px(n, 0.0), py(n, 0.0);
  std::vector<double> psum(2 * n + 1, 0.0), pdiff(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = P(i, j);
      px[i] += v;
      py[j] += v;
      psum[i + j + 2] += v;
      pdiff[i > j ? i - j : j - i] += v;
    }

  double mux = 0, muy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mux += double(i + 1) * px[i];
    muy += double(i + 1) * py[i];
  }
  double varx = 0, vary = 0;
  for (std::size_t i = 0; i < n; ++i) {
    varx += (double(i + 1) - mux) * (double(i + 1) - mux) * px[i];
    vary += (double(i + 1) - muy) * (double(i + 1) - muy) * py[i];
  }

  double asm_ = 0, contrast = 0, cross = 0, idm = 0, entropy = 0, hxy1 = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = P(i, j);
      if (v == 0) continue;
      const double d = double(i) - double(j);
      asm_ += v * v;
      contrast += d * d * v;
      cross += (double(i + 1) - mux) * (double(j + 1) - muy) * v;
      idm += v / (1.0 + d * d);
      entropy -= v * std::log2(v);
      hxy1 -= v * std::log2(px[i] * py[j]);
    }

  double sum_avg = 0, sum_entropy = 0;
  for (std::size_t k = 2; k <= 2 * n; ++k) {
    sum_avg += double(k) * psum[k];
    sum_entropy -= plogp(psum[k]);
  }
  double sum_var = 0;
  for (std::size_t k = 2; k <= 2 * n; ++k)
    sum_var += (double(k) - sum_avg) * (double(k) - sum_avg) * psum[k];

  double diff_mean = 0, diff_entropy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    diff_mean += double(k) * pdiff[k];
    diff_entropy -= plogp(pdiff[k]);
  }
  double diff_var = 0;
  for (std::size_t k = 0; k < n; ++k)
    diff_var += (double(k) - diff_mean) * (double(k) - diff_mean) * pdiff[k];

  double hx = 0, hy = 0, hxy2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    hx -= plogp(px[i]);
    hy -= plogp(py[i]);
    for (std::size_t j = 0; j < n; ++j) hxy2 -= plogp(px[i] * py[j]);
  }

  // Variances at rounding level mean a constant marginal.
  const double var_floor = 1e-12 * double(n * n);
  const double sigma =
      varx > var_floor && vary > var_floor ? std::sqrt(varx) * std::sqrt(vary) : 0.0;
  const double hmax = std::max(hx, hy);

  f[0] = asm_;
  f[1] = contrast;
  f[2] = sigma > 0 ? cross / sigma : 0.0;
  f[3] = varx;
  f[4] = idm;
  f[5] = sum_avg;
  f[6] = sum_var;
  f[7] = sum_entropy;
  f[8] = entropy;
  f[9] = diff_var;
  f[10] = diff_entropy;
  f[11] = hmax > 0 ? (entropy - hxy1) / hmax : 0.0;
  f[12] = std::sqrt(std::max(0.0, 1.0 - std::exp2(-2.0 * (hxy2 - entropy))));
  return f;
}

std::vector<double> haralick_vector(const Correlogram& cg) {
  const auto k = cg.k_star();
  std::vector<double> out;
  out.reserve(kHaralickCount * cg.kernel_count());
  std::vector<double> slice(k * k);
  for (std::size_t r = 0; r < cg.kernel_count(); ++r) {
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) slice[a * k + b] = cg.value(r, a, b);
    const auto f = haralick_slice(slice, k);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

}  // namespace cooc
