#include <cmath>

#include "cooc/classify.hpp"
#include "cooc/error.hpp"
#include "cooc/parallel.hpp"

namespace cooc {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DataError("distance between vectors of length " +
                    std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
}

}  // namespace

double chi2_distance(std::span<const double> h1, std::span<const double> h2) {
  check_lengths(h1, h2);
  double d = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    if (h1[i] < 0 || h2[i] < 0)
      throw DataError("chi2 distance of a histogram with a negative bin");
    const double s = h1[i] + h2[i];
    if (s == 0) continue;
    const double diff = h1[i] - h2[i];
    d += diff * diff / s;
  }
  return 0.5 * d;
}

double l2_distance(std::span<const double> v1, std::span<const double> v2) {
  check_lengths(v1, v2);
  double d = 0.0;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    const double diff = v1[i] - v2[i];
    d += diff * diff;
  }
  return d;
}

std::string_view distance_name(DistanceKind d) {
  switch (d) {
    case DistanceKind::chi2: return "chi2";
    case DistanceKind::l2_squared: return "l2";
    case DistanceKind::l2: return "l2_norm";
  }
  return "?";
}

DistanceKind parse_distance(std::string_view name) {
  for (auto d : {DistanceKind::chi2, DistanceKind::l2_squared, DistanceKind::l2})
    if (distance_name(d) == name) return d;
  throw ConfigError("unknown distance '" + std::string(name) +
                    "' (expected chi2, l2 or l2_norm)");
}

DistanceKind default_distance(Channel c) {
  return c == Channel::bovw || c == Channel::boc ? DistanceKind::chi2
                                                 : DistanceKind::l2_squared;
}

double channel_distance(DistanceKind kind, std::span<const double> a,
                        std::span<const double> b) {
  switch (kind) {
    case DistanceKind::chi2: return chi2_distance(a, b);
    case DistanceKind::l2_squared: return l2_distance(a, b);
    case DistanceKind::l2: return std::sqrt(l2_distance(a, b));
  }
  return 0.0;
}

ChannelConfig ChannelConfig::with_channels(const std::vector<Channel>& channels) {
  ChannelConfig cfg;
  for (auto c : channels) cfg.channels.push_back({c, default_distance(c), 1.0});
  return cfg;
}

ChannelConfig fit_normalizers(const std::vector<ChannelFeatures>& training,
                              ChannelConfig config) {
  const auto n = training.size();
  if (n < 2) throw DataError("normalizers need at least 2 training videos");
  for (auto& spec : config.channels) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        sum += channel_distance(spec.distance, training[i].at(spec.channel),
                                training[j].at(spec.channel));
    const double mean = sum / (double(n) * double(n - 1) / 2.0);
    if (!(mean > 0) || !std::isfinite(mean))
      throw DataError("channel " + std::string(channel_name(spec.channel)) +
                      " is degenerate: mean training distance is " +
                      std::to_string(mean));
    spec.omega = mean;
  }
  return config;
}

double combined_kernel(const ChannelFeatures& x, const ChannelFeatures& y,
                       const ChannelConfig& config) {
  double s = 0.0;
  for (const auto& spec : config.channels)
    s += channel_distance(spec.distance, x.at(spec.channel), y.at(spec.channel)) /
         spec.omega;
  return std::exp(-s);
}

Eigen::MatrixXd gram_matrix(const std::vector<ChannelFeatures>& features,
                            const ChannelConfig& config, unsigned threads) {
  const auto n = Eigen::Index(features.size());
  Eigen::MatrixXd k(n, n);
  parallel_for(features.size(), threads, [&](std::size_t i) {
    const auto r = Eigen::Index(i);
    k(r, r) = combined_kernel(features[i], features[i], config);
    for (std::size_t j = i + 1; j < features.size(); ++j) {
      const double v = combined_kernel(features[i], features[j], config);
      k(r, Eigen::Index(j)) = v;
      k(Eigen::Index(j), r) = v;
    }
  });
  return k;
}

Eigen::MatrixXd kernel_rows(const std::vector<ChannelFeatures>& queries,
                            const std::vector<ChannelFeatures>& training,
                            const ChannelConfig& config, unsigned threads) {
  Eigen::MatrixXd k(Eigen::Index(queries.size()), Eigen::Index(training.size()));
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < training.size(); ++j)
      k(Eigen::Index(i), Eigen::Index(j)) =
          combined_kernel(queries[i], training[j], config);
  });
  return k;
}

}  // namespace cooc
