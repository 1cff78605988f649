#include "cooc/characterize.hpp"

#include "cooc/error.hpp"
#include "cooc/vocabulary.hpp"

namespace cooc {

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::bovw: return "bovw";
    case Channel::boc: return "boc";
    case Channel::hara: return "hara";
    case Channel::pcacooc: return "pcacooc";
  }
  return "?";
}

Channel parse_channel(std::string_view name) {
  for (auto c : kAllChannels)
    if (channel_name(c) == name) return c;
  throw ConfigError("unknown channel '" + std::string(name) +
                    "' (expected bovw, boc, hara or pcacooc)");
}

const std::vector<double>& ChannelFeatures::at(Channel c) const {
  auto it = channels.find(c);
  if (it == channels.end())
    throw DataError("video '" + video_id + "' lacks channel " +
                    std::string(channel_name(c)));
  return it->second;
}

std::vector<double> bovw(const LabeledVideo& video, std::size_t k_star) {
  if (!video.labeled())
    throw DataError("video '" + video.video_id + "' is not labeled");
  std::vector<double> h(k_star, 0.0);
  for (auto l : video.labels) {
    if (l >= k_star)
      throw DataError("video '" + video.video_id + "' has label beyond K*");
    h[l] += 1.0;
  }
  if (!video.labels.empty())
    for (auto& v : h) v /= double(video.labels.size());
  return h;
}

Correlations fit_correlations(const std::vector<CorrelogramElement>& elements,
                              std::size_t q, std::uint64_t seed,
                              unsigned threads) {
  if (q == 0) throw ConfigError("correlation count must be at least 1");
  if (q > elements.size())
    throw ConfigError("correlation count " + std::to_string(q) +
                      " exceeds the " + std::to_string(elements.size()) +
                      " correlogram elements available");
  const auto j = elements.front().profile.size();
  RowMatrix x(Eigen::Index(elements.size()), Eigen::Index(j));
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].profile.size() != j)
      throw DataError("correlogram elements differ in kernel count");
    for (std::size_t r = 0; r < j; ++r)
      x(Eigen::Index(i), Eigen::Index(r)) = elements[i].profile[r];
  }
  KMeansOptions opts;
  opts.threads = threads;
  return Correlations{kmeans(x, q, seed, opts).centroids};
}

std::vector<double> boc(const Correlogram& cg, const Correlations& u) {
  if (cg.kernel_count() != u.kernel_count())
    throw DataError("correlogram has " + std::to_string(cg.kernel_count()) +
                    " kernels but correlations expect " +
                    std::to_string(u.kernel_count()));
  std::vector<double> h(u.size(), 0.0);
  const auto k = cg.k_star();
  if (k == 0) return h;
  std::vector<double> profile(cg.kernel_count());
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      for (std::size_t r = 0; r < cg.kernel_count(); ++r)
        profile[r] = cg.value(r, a, b);
      h[nearest_row(u.centers, profile.data())] += 1.0;
    }
  for (auto& v : h) v /= double(k * k);
  return h;
}

}  // namespace cooc
