#include "cooc/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cooc/error.hpp"
#include "cooc/parallel.hpp"
#include "cooc/vocabulary.hpp"
#include "detail/validate.hpp"

namespace cooc {

namespace detail {

std::string check_video(const LabeledVideo& v,
                        std::optional<std::size_t>& descriptor_len) {
  std::ostringstream err;
  if (v.video_id.empty()) return "empty video_id";
  if (v.extent.width < 0 || v.extent.height < 0 || v.extent.frames < 0) {
    err << "video '" << v.video_id << "': negative extent";
    return err.str();
  }
  if (!v.labels.empty() && v.labels.size() != v.points.size()) {
    err << "video '" << v.video_id << "': " << v.labels.size()
        << " labels for " << v.points.size() << " points";
    return err.str();
  }
  for (std::size_t i = 0; i < v.points.size(); ++i) {
    const auto& p = v.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.t) ||
        !std::isfinite(p.scale)) {
      err << "video '" << v.video_id << "' point " << i
          << ": non-finite value";
      return err.str();
    }
    for (double d : p.descriptor) {
      if (!std::isfinite(d)) {
        err << "video '" << v.video_id << "' point " << i
            << ": non-finite descriptor value";
        return err.str();
      }
    }
    if (p.x < 0 || p.y < 0 || p.t < 0 || p.x > double(v.extent.width) ||
        p.y > double(v.extent.height) || p.t > double(v.extent.frames)) {
      err << "video '" << v.video_id << "' point " << i
          << ": outside extent " << v.extent.width << "x" << v.extent.height
          << "x" << v.extent.frames;
      return err.str();
    }
    if (!(p.scale > 0)) {
      err << "video '" << v.video_id << "' point " << i
          << ": scale must be positive";
      return err.str();
    }
    if (!descriptor_len) {
      descriptor_len = p.descriptor.size();
    } else if (*descriptor_len != p.descriptor.size()) {
      err << "video '" << v.video_id << "' point " << i
          << ": descriptor length " << p.descriptor.size() << ", expected "
          << *descriptor_len;
      return err.str();
    }
  }
  return {};
}

}  // namespace detail

Dataset::Dataset(std::vector<LabeledVideo> videos) : videos_(std::move(videos)) {
  if (videos_.empty()) throw DataError("dataset has no videos");
  std::optional<std::size_t> len;
  std::set<std::string> ids;
  std::set<std::string> classes;
  for (const auto& v : videos_) {
    if (auto msg = detail::check_video(v, len); !msg.empty())
      throw DataError(msg);
    if (!ids.insert(v.video_id).second)
      throw DataError("duplicate video_id '" + v.video_id + "'");
    if (!v.action_class.empty()) classes.insert(v.action_class);
  }
  class_set_.assign(classes.begin(), classes.end());
  descriptor_len_ = len.value_or(0);
}

std::size_t Dataset::total_points() const {
  std::size_t n = 0;
  for (const auto& v : videos_) n += v.points.size();
  return n;
}

std::size_t Dataset::class_index(const std::string& name) const {
  auto it = std::lower_bound(class_set_.begin(), class_set_.end(), name);
  if (it == class_set_.end() || *it != name)
    throw DataError("unknown class '" + name + "'");
  return static_cast<std::size_t>(it - class_set_.begin());
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  std::vector<LabeledVideo> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(videos_.at(i));
  Dataset d(std::move(out));
  // An all-empty subset would otherwise lose the descriptor length.
  if (d.descriptor_len_ == 0) d.descriptor_len_ = descriptor_len_;
  return d;
}

LabeledVideo label_points(const LabeledVideo& video, const Vocabulary& vocab) {
  if (vocab.size() == 0) throw ConfigError("empty vocabulary");
  LabeledVideo out = video;
  out.labels.resize(video.points.size());
  for (std::size_t i = 0; i < video.points.size(); ++i) {
    const auto& d = video.points[i].descriptor;
    if (d.size() != vocab.dim()) {
      std::ostringstream msg;
      msg << "video '" << video.video_id << "': descriptor length "
          << d.size() << " does not match vocabulary dimension "
          << vocab.dim();
      throw DataError(msg.str());
    }
    out.labels[i] = static_cast<WordIndex>(nearest_row(vocab.centroids, d.data()));
  }
  return out;
}

Dataset label_dataset(const Dataset& dataset, const Vocabulary& vocab,
                      unsigned threads) {
  std::vector<LabeledVideo> out(dataset.size());
  parallel_for(dataset.size(), threads, [&](std::size_t i) {
    out[i] = label_points(dataset.videos()[i], vocab);
  });
  Dataset d(std::move(out));
  return d;
}

}  // namespace cooc
