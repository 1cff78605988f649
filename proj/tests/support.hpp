#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "cooc/datamodel.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cooc_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Labeled video with random positions in a small box. Integer coordinates
// when `integral` so boundary ties are common.
inline cooc::LabeledVideo random_video(std::mt19937_64& rng, std::size_t n,
                                       std::size_t k_star, bool integral,
                                       std::int64_t extent = 30,
                                       std::string id = "v") {
  cooc::LabeledVideo v;
  v.video_id = std::move(id);
  v.action_class = "a";
  v.extent = {extent, extent, extent};
  std::uniform_real_distribution<double> pos(0.0, double(extent));
  std::uniform_int_distribution<std::int64_t> ipos(0, extent);
  std::uniform_int_distribution<std::size_t> lab(0, k_star - 1);
  for (std::size_t i = 0; i < n; ++i) {
    cooc::InterestPoint p;
    if (integral) {
      p.x = double(ipos(rng));
      p.y = double(ipos(rng));
      p.t = double(ipos(rng));
    } else {
      p.x = pos(rng);
      p.y = pos(rng);
      p.t = pos(rng);
    }
    p.descriptor = {0.0};
    v.points.push_back(p);
    v.labels.push_back(cooc::WordIndex(lab(rng)));
  }
  return v;
}

inline cooc::InterestPoint point(double x, double y, double t,
                                 std::vector<double> d = {0.0}) {
  cooc::InterestPoint p;
  p.x = x;
  p.y = y;
  p.t = t;
  p.descriptor = std::move(d);
  return p;
}

}  // namespace testing
