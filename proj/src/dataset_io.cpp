#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cooc/datamodel.hpp"
#include "cooc/error.hpp"
#include "detail/validate.hpp"

namespace cooc {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line,
                          const std::string& msg) {
  std::ostringstream out;
  out << path.string() << ":" << line << ": " << msg;
  throw DataError(out.str());
}

LabeledVideo parse_record(const nlohmann::json& rec) {
  if (!rec.is_object()) throw DataError("record is not an object");
  LabeledVideo v;
  v.video_id = rec.at("video_id").get<std::string>();
  if (auto it = rec.find("class"); it != rec.end() && !it->is_null())
    v.action_class = it->get<std::string>();
  if (auto it = rec.find("group"); it != rec.end() && !it->is_null())
    v.group = it->get<std::string>();
  v.extent.width = rec.at("width").get<std::int64_t>();
  v.extent.height = rec.at("height").get<std::int64_t>();
  v.extent.frames = rec.at("frames").get<std::int64_t>();

  const auto& pts = rec.at("points");
  if (!pts.is_array()) throw DataError("'points' is not an array");
  v.points.reserve(pts.size());
  for (const auto& p : pts) {
    if (!p.is_array() || p.size() < 4)
      throw DataError("point must be an array [x, y, t, scale, d1..dl]");
    for (const auto& x : p)
      if (!x.is_number()) throw DataError("non-numeric point component");
    InterestPoint ip;
    ip.x = p[0].get<double>();
    ip.y = p[1].get<double>();
    ip.t = p[2].get<double>();
    ip.scale = p[3].get<double>();
    ip.descriptor.reserve(p.size() - 4);
    for (std::size_t i = 4; i < p.size(); ++i)
      ip.descriptor.push_back(p[i].get<double>());
    v.points.push_back(std::move(ip));
  }
  if (auto it = rec.find("labels"); it != rec.end() && !it->is_null()) {
    for (const auto& l : *it) {
      const auto word = l.get<std::int64_t>();
      if (word < 1) throw DataError("labels are 1-based positive integers");
      v.labels.push_back(static_cast<WordIndex>(word - 1));
    }
  }
  return v;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file '" + path.string() + "'");

  std::vector<LabeledVideo> videos;
  std::optional<std::size_t> descriptor_len;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    LabeledVideo v;
    try {
      v = parse_record(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      fail_at(path, line_no, e.what());
    } catch (const DataError& e) {
      fail_at(path, line_no, e.what());
    }
    if (auto msg = detail::check_video(v, descriptor_len); !msg.empty())
      fail_at(path, line_no, msg);
    if (!ids.insert(v.video_id).second)
      fail_at(path, line_no, "duplicate video_id '" + v.video_id + "'");
    videos.push_back(std::move(v));
  }
  if (videos.empty())
    throw DataError(path.string() + ": empty feature file");
  return Dataset(std::move(videos));
}

std::string video_to_record(const LabeledVideo& v) {
  ordered_json rec;
  rec["video_id"] = v.video_id;
  if (!v.action_class.empty()) rec["class"] = v.action_class;
  if (v.group) rec["group"] = *v.group;
  rec["width"] = v.extent.width;
  rec["height"] = v.extent.height;
  rec["frames"] = v.extent.frames;
  ordered_json pts = ordered_json::array();
  for (const auto& p : v.points) {
    ordered_json row = ordered_json::array();
    row.push_back(p.x);
    row.push_back(p.y);
    row.push_back(p.t);
    row.push_back(p.scale);
    for (double d : p.descriptor) row.push_back(d);
    pts.push_back(std::move(row));
  }
  rec["points"] = std::move(pts);
  if (!v.labels.empty()) {
    ordered_json labels = ordered_json::array();
    for (auto l : v.labels) labels.push_back(std::int64_t{l} + 1);
    rec["labels"] = std::move(labels);
  }
  return rec.dump();
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write feature file '" + path.string() + "'");
  for (const auto& v : dataset.videos()) out << video_to_record(v) << '\n';
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace cooc
