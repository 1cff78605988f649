#include "cooc/bundle.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "cooc/error.hpp"

namespace cooc {

static_assert(std::endian::native == std::endian::little,
              "bundle arrays are written in host order");

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Array {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;  // row-major
};

class Writer {
public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, const Array& a) {
    const std::string file = name + ".f32";
    std::vector<float> buf(a.data.begin(), a.data.end());
    std::ofstream out(dir_ / file, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + (dir_ / file).string());
    out.write(reinterpret_cast<const char*>(buf.data()),
              std::streamsize(buf.size() * sizeof(float)));
    if (!out) throw DataError("short write on " + (dir_ / file).string());
    entries_.push_back({{"name", name}, {"file", file}, {"shape", {a.rows, a.cols}}});
  }

  ordered_json entries() const { return entries_; }

private:
  fs::path dir_;
  std::vector<ordered_json> entries_;
};

template <typename M>
Array from_matrix(const M& m) {
  Array a{std::size_t(m.rows()), std::size_t(m.cols()), {}};
  a.data.reserve(a.rows * a.cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.data.push_back(m(r, c));
  return a;
}

Array column(std::vector<double> v) {
  Array a{v.size(), 1, std::move(v)};
  return a;
}

RowMatrix to_matrix(const Array& a) {
  RowMatrix m(Eigen::Index(a.rows), Eigen::Index(a.cols));
  for (std::size_t i = 0; i < a.data.size(); ++i) m.data()[i] = a.data[i];
  return m;
}

Vector to_vector(const Array& a) {
  Vector v(Eigen::Index(a.data.size()));
  for (std::size_t i = 0; i < a.data.size(); ++i) v[Eigen::Index(i)] = a.data[i];
  return v;
}

std::size_t to_index(double x, const std::string& array) {
  if (!(x >= 0) || std::floor(x) != x)
    throw DataError("array '" + array + "' holds a non-index value");
  return std::size_t(x);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

void save_bundle(const FittedPipeline& model, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create bundle directory " + dir.string());
  Writer w(dir);

  w.add("base_centroids", from_matrix(model.base_vocabulary.centroids));
  w.add("centroids", from_matrix(model.vocabulary.centroids));
  std::vector<double> assignment(model.base_vocabulary.size(), 0.0);
  for (std::size_t r = 0; r < model.vocabulary.merged_from.size(); ++r)
    for (auto orig : model.vocabulary.merged_from[r]) assignment.at(orig) = double(r);
  w.add("reduced_assignment", column(assignment));
  if (model.correlations)
    w.add("correlation_centers", from_matrix(model.correlations->centers));
  if (model.pca) {
    w.add("pca_mean", from_matrix(model.pca->mean));
    w.add("pca_basis", from_matrix(model.pca->basis));
    w.add("pca_variance", from_matrix(model.pca->explained_variance));
  }
  std::vector<double> omega;
  for (const auto& s : model.channels.channels) omega.push_back(s.omega);
  w.add("normalizers", column(omega));

  std::vector<double> coef, sv, rho;
  ordered_json pairs = ordered_json::array();
  for (const auto& pm : model.svm.pairs) {
    coef.insert(coef.end(), pm.coef.begin(), pm.coef.end());
    for (auto s : pm.support) sv.push_back(double(s));
    rho.push_back(pm.rho);
    pairs.push_back({{"first", pm.first},
                     {"second", pm.second},
                     {"c", pm.c},
                     {"iterations", pm.iterations},
                     {"max_violation", pm.max_violation},
                     {"support_count", pm.support.size()}});
  }
  w.add("svm_coef", column(coef));
  w.add("svm_sv_index", column(sv));
  w.add("svm_rho", column(rho));

  ordered_json ids = ordered_json::array();
  for (const auto& f : model.training_features) ids.push_back(f.video_id);
  for (const auto& spec : model.channels.channels) {
    Array a;
    a.rows = model.training_features.size();
    a.cols = a.rows ? model.training_features.front().at(spec.channel).size() : 0;
    for (const auto& f : model.training_features) {
      const auto& v = f.at(spec.channel);
      a.data.insert(a.data.end(), v.begin(), v.end());
    }
    w.add("features_" + std::string(channel_name(spec.channel)), a);
  }

  ordered_json m;
  m["format_version"] = kBundleFormatVersion;
  m["created_by"] = "cooc";
  m["config"] = ordered_json::parse(config_to_json(model.config));
  m["class_names"] = model.class_names;
  ordered_json kernels = ordered_json::array();
  for (const auto& k : model.kernels.kernels())
    kernels.push_back({k.half_x, k.half_y, k.half_t});
  m["kernels"] = kernels;
  m["dimensions"] = {{"descriptor", model.base_vocabulary.dim()},
                     {"base_words", model.base_vocabulary.size()},
                     {"words", model.vocabulary.size()},
                     {"training_videos", model.training_features.size()}};
  ordered_json channels = ordered_json::array();
  for (const auto& s : model.channels.channels)
    channels.push_back({{"name", channel_name(s.channel)},
                        {"distance", distance_name(s.distance)}});
  m["channels"] = channels;
  m["svm"] = {{"classes", model.svm.classes},
              {"tol", model.svm.tol},
              {"max_iter", model.svm.max_iter},
              {"train_size", model.svm.train_size},
              {"pairs", pairs}};
  m["training"] = {{"video_ids", ids},
                   {"truth", model.training_truth},
                   {"predictions", model.training_predictions}};
  m["arrays"] = w.entries();

  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError("cannot write " + (dir / "manifest.json").string());
  out << m.dump(2) << "\n";
}

FittedPipeline load_bundle(const fs::path& dir) {
  using nlohmann::json;
  json m;
  try {
    m = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw DataError("bundle manifest: " + std::string(e.what()));
  }
  try {
    const int version = m.at("format_version").get<int>();
    if (version != kBundleFormatVersion)
      throw DataError("bundle format version " + std::to_string(version) +
                      " is not supported (expected " +
                      std::to_string(kBundleFormatVersion) + ")");

    std::map<std::string, Array> arrays;
    for (const auto& e : m.at("arrays")) {
      const auto name = e.at("name").get<std::string>();
      const auto file = e.at("file").get<std::string>();
      Array a;
      a.rows = e.at("shape").at(0).get<std::size_t>();
      a.cols = e.at("shape").at(1).get<std::size_t>();
      const auto path = dir / file;
      std::error_code ec;
      const auto bytes = fs::file_size(path, ec);
      const auto expected = a.rows * a.cols * sizeof(float);
      if (ec) throw DataError("array '" + name + "': cannot read " + path.string());
      if (bytes != expected)
        throw DataError("array '" + name + "' (" + file + "): expected " +
                        std::to_string(expected) + " bytes, found " +
                        std::to_string(bytes));
      std::vector<float> buf(a.rows * a.cols);
      std::ifstream in(path, std::ios::binary);
      in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(expected));
      if (!in) throw DataError("array '" + name + "': short read");
      a.data.assign(buf.begin(), buf.end());
      arrays.emplace(name, std::move(a));
    }
    auto get = [&](const std::string& name) -> const Array& {
      const auto it = arrays.find(name);
      if (it == arrays.end()) throw DataError("bundle lacks array '" + name + "'");
      return it->second;
    };

    FittedPipeline model;
    model.config = parse_config(m.at("config").dump());
    model.class_names = m.at("class_names").get<std::vector<std::string>>();
    std::vector<Kernel> kernels;
    for (const auto& k : m.at("kernels"))
      kernels.push_back({k.at(0).get<std::int64_t>(), k.at(1).get<std::int64_t>(),
                         k.at(2).get<std::int64_t>()});
    model.kernels = KernelSet(std::move(kernels));

    model.base_vocabulary = Vocabulary::from_centroids(to_matrix(get("base_centroids")));
    model.vocabulary.centroids = to_matrix(get("centroids"));
    model.vocabulary.merged_from.assign(model.vocabulary.size(), {});
    const auto& assignment = get("reduced_assignment");
    if (assignment.data.size() != model.base_vocabulary.size())
      throw DataError("array 'reduced_assignment' does not cover the base vocabulary");
    for (std::size_t w = 0; w < assignment.data.size(); ++w) {
      const auto r = to_index(assignment.data[w], "reduced_assignment");
      if (r >= model.vocabulary.size())
        throw DataError("array 'reduced_assignment' points past the vocabulary");
      model.vocabulary.merged_from[r].push_back(WordIndex(w));
    }

    if (arrays.count("correlation_centers"))
      model.correlations = Correlations{to_matrix(get("correlation_centers"))};
    if (arrays.count("pca_basis")) {
      PcaModel pca;
      pca.mean = to_vector(get("pca_mean"));
      pca.basis = to_matrix(get("pca_basis"));
      pca.explained_variance = to_vector(get("pca_variance"));
      model.pca = std::move(pca);
    }

    const auto& omega = get("normalizers");
    const auto& channels = m.at("channels");
    if (omega.data.size() != channels.size())
      throw DataError("array 'normalizers' does not match the channel list");
    for (std::size_t c = 0; c < channels.size(); ++c)
      model.channels.channels.push_back(
          {parse_channel(channels[c].at("name").get<std::string>()),
           parse_distance(channels[c].at("distance").get<std::string>()),
           omega.data[c]});
    if (model.config.uses(Channel::boc) && !model.correlations)
      throw DataError("bundle uses boc but lacks correlation centers");
    if (model.config.uses(Channel::pcacooc) && !model.pca)
      throw DataError("bundle uses pcacooc but lacks a PCA model");

    const auto& s = m.at("svm");
    model.svm.classes = s.at("classes").get<std::vector<int>>();
    model.svm.tol = s.at("tol").get<double>();
    model.svm.max_iter = s.at("max_iter").get<std::size_t>();
    model.svm.train_size = s.at("train_size").get<std::size_t>();
    const auto& coef = get("svm_coef");
    const auto& sv = get("svm_sv_index");
    const auto& rho = get("svm_rho");
    if (rho.data.size() != s.at("pairs").size() || coef.data.size() != sv.data.size())
      throw DataError("svm arrays do not match the manifest");
    std::size_t offset = 0, p = 0;
    for (const auto& pj : s.at("pairs")) {
      PairModel pm;
      pm.first = pj.at("first").get<std::size_t>();
      pm.second = pj.at("second").get<std::size_t>();
      pm.c = pj.at("c").get<double>();
      pm.iterations = pj.at("iterations").get<std::size_t>();
      pm.max_violation = pj.at("max_violation").get<double>();
      pm.rho = rho.data[p++];
      const auto n = pj.at("support_count").get<std::size_t>();
      if (offset + n > coef.data.size())
        throw DataError("array 'svm_coef' is shorter than the support counts");
      for (std::size_t i = 0; i < n; ++i, ++offset) {
        const auto idx = to_index(sv.data[offset], "svm_sv_index");
        if (idx >= model.svm.train_size)
          throw DataError("array 'svm_sv_index' points past the training set");
        pm.support.push_back(idx);
        pm.coef.push_back(coef.data[offset]);
      }
      model.svm.pairs.push_back(std::move(pm));
    }

    const auto& t = m.at("training");
    const auto ids = t.at("video_ids").get<std::vector<std::string>>();
    model.training_truth = t.at("truth").get<std::vector<std::string>>();
    model.training_predictions = t.at("predictions").get<std::vector<std::string>>();
    if (ids.size() != model.svm.train_size)
      throw DataError("training video list does not match the svm");
    model.training_features.resize(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
      model.training_features[i].video_id = ids[i];
    for (const auto& spec : model.channels.channels) {
      const auto name = "features_" + std::string(channel_name(spec.channel));
      const auto& a = get(name);
      if (a.rows != ids.size())
        throw DataError("array '" + name + "' has the wrong number of rows");
      for (std::size_t i = 0; i < a.rows; ++i)
        model.training_features[i].channels[spec.channel].assign(
            a.data.begin() + std::ptrdiff_t(i * a.cols),
            a.data.begin() + std::ptrdiff_t((i + 1) * a.cols));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bundle manifest: " + std::string(e.what()));
  }
}

}  // namespace cooc
