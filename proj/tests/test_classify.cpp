#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "cooc/classify.hpp"
#include "cooc/error.hpp"
#include "support.hpp"

using namespace cooc;

namespace {

ChannelFeatures feat(std::vector<double> bovw_v, std::vector<double> hara_v = {}) {
  ChannelFeatures f;
  f.video_id = "v";
  f.channels[Channel::bovw] = std::move(bovw_v);
  if (!hara_v.empty()) f.channels[Channel::hara] = std::move(hara_v);
  return f;
}

// Euclidean projection onto {0 <= a <= c, y'a = 0} by bisection on the
// multiplier.
std::vector<double> project(const std::vector<double>& v, std::span<const int> y, double c) {
  auto at = [&](double lam) {
    std::vector<double> a(v.size());
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      a[i] = std::clamp(v[i] - lam * y[i], 0.0, c);
      s += a[i] * y[i];
    }
    return std::pair{a, s};
  };
  double lo = -1e6, hi = 1e6;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (at(mid).second > 0 ? lo : hi) = mid;
  }
  return at(0.5 * (lo + hi)).first;
}

// Accelerated projected gradient on the SVM dual; an oracle independent of
// the SMO working-set logic.
double dual_oracle(const Eigen::MatrixXd& k, std::span<const int> y, double c) {
  const auto n = std::size_t(k.rows());
  Eigen::MatrixXd q(k.rows(), k.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      q(Eigen::Index(i), Eigen::Index(j)) = y[i] * y[j] * k(Eigen::Index(i), Eigen::Index(j));
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues().maxCoeff();
  const double step = 1.0 / std::max(lmax, 1e-9);
  std::vector<double> a(n, 0.0), z = a, prev = a;
  double t = 1;
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = -1;
      for (std::size_t j = 0; j < n; ++j) g[i] += q(Eigen::Index(i), Eigen::Index(j)) * z[j];
    }
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] - step * g[i];
    prev = a;
    a = project(v, y, c);
    const double tn = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
    for (std::size_t i = 0; i < n; ++i) z[i] = a[i] + (t - 1) / tn * (a[i] - prev[i]);
    t = tn;
  }
  return dual_objective(k, y, a);
}

Eigen::MatrixXd rbf(const std::vector<Eigen::Vector2d>& pts, double gamma) {
  Eigen::MatrixXd k(Eigen::Index(pts.size()), Eigen::Index(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      k(Eigen::Index(i), Eigen::Index(j)) = std::exp(-gamma * (pts[i] - pts[j]).squaredNorm());
  return k;
}

// KKT at tolerance: y_i grad_i ordering between the up and low sets.
void check_kkt(const Eigen::MatrixXd& k, std::span<const int> y, const BinaryDual& d,
               double c, double tol) {
  const auto n = y.size();
  double sum = 0, m_up = -1e300, m_low = 1e300;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(d.alpha[i] >= 0.0);
    CHECK(d.alpha[i] <= c);
    sum += d.alpha[i] * y[i];
    double g = -1;
    for (std::size_t j = 0; j < n; ++j)
      g += y[i] * y[j] * k(Eigen::Index(i), Eigen::Index(j)) * d.alpha[j];
    const double v = -y[i] * g;
    const bool up = (y[i] == 1 && d.alpha[i] < c) || (y[i] == -1 && d.alpha[i] > 0);
    const bool low = (y[i] == 1 && d.alpha[i] > 0) || (y[i] == -1 && d.alpha[i] < c);
    if (up) m_up = std::max(m_up, v);
    if (low) m_low = std::min(m_low, v);
  }
  CHECK(std::abs(sum) <= 1e-6);
  CHECK(m_up - m_low < tol);
}

}  // namespace

TEST_CASE("chi2 distance") {
  const std::vector<double> a{1, 0}, b{0, 1};
  CHECK(chi2_distance(a, a) == 0.0);
  CHECK(chi2_distance(a, b) == doctest::Approx(1.0));
  const std::vector<double> c{0.5, 0.5, 0}, d{0.5, 0, 0.5};
  CHECK(chi2_distance(c, d) == doctest::Approx(0.5));
  const std::vector<double> neg{-1, 2};
  CHECK_THROWS_AS(chi2_distance(neg, a), DataError);
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(chi2_distance(a, three), DataError);
}

TEST_CASE("chi2 of L1-normalized histograms ignores common scaling") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(6), b(6);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    auto norm = [](std::vector<double> v) {
      const double s = std::accumulate(v.begin(), v.end(), 0.0);
      for (auto& x : v) x /= s;
      return v;
    };
    auto scaled = [](std::vector<double> v, double s) {
      for (auto& x : v) x *= s;
      return v;
    };
    CHECK(chi2_distance(norm(a), norm(b)) ==
          doctest::Approx(chi2_distance(norm(scaled(a, 7.5)), norm(scaled(b, 7.5)))));
  }
}

TEST_CASE("l2 distance is squared") {
  const std::vector<double> a{0, 0}, b{3, 4};
  CHECK(l2_distance(a, b) == 25.0);
  CHECK(l2_distance(b, a) == 25.0);
  CHECK(channel_distance(DistanceKind::l2, a, b) == 5.0);
  CHECK(parse_distance("l2") == DistanceKind::l2_squared);
  CHECK(parse_distance("l2_norm") == DistanceKind::l2);
  CHECK_THROWS_AS(parse_distance("cosine"), ConfigError);
  CHECK(default_distance(Channel::boc) == DistanceKind::chi2);
  CHECK(default_distance(Channel::pcacooc) == DistanceKind::l2_squared);
}

TEST_CASE("normalizers are mean training distances") {
  std::vector<ChannelFeatures> tr{feat({0}), feat({1}), feat({3})};
  auto cfg = ChannelConfig::with_channels({Channel::bovw});
  cfg.channels[0].distance = DistanceKind::l2;
  CHECK(fit_normalizers(tr, cfg).channels[0].omega == doctest::Approx(2.0));
  const std::vector<ChannelFeatures> two{feat({1, 0}), feat({0, 1})};
  CHECK(fit_normalizers(two, ChannelConfig::with_channels({Channel::bovw})).channels[0].omega ==
        doctest::Approx(1.0));
  const std::vector<ChannelFeatures> same{feat({1, 0}), feat({1, 0})};
  CHECK_THROWS_AS(fit_normalizers(same, ChannelConfig::with_channels({Channel::bovw})),
                  DataError);
  CHECK_THROWS_AS(fit_normalizers({feat({1})}, ChannelConfig::with_channels({Channel::bovw})),
                  DataError);
}

TEST_CASE("combined kernel") {
  auto cfg = ChannelConfig::with_channels({Channel::bovw, Channel::hara});
  cfg.channels[0].omega = 0.5;
  cfg.channels[1].omega = 3.0;
  const auto x = feat({1, 0}, {0, 0});
  const auto y = feat({0, 1}, {1, 2});
  CHECK(combined_kernel(x, x, cfg) == 1.0);
  CHECK(combined_kernel(x, y, cfg) == combined_kernel(y, x, cfg));

  auto single = ChannelConfig::with_channels({Channel::bovw});
  single.channels[0].omega = 1.0;  // chi2 distance of x, y is 1
  CHECK(combined_kernel(x, y, single) == doctest::Approx(std::exp(-1.0)));

  // exp of sum is the product of single-channel kernels.
  ChannelConfig only_hara;
  only_hara.channels = {cfg.channels[1]};
  ChannelConfig only_bovw;
  only_bovw.channels = {cfg.channels[0]};
  const double both = combined_kernel(x, y, cfg);
  CHECK(std::abs(both - combined_kernel(x, y, only_bovw) * combined_kernel(x, y, only_hara)) <=
        1e-12);
  // Removing a channel removes exactly its term.
  CHECK(std::abs(combined_kernel(x, y, only_bovw) - both * std::exp(5.0 / 3.0)) <= 1e-12);
  CHECK_THROWS_AS(combined_kernel(feat({1, 0}), y, cfg), DataError);
}

TEST_CASE("gram matrix is symmetric, unit-diagonal and PSD") {
  const auto d = synth_dataset(default_synth_spec(10), 4);
  std::vector<ChannelFeatures> fs;
  const KernelSet ks({{3, 3, 3}, {9, 9, 9}});
  for (const auto& v : d.videos()) {
    ChannelFeatures f;
    f.video_id = v.video_id;
    f.channels[Channel::bovw] = bovw(v, 4);
    f.channels[Channel::hara] = haralick_vector(correlogram(v, ks, 4));
    fs.push_back(f);
  }
  const auto cfg = fit_normalizers(fs, ChannelConfig::with_channels({Channel::bovw, Channel::hara}));
  const auto g = gram_matrix(fs, cfg);
  REQUIRE(g.rows() == 20);
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index i = 0; i < 20; ++i) CHECK(g(i, i) == 1.0);
  const auto ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues();
  CHECK(ev.minCoeff() >= -1e-8 * g.trace());
  CHECK(gram_matrix(fs, cfg, 6) == g);
  CHECK(kernel_rows(fs, fs, cfg, 3) == g);
  CHECK(gram_matrix({fs[0]}, cfg) == Eigen::MatrixXd::Ones(1, 1));
}

TEST_CASE("two-point svm has the closed-form solution") {
  for (double kv : {0.0, 0.3, 0.9}) {
    for (double c : {0.5, 1.0, 100.0}) {
      Eigen::MatrixXd k(2, 2);
      k << 1, kv, kv, 1;
      const std::vector<int> y{1, -1};
      const auto d = solve_binary_svm(k, y, {c, 1e-6, 100000});
      const double expect = std::min(c, 1.0 / (1.0 - kv));
      CHECK(d.alpha[0] == doctest::Approx(expect).epsilon(1e-6));
      CHECK(d.alpha[1] == doctest::Approx(expect).epsilon(1e-6));
      const std::vector<int> labels{0, 1};
      const auto m = svm_train(k, labels, {c, 1e-6, 100000});
      CHECK(m.pairs[0].support.size() == 2);
      CHECK(svm_predict(m, k) == labels);
    }
  }
}

TEST_CASE("six-point separable problem matches the dual oracle") {
  const std::vector<Eigen::Vector2d> pts{{0, 0}, {0, 1}, {1, 0}, {3, 3}, {3, 4}, {4, 3}};
  const std::vector<int> y{1, 1, 1, -1, -1, -1};
  const auto k = rbf(pts, 0.2);
  const SvmOptions opts{10.0, 1e-6, 100000};
  const auto d = solve_binary_svm(k, y, opts);
  CHECK(std::abs(dual_objective(k, y, d.alpha) - dual_oracle(k, y, 10.0)) <= 1e-4);
  check_kkt(k, y, d, 10.0, 1e-6);
  const std::vector<int> labels{0, 0, 0, 1, 1, 1};
  CHECK(svm_predict(svm_train(k, labels, opts), k) == labels);
}

TEST_CASE("smo on random small problems") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0, 1);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + rng() % 7;
    std::vector<Eigen::Vector2d> pts(n);
    for (auto& p : pts) p = {g(rng), g(rng)};
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 ? -1 : 1;
    const double c = t % 3 == 0 ? 0.1 : (t % 3 == 1 ? 1.0 : 10.0);
    const auto k = rbf(pts, 0.5);
    const auto d = solve_binary_svm(k, y, {c, 1e-3, 100000});
    CHECK(dual_objective(k, y, d.alpha) <= dual_oracle(k, y, c) + 1e-4);
    check_kkt(k, y, d, c, 1e-3);
  }
}

TEST_CASE("svm training errors") {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3);
  const std::vector<int> one{0, 0, 0};
  CHECK_THROWS_AS(svm_train(k, one), ConfigError);
  k(0, 1) = 0.5;
  const std::vector<int> two{0, 1, 1};
  CHECK_THROWS_AS(svm_train(k, two), DataError);
  const auto m = svm_train(Eigen::MatrixXd::Identity(3, 3), two);
  CHECK_THROWS_AS(svm_predict(m, Eigen::MatrixXd::Identity(2, 2)), DataError);
  CHECK_THROWS_AS(svm_train(Eigen::MatrixXd::Identity(3, 3), two, {0.0, 1e-3, 10}),
                  ConfigError);
}

TEST_CASE("one-vs-one multiclass and the vote tie rule") {
  // Three well separated clusters.
  std::vector<Eigen::Vector2d> pts;
  std::vector<int> labels;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 4; ++i) {
      pts.push_back({10.0 * c + 0.1 * i, 0.2 * i});
      labels.push_back(c);
    }
  const auto k = rbf(pts, 0.1);
  const auto m = svm_train(k, labels);
  CHECK(m.pairs.size() == 3);
  CHECK(svm_predict(m, k) == labels);
  for (const auto& pm : m.pairs) {
    double s = 0;
    for (std::size_t i = 0; i < pm.coef.size(); ++i) {
      s += pm.coef[i];
      CHECK(std::abs(pm.coef[i]) <= pm.c + 1e-12);
    }
    CHECK(std::abs(s) <= 1e-6);
  }

  // One vote each; summed |decision| decides, then the lowest class.
  SvmModel tie;
  tie.classes = {0, 1, 2};
  tie.train_size = 1;
  tie.pairs = {{0, 1, {}, {}, -1.0}, {0, 2, {}, {}, 2.0}, {1, 2, {}, {}, -3.0}};
  CHECK(svm_predict(tie, Eigen::MatrixXd::Zero(1, 1)) == std::vector<int>{1});
  tie.pairs = {{0, 1, {}, {}, -1.0}, {0, 2, {}, {}, 1.0}, {1, 2, {}, {}, -1.0}};
  CHECK(svm_predict(tie, Eigen::MatrixXd::Zero(1, 1)) == std::vector<int>{0});
}

TEST_CASE("evaluation report") {
  const std::vector<std::string> truth{"box", "box", "box", "wave", "wave", "wave",
                                       "wave", "run", "run", "run"};
  auto pred = truth;
  auto all = evaluate(pred, truth, "test");
  CHECK(all.overall_percent == 100.0);
  for (const auto& c : all.per_class) CHECK(c.accuracy_percent == 100.0);
  pred[4] = "box";
  const auto r = evaluate(pred, truth);
  CHECK(r.overall_percent == 90.0);
  double weighted = 0;
  for (std::size_t t = 0; t < r.per_class.size(); ++t) {
    weighted += r.per_class[t].accuracy_percent * double(r.per_class[t].support);
    std::size_t row = 0;
    for (auto n : r.confusion[t]) row += n;
    CHECK(row == r.per_class[t].support);
  }
  CHECK(weighted / 10.0 == doctest::Approx(r.overall_percent));
  CHECK(accuracy_table(r) == "class,accuracy_percent\nbox,100.00\nrun,100.00\nwave,75.00\n"
                             "overall,90.00\n");
  CHECK(confusion_table(r) == "truth,box,run,wave\nbox,3,0,0\nrun,0,3,0\nwave,1,0,3\n");
  CHECK_THROWS_AS(evaluate({}, {}), DataError);
  CHECK_THROWS_AS(evaluate({"a"}, {"a", "b"}), DataError);
  // A predicted class never seen in truth becomes a column only.
  const auto odd = evaluate({"zzz"}, {"a"});
  CHECK(odd.columns == std::vector<std::string>{"a", "zzz"});
  CHECK(odd.per_class.size() == 1);
}

TEST_CASE("stratified folds balance classes and are seeded") {
  std::vector<std::string> cls;
  for (int i = 0; i < 13; ++i) cls.push_back("a");
  for (int i = 0; i < 7; ++i) cls.push_back("b");
  const auto f = stratified_folds(cls, 4, 9);
  CHECK(f == stratified_folds(cls, 4, 9));
  std::vector<std::vector<int>> per(4, std::vector<int>(2, 0));
  for (std::size_t i = 0; i < cls.size(); ++i) ++per[f[i]][cls[i] == "b"];
  for (int c = 0; c < 2; ++c) {
    int lo = 100, hi = 0;
    for (int k = 0; k < 4; ++k) lo = std::min(lo, per[k][c]), hi = std::max(hi, per[k][c]);
    CHECK(hi - lo <= 1);
  }
  CHECK_THROWS_AS(stratified_folds(cls, 1, 0), ConfigError);
}

TEST_CASE("grouped folds never split a group") {
  std::vector<std::string> groups;
  for (int i = 0; i < 40; ++i) groups.push_back("s" + std::to_string(i % 9));
  const auto f = grouped_folds(groups, 3, 2);
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (std::size_t j = 0; j < groups.size(); ++j)
      if (groups[i] == groups[j]) CHECK(f[i] == f[j]);
  CHECK(std::set<std::size_t>(f.begin(), f.end()).size() == 3);
  CHECK_THROWS_AS(grouped_folds({"a", "b"}, 3, 0), ConfigError);
  CHECK_THROWS_AS(grouped_folds({"a", "", "b"}, 2, 0), ConfigError);
}
