#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cooc/characterize.hpp"
#include "cooc/matrix.hpp"

namespace cooc {

// --- distances -------------------------------------------------------------

/// (1/2) sum (a - b)^2 / (a + b) over bins with a + b > 0.
double chi2_distance(std::span<const double> h1, std::span<const double> h2);

/// Squared Euclidean distance.
double l2_distance(std::span<const double> v1, std::span<const double> v2);

enum class DistanceKind { chi2, l2_squared, l2 };

std::string_view distance_name(DistanceKind d);
DistanceKind parse_distance(std::string_view name);
DistanceKind default_distance(Channel c);

double channel_distance(DistanceKind kind, std::span<const double> a,
                        std::span<const double> b);

// --- combined kernel -------------------------------------------------------

struct ChannelSpec {
  Channel channel = Channel::bovw;
  DistanceKind distance = DistanceKind::chi2;
  double omega = 1.0;  // normalizer, mean training distance once fitted
};

struct ChannelConfig {
  std::vector<ChannelSpec> channels;

  /// Default distance per channel, omega unset (1.0).
  static ChannelConfig with_channels(const std::vector<Channel>& channels);
};

/// Fills each omega with the mean distance over unordered training pairs.
/// Throws DataError for a degenerate channel (zero mean distance).
ChannelConfig fit_normalizers(const std::vector<ChannelFeatures>& training,
                              ChannelConfig config);

/// exp(-sum_c D_c(x, y) / omega_c).
double combined_kernel(const ChannelFeatures& x, const ChannelFeatures& y,
                       const ChannelConfig& config);

/// Symmetric N x N kernel matrix with unit diagonal.
Eigen::MatrixXd gram_matrix(const std::vector<ChannelFeatures>& features,
                            const ChannelConfig& config, unsigned threads = 1);

/// rows(queries) x rows(training) kernel values.
Eigen::MatrixXd kernel_rows(const std::vector<ChannelFeatures>& queries,
                            const std::vector<ChannelFeatures>& training,
                            const ChannelConfig& config, unsigned threads = 1);

// --- SVM -------------------------------------------------------------------

struct SvmOptions {
  double c = 1.0;
  double tol = 1e-3;
  std::size_t max_iter = 100000;
};

/// One binary C-SVC between classes[first] (+1) and classes[second] (-1).
struct PairModel {
  std::size_t first = 0;
  std::size_t second = 0;
  std::vector<std::size_t> support;  // training row indices
  std::vector<double> coef;          // alpha_i * y_i, parallel to support
  double rho = 0.0;                  // decision = sum coef K - rho
  double c = 1.0;
  std::size_t iterations = 0;
  double max_violation = 0.0;  // final m(alpha) - M(alpha)
};

struct SvmModel {
  std::vector<int> classes;  // sorted class ids present in training
  std::vector<PairModel> pairs;
  double tol = 1e-3;
  std::size_t max_iter = 100000;
  std::size_t train_size = 0;
};

struct BinaryDual {
  std::vector<double> alpha;
  double rho = 0.0;
  std::size_t iterations = 0;
  double max_violation = 0.0;
};

/// SMO with maximal-violating-pair selection on the dual
/// min 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij, 0 <= a <= C, y'a = 0.
/// `y` entries are +1/-1.
BinaryDual solve_binary_svm(const Eigen::MatrixXd& kernel,
                            std::span<const int> y, const SvmOptions& options);

/// 1/2 a'Qa - e'a.
double dual_objective(const Eigen::MatrixXd& kernel, std::span<const int> y,
                      std::span<const double> alpha);

/// One-vs-one training. Throws ConfigError for fewer than two classes and
/// DataError for a non-symmetric kernel.
SvmModel svm_train(const Eigen::MatrixXd& gram, std::span<const int> labels,
                   const SvmOptions& options = {});

/// Majority vote; ties by largest summed |decision| among the tied
/// classes' won contests, then lowest class id. `kernel` rows are queries
/// against every training row.
std::vector<int> svm_predict(const SvmModel& model,
                             const Eigen::MatrixXd& kernel);

// --- evaluation ------------------------------------------------------------

struct ClassAccuracy {
  std::string name;
  std::size_t support = 0;
  std::size_t correct = 0;
  double accuracy_percent = 0.0;
};

struct EvalReport {
  double overall_percent = 0.0;
  std::vector<ClassAccuracy> per_class;  // truth classes, sorted
  std::vector<std::string> columns;      // sorted union of truth and predicted
  // confusion[t][c]: items of per_class[t] predicted as columns[c].
  std::vector<std::vector<std::size_t>> confusion;
  std::string split;
};

EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& truths,
                    std::string split = {});

/// `class,accuracy_percent` rows plus an `overall` row.
std::string accuracy_table(const EvalReport& report);
/// Header `truth,<classes...>`, one row per truth class.
std::string confusion_table(const EvalReport& report);

// --- splits ----------------------------------------------------------------

/// Stratified fold id per item: each class is shuffled (seeded) and dealt
/// round-robin.
std::vector<std::size_t> stratified_folds(const std::vector<std::string>& classes,
                                          std::size_t folds,
                                          std::uint64_t seed);

/// Fold id per item such that each group sits in exactly one fold.
std::vector<std::size_t> grouped_folds(const std::vector<std::string>& groups,
                                       std::size_t folds, std::uint64_t seed);

}  // namespace cooc
