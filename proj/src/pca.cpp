#include <cmath>

#include <Eigen/Eigenvalues>

#include "cooc/characterize.hpp"
#include "cooc/error.hpp"

namespace cooc {

std::size_t default_pca_components(std::size_t n_train) {
  return n_train < 2 ? 0 : std::min(kDefaultPcaComponents, n_train - 1);
}

PcaModel fit_pca(const RowMatrix& data, std::size_t s) {
  const auto n = static_cast<std::size_t>(data.rows());
  const auto d = static_cast<std::size_t>(data.cols());
  if (n < 2) throw ConfigError("PCA needs at least 2 training vectors");
  if (s < 1 || s > n - 1)
    throw ConfigError("PCA component count S = " + std::to_string(s) +
                      " is outside [1, N_train - 1 = " + std::to_string(n - 1) +
                      "]; the maximum is one less than the " +
                      std::to_string(n) + " training vectors");
  if (s > d)
    throw ConfigError("PCA component count S = " + std::to_string(s) +
                      " exceeds the input dimension " + std::to_string(d));

  PcaModel model;
  model.mean = data.colwise().mean().transpose();
  const RowMatrix centered = data.rowwise() - model.mean.transpose();
  const double scale = 1.0 / double(n - 1);

  // Eigen-decompose whichever of the covariance (d x d) or Gram (n x n)
  // matrices is smaller; both share the nonzero spectrum.
  Eigen::VectorXd lambda(Eigen::Index(s), 1);
  RowMatrix basis(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(d));
  std::vector<bool> degenerate(s, false);
  if (d <= n) {
    const Eigen::MatrixXd cov = (centered.transpose() * centered) * scale;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    for (std::size_t c = 0; c < s; ++c) {
      const auto col = Eigen::Index(d - 1 - c);
      lambda(Eigen::Index(c)) = eig.eigenvalues()(col);
      basis.row(Eigen::Index(c)) = eig.eigenvectors().col(col).transpose();
    }
  } else {
    const Eigen::MatrixXd gram = (centered * centered.transpose()) * scale;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double top = std::max(eig.eigenvalues()(Eigen::Index(n - 1)), 0.0);
    for (std::size_t c = 0; c < s; ++c) {
      const auto col = Eigen::Index(n - 1 - c);
      lambda(Eigen::Index(c)) = eig.eigenvalues()(col);
      Eigen::VectorXd v = centered.transpose() * eig.eigenvectors().col(col);
      const double norm = v.norm();
      if (lambda(Eigen::Index(c)) <= 1e-12 * top || norm == 0.0) {
        degenerate[c] = true;
        basis.row(Eigen::Index(c)).setZero();
      } else {
        basis.row(Eigen::Index(c)) = (v / norm).transpose();
      }
    }
  }

  // Modified Gram-Schmidt; null directions are completed from the standard
  // basis so the rows stay orthonormal.
  std::size_t next_axis = 0;
  for (std::size_t c = 0; c < s; ++c) {
    auto orthogonalize = [&](Eigen::VectorXd v) {
      for (std::size_t prev = 0; prev < c; ++prev) {
        const auto row = basis.row(Eigen::Index(prev)).transpose();
        v -= row.dot(v) * row;
      }
      return v;
    };
    Eigen::VectorXd v = basis.row(Eigen::Index(c)).transpose();
    if (!degenerate[c]) {
      v = orthogonalize(v);
      if (v.norm() < 0.5) degenerate[c] = true;
    }
    while (degenerate[c] && next_axis < d) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(Eigen::Index(d), Eigen::Index(next_axis++));
      v = orthogonalize(e);
      if (v.norm() >= 0.5) degenerate[c] = false;
    }
    v /= v.norm();
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    basis.row(Eigen::Index(c)) = v.transpose();
  }

  model.basis = std::move(basis);
  model.explained_variance = lambda.cwiseMax(0.0);
  return model;
}

std::vector<double> pca_project(const PcaModel& model,
                                const std::vector<double>& v) {
  if (v.size() != model.input_dim())
    throw DataError("PCA input has dimension " + std::to_string(v.size()) +
                    ", model expects " + std::to_string(model.input_dim()));
  const Eigen::Map<const Eigen::VectorXd> x(v.data(), Eigen::Index(v.size()));
  const Eigen::VectorXd z = model.basis * (x - model.mean);
  return {z.data(), z.data() + z.size()};
}

std::vector<double> pca_cooc(const Correlogram& cg, const PcaModel& model) {
  return pca_project(model, cg.vectorize());
}

}  // namespace cooc
