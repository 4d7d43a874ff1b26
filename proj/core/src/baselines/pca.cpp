#include <cmath>

#include "iikl/baselines/baselines.hpp"
#include "iikl/error.hpp"
#include "iikl/geometry/jacobi.hpp"

namespace iikl::baselines {

namespace {

void orient_columns(Matrix& axes) {
  for (Eigen::Index c = 0; c < axes.cols(); ++c) {
    Eigen::Index arg = 0;
    axes.col(c).cwiseAbs().maxCoeff(&arg);
    if (axes(arg, c) < 0.0) axes.col(c) = -axes.col(c);
  }
}

}  // namespace

Embedding pca_embed(const Matrix& X, int n) {
  if (n < 1 || n > X.cols()) {
    throw ConfigError("PCA target dimension must be in [1, " + std::to_string(X.cols()) + "]");
  }
  if (X.rows() < 2) throw InputError("PCA needs at least two samples");
  const Vector mean = X.colwise().mean();
  const Matrix centered = X.rowwise() - mean.transpose();
  Matrix cov = centered.transpose() * centered / static_cast<double>(X.rows() - 1);
  cov = 0.5 * (cov + cov.transpose()).eval();
  const auto eig = geometry::symmetric_eigen(cov);
  Matrix axes(X.cols(), n);
  for (int c = 0; c < n; ++c) axes.col(c) = eig.vectors.col(X.cols() - 1 - c);
  orient_columns(axes);

  Embedding out;
  out.Z = centered * axes;
  out.method = "pca";
  Vector explained(n);
  for (int c = 0; c < n; ++c) explained[c] = eig.values[X.cols() - 1 - c];
  out.parameters = {{"n", n}, {"explained_variance", std::vector<double>(explained.begin(), explained.end())}};
  return out;
}

Matrix pairwise_distances(const Matrix& points) {
  const Eigen::Index n = points.rows();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (points.row(i) - points.row(j)).norm();
  }
  return d;
}

double residual_variance(const Matrix& reference, const Matrix& Z) {
  if (reference.rows() != Z.rows() || reference.cols() != Z.rows()) {
    throw InputError("reference distance matrix does not match the embedding size");
  }
  const Matrix dz = pairwise_distances(Z);
  const Eigen::Index n = Z.rows();
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  double m = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = reference(i, j);
      const double b = dz(i, j);
      sa += a;
      sb += b;
      saa += a * a;
      sbb += b * b;
      sab += a * b;
      m += 1;
    }
  }
  const double cov = sab - sa * sb / m;
  const double va = saa - sa * sa / m;
  const double vb = sbb - sb * sb / m;
  if (va <= 0.0 || vb <= 0.0) return 1.0;
  return 1.0 - cov * cov / (va * vb);
}

}  // namespace iikl::baselines
