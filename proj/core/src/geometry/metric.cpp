#include "iikl/geometry/metric.hpp"

#include <Eigen/LU>

#include "iikl/error.hpp"

namespace iikl::geometry {

Matrix gram_of_jacobian(const Eigen::Ref<const Matrix>& jac) {
  Matrix g = jac.transpose() * jac;
  return 0.5 * (g + g.transpose());
}

MetricMatrix pullback_metric(const nn::Network& pullback, const Vector& z) {
  return {gram_of_jacobian(pullback.jacobian(z)), z};
}

std::vector<MetricMatrix> pullback_metrics(const nn::Network& pullback, const Matrix& zs) {
  const auto jac = pullback.jacobian_batch(zs);
  std::vector<MetricMatrix> out;
  out.reserve(static_cast<std::size_t>(zs.cols()));
  for (Eigen::Index s = 0; s < zs.cols(); ++s) {
    out.push_back({gram_of_jacobian(jac.jacobian(s)), zs.col(s)});
  }
  return out;
}

double metric_inner(const Matrix& g, const Vector& p, const Vector& q) {
  const Eigen::Index n = g.rows();
  if (g.cols() != n || p.size() != n || q.size() != n) {
    throw InputError("metric_inner: dimensions of G, p and q differ");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    sum += g(i, i) * (p[i] * q[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      sum += 0.5 * (g(i, j) + g(j, i)) * (p[i] * q[j] + p[j] * q[i]);
    }
  }
  return sum;
}

double metric_inner(const MetricMatrix& g, const Vector& p, const Vector& q) {
  return metric_inner(g.g, p, q);
}

double kernel_eval(const nn::Network& pullback, const Vector& z, const Vector& p, const Vector& q) {
  return metric_inner(pullback_metric(pullback, z), p, q);
}

PsdDiagnostic psd_check(const Matrix& g, double tol) {
  PsdDiagnostic d;
  if (g.rows() == 0 || g.rows() != g.cols() || !g.allFinite()) {
    d.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    return d;
  }
  const Matrix sym = 0.5 * (g + g.transpose());
  d.min_eigenvalue = symmetric_eigenvalues(sym)[0];
  d.is_psd = d.min_eigenvalue >= -tol;
  for (Eigen::Index k = 1; k <= g.rows(); ++k) {
    d.leading_minors.push_back(sym.topLeftCorner(k, k).determinant());
  }
  return d;
}

}  // namespace iikl::geometry
