#pragma once

#include <vector>

#include "iikl/geometry/jacobi.hpp"
#include "iikl/nn/network.hpp"
#include "iikl/types.hpp"

namespace iikl::geometry {

inline constexpr double kPsdSlack = 1e-9;

// Riemannian metric tensor at a latent base point. `g` is exactly symmetric.
struct MetricMatrix {
  Matrix g;
  Vector base_point;

  Eigen::Index dim() const { return g.rows(); }
};

/// G = J^T J for J the input-Jacobian of `pullback` at z, then symmetrized.
MetricMatrix pullback_metric(const nn::Network& pullback, const Vector& z);

/// Batched variant over the columns of `zs`.
std::vector<MetricMatrix> pullback_metrics(const nn::Network& pullback, const Matrix& zs);

/// Symmetrized Gram matrix J^T J of a single Jacobian.
Matrix gram_of_jacobian(const Eigen::Ref<const Matrix>& jac);

// p^T G q. The summation is arranged so that swapping p and q yields the
// bit-identical result.
double metric_inner(const Matrix& g, const Vector& p, const Vector& q);
double metric_inner(const MetricMatrix& g, const Vector& p, const Vector& q);

/// Tangent-space kernel K(p,q) at z: metric_inner(pullback_metric(net, z), p, q).
double kernel_eval(const nn::Network& pullback, const Vector& z, const Vector& p, const Vector& q);

struct PsdDiagnostic {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
  std::vector<double> leading_minors;
};

/// Always returns; is_psd means min eigenvalue >= -tol.
PsdDiagnostic psd_check(const Matrix& g, double tol = kPsdSlack);
inline PsdDiagnostic psd_check(const MetricMatrix& g, double tol = kPsdSlack) {
  return psd_check(g.g, tol);
}

}  // namespace iikl::geometry
