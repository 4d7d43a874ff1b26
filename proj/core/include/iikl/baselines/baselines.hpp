#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "iikl/types.hpp"

namespace iikl::baselines {

struct Embedding {
  Matrix Z;  // one sample per row
  std::string method;
  nlohmann::json parameters;
};

// Centered projection onto the top-n covariance eigenvectors. Each axis is
// oriented so that its largest-magnitude loading is positive.
Embedding pca_embed(const Matrix& X, int n);

// KNN graph (union-symmetrized, Euclidean edge weights), all-pairs Dijkstra,
// then classical MDS with negative eigenvalues clamped to zero.
Embedding isomap_embed(const Matrix& X, int k, int n, int threads = 1);

/// Shortest-path distances over the symmetrized KNN graph. Throws EvalError
/// naming the components when the graph is disconnected.
Matrix geodesic_distances(const Matrix& X, int k, int threads = 1);

/// 1 - R^2 between the upper triangle of `reference` and the pairwise
/// Euclidean distances of the rows of Z.
double residual_variance(const Matrix& reference, const Matrix& Z);

Matrix pairwise_distances(const Matrix& points);

}  // namespace iikl::baselines
