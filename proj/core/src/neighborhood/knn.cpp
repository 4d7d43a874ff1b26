#include "iikl/neighborhood/knn.hpp"

#include <algorithm>
#include <string>

#include "iikl/error.hpp"

namespace iikl::neighborhood {

NeighborIndex knn_query(const Matrix& reference, const Matrix& queries, int k,
                        bool exclude_same_index) {
  const Eigen::Index n = reference.rows();
  const Eigen::Index available = exclude_same_index ? n - 1 : n;
  if (k < 1) throw ConfigError("K must be >= 1");
  if (k > available) {
    throw ConfigError("K = " + std::to_string(k) + " needs more than " + std::to_string(n) +
                      " reference points");
  }
  if (reference.cols() != queries.cols()) throw InputError("knn: point dimensions differ");
  if (!reference.allFinite() || !queries.allFinite()) throw InputError("knn: non-finite coordinates");

  NeighborIndex index;
  index.k = k;
  index.samples = queries.rows();
  index.ids.resize(static_cast<std::size_t>(queries.rows() * k));
  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    for (Eigen::Index j = 0; j < n; ++j) {
      dist[static_cast<std::size_t>(j)] = (reference.row(j) - queries.row(q)).squaredNorm();
    }
    order.clear();
    for (int j = 0; j < static_cast<int>(n); ++j) {
      if (!(exclude_same_index && j == q)) order.push_back(j);
    }
    const auto less = [&](int a, int b) {
      const double da = dist[static_cast<std::size_t>(a)], db = dist[static_cast<std::size_t>(b)];
      return da < db || (da == db && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), less);
    std::copy(order.begin(), order.begin() + k, index.ids.begin() + q * k);
  }
  return index;
}

NeighborIndex knn_index(const Matrix& points, int k) {
  if (k >= points.rows()) {
    throw ConfigError("K = " + std::to_string(k) + " must be smaller than the sample count " +
                      std::to_string(points.rows()));
  }
  return knn_query(points, points, k, true);
}

std::vector<std::pair<int, int>> pair_list(int k) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(pair_count(std::max(k, 0))));
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
  }
  return pairs;
}

SamplingSet sampling_set(const Matrix& latents, const NeighborIndex& index, int h, int use_k) {
  if (latents.rows() != index.samples) {
    throw InputError("sampling_set: latents have " + std::to_string(latents.rows()) +
                     " rows but the index covers " + std::to_string(index.samples));
  }
  if (h < 0 || h >= index.samples) {
    throw InputError("sampling_set: origin " + std::to_string(h) + " out of range");
  }
  const int k = use_k < 0 ? index.k : use_k;
  if (k > index.k) throw ConfigError("sampling_set: requested more neighbors than indexed");
  SamplingSet set;
  set.origin = h;
  set.vectors.resize(k, latents.cols());
  for (int r = 0; r < k; ++r) {
    const int nb = index.neighbor(h, r);
    set.neighbor_ids.push_back(nb);
    set.vectors.row(r) = latents.row(nb) - latents.row(h);
  }
  set.pairs = pair_list(k);
  return set;
}

}  // namespace iikl::neighborhood
