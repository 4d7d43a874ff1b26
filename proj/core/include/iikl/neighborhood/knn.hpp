#pragma once

#include <utility>
#include <vector>

#include "iikl/types.hpp"

namespace iikl::neighborhood {

// Exact K-nearest-neighbor lists. Row h holds the K neighbors of sample h in
// ascending Euclidean distance, ties broken by the smaller index. A sample is
// never its own neighbor.
struct NeighborIndex {
  int k = 0;
  Eigen::Index samples = 0;
  std::vector<int> ids;  // samples x k, row-major

  const int* row(Eigen::Index h) const { return ids.data() + h * k; }
  int neighbor(Eigen::Index h, int r) const { return ids[static_cast<std::size_t>(h * k + r)]; }
};

/// Brute-force O(N^2) search over the rows of `points`.
NeighborIndex knn_index(const Matrix& points, int k);

/// Neighbors of each row of `queries` among the rows of `reference`. When
/// `exclude_same_index` is set, query i never returns reference row i.
NeighborIndex knn_query(const Matrix& reference, const Matrix& queries, int k,
                        bool exclude_same_index);

/// Number of unordered distinct pairs drawn from k tangent vectors.
constexpr int pair_count(int k) { return k * (k - 1) / 2; }

/// Lexicographic (a < b) enumeration of neighbor-rank pairs.
std::vector<std::pair<int, int>> pair_list(int k);

// Tangent vectors at one origin: row r is z_{n_r} - z_h.
struct SamplingSet {
  int origin = 0;
  std::vector<int> neighbor_ids;
  Matrix vectors;
  std::vector<std::pair<int, int>> pairs;
};

/// Uses the first `use_k` neighbors of the index (all of them when use_k < 0).
SamplingSet sampling_set(const Matrix& latents, const NeighborIndex& index, int h, int use_k = -1);

}  // namespace iikl::neighborhood
