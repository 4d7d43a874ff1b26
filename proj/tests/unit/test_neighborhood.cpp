#include <gtest/gtest.h>

#include "iikl/error.hpp"
#include "iikl/neighborhood/knn.hpp"
#include "oracle/oracle.hpp"

namespace iikl {
namespace {

TEST(Knn, TieBreaksToSmallerIndex) {
  const Matrix line = (Matrix(3, 1) << 0, 1, 2).finished();
  const auto idx = neighborhood::knn_index(line, 1);
  EXPECT_EQ(idx.neighbor(1, 0), 0);
  EXPECT_EQ(idx.neighbor(0, 0), 1);
  EXPECT_EQ(idx.neighbor(2, 0), 1);
}

TEST(Knn, MatchesExhaustiveSort) {
  oracle::Gen gen(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = gen.integer(4, 40);
    const int k = gen.integer(1, n - 1);
    const Matrix pts = gen.matrix(n, gen.integer(1, 4));
    const auto idx = neighborhood::knn_index(pts, k);
    const auto ref = oracle::knn(pts, k);
    for (int h = 0; h < n; ++h) {
      for (int r = 0; r < k; ++r) EXPECT_EQ(idx.neighbor(h, r), ref[h][r]);
    }
  }
}

TEST(Knn, DistancesNonDecreasingAndNeverSelf) {
  oracle::Gen gen(42);
  const Matrix pts = gen.matrix(50, 3);
  const auto idx = neighborhood::knn_index(pts, 9);
  for (int h = 0; h < 50; ++h) {
    double last = 0.0;
    for (int r = 0; r < 9; ++r) {
      EXPECT_NE(idx.neighbor(h, r), h);
      const double d = (pts.row(idx.neighbor(h, r)) - pts.row(h)).norm();
      EXPECT_GE(d, last);
      last = d;
    }
  }
}

TEST(Knn, KTooLarge) { EXPECT_THROW(neighborhood::knn_index(Matrix::Random(4, 2), 5), ConfigError); }

TEST(SamplingSet, PairCounts) {
  EXPECT_EQ(neighborhood::pair_count(7), 21);
  EXPECT_EQ(neighborhood::pair_count(2), 1);
  const auto pairs = neighborhood::pair_list(4);
  ASSERT_EQ(pairs.size(), 6U);
  EXPECT_EQ(pairs.front(), std::make_pair(0, 1));
  EXPECT_EQ(pairs[3], std::make_pair(1, 2));
  EXPECT_EQ(pairs.back(), std::make_pair(2, 3));
}

TEST(SamplingSet, VectorsAreDifferences) {
  const Matrix z = (Matrix(3, 2) << 0, 0, 1, 0, 0, 2).finished();
  const auto idx = neighborhood::knn_index(z, 2);
  const auto s = neighborhood::sampling_set(z, idx, 0);
  ASSERT_EQ(s.vectors.rows(), 2);
  EXPECT_EQ(Vector(s.vectors.row(0).transpose()), (Vector(2) << 1, 0).finished());
  EXPECT_EQ(Vector(s.vectors.row(1).transpose()), (Vector(2) << 0, 2).finished());
  EXPECT_EQ(s.pairs.size(), 1U);
  EXPECT_THROW(neighborhood::sampling_set(z, idx, 3), InputError);
}

TEST(SamplingSet, ReconstructsNeighbors) {
  oracle::Gen gen(43);
  const Matrix z = gen.matrix(30, 3);
  const auto idx = neighborhood::knn_index(z, 6);
  for (int h = 0; h < 30; ++h) {
    const auto s = neighborhood::sampling_set(z, idx, h, 4);
    ASSERT_EQ(s.vectors.rows(), 4);
    for (int r = 0; r < 4; ++r) {
      EXPECT_LT((z.row(h) + s.vectors.row(r) - z.row(s.neighbor_ids[r])).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(KnnQuery, ExcludesSameIndexOnlyWhenAsked) {
  const Matrix pts = (Matrix(3, 1) << 0, 1, 5).finished();
  EXPECT_EQ(neighborhood::knn_query(pts, pts, 1, false).neighbor(2, 0), 2);
  EXPECT_EQ(neighborhood::knn_query(pts, pts, 1, true).neighbor(2, 0), 1);
}

}  // namespace
}  // namespace iikl
