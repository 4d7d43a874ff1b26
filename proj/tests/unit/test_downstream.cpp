#include <gtest/gtest.h>

#include "iikl/downstream/downstream.hpp"
#include "iikl/error.hpp"
#include "oracle/oracle.hpp"

namespace iikl {
namespace {

using nn::Activation;
using nn::LayerSpec;
using nn::Network;

TEST(RieFeatures, WidthAndIdentityBlock) {
  Network enc({LayerSpec{3, 2, Activation::kIdentity, 0.01, false}});
  enc.set_weights(0, (Matrix(2, 3) << 1, 0, 0, 0, 1, 0).finished());
  Network pb({LayerSpec{2, 3, Activation::kIdentity, 0.01, false}});
  pb.set_weights(0, (Matrix(3, 2) << 1, 0, 0, 1, 0, 0).finished());
  oracle::Gen gen(101);
  const Matrix x = gen.matrix(6, 3);
  const Matrix f = downstream::build_rie_features(enc, pb, x);
  ASSERT_EQ(f.cols(), 7);
  for (Eigen::Index h = 0; h < 6; ++h) {
    EXPECT_EQ(f.row(h).head(4), (Eigen::RowVectorXd(4) << 1, 0, 0, 1).finished());
    EXPECT_EQ(f.row(h).tail(3), x.row(h));
  }
  EXPECT_THROW(downstream::build_rie_features(enc, pb, gen.matrix(6, 4)), ConfigError);
}

TEST(RieFeatures, RowMajorSymmetricMetric) {
  oracle::Gen gen(102);
  const auto enc = gen.network(gen.specs(3, 2));
  const auto pb = gen.network(gen.specs(2, 3));
  const Matrix x = gen.matrix(10, 3);
  const Matrix f = downstream::build_rie_features(enc, pb, x);
  for (Eigen::Index h = 0; h < 10; ++h) {
    EXPECT_EQ(f(h, 1), f(h, 2));
    const Vector z = enc.forward(x.row(h).transpose());
    const Matrix j = pb.jacobian(z);
    const Matrix g = j.transpose() * j;
    EXPECT_NEAR(f(h, 0), g(0, 0), 1e-12);
    EXPECT_NEAR(f(h, 1), g(0, 1), 1e-12);
    EXPECT_NEAR(f(h, 3), g(1, 1), 1e-12);
  }
}

TEST(Eta, Examples) {
  EXPECT_NEAR(downstream::eta(1.80e-4, 2.78e-5), 0.8452, 1e-3);
  EXPECT_EQ(downstream::eta(0.5, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(downstream::eta(1.80e-4, 2.78e-5), oracle::eta(1.80e-4, 2.78e-5));
  EXPECT_THROW(downstream::eta(0.0, 1.0), InputError);
}

TEST(Recon, IdenticalBudgetAndConsistentEta) {
  oracle::Gen gen(103);
  const Matrix targets = gen.matrix(60, 2);
  Matrix features(60, 3);
  features.col(0) = targets.col(0) + targets.col(1);
  features.rightCols(2) = targets;
  downstream::ReconConfig cfg;
  cfg.hidden = {8};
  cfg.iterations = 200;
  cfg.batch_size = 16;
  const auto r = downstream::train_recon(features, targets, {0.2, 1}, cfg);
  EXPECT_EQ(r.valid_ids.size(), 12U);
  EXPECT_EQ(r.rie.per_sample.size(), 12U);
  EXPECT_EQ(r.coor.per_sample.size(), 12U);
  EXPECT_TRUE(r.rie.converged);
  EXPECT_TRUE(r.coor.converged);
  EXPECT_GE(r.rie.valid_mse, 0.0);
  EXPECT_NEAR(r.eta, downstream::eta(r.coor.valid_mse, r.rie.valid_mse), 1e-12);
  const auto j = downstream::to_json(r);
  EXPECT_NEAR(j["eta"].get<double>(), downstream::eta(j["l_ae_coor"].get<double>(), j["l_ae_rie"].get<double>()), 1e-12);

  cfg.threads = 2;
  const auto parallel = downstream::train_recon(features, targets, {0.2, 1}, cfg);
  EXPECT_EQ(parallel.rie.valid_mse, r.rie.valid_mse);
  EXPECT_EQ(parallel.coor.valid_mse, r.coor.valid_mse);

  // Same input for both arms means identical results.
  const auto same = downstream::train_recon(targets, targets, {0.2, 1}, cfg);
  EXPECT_EQ(same.rie.valid_mse, same.coor.valid_mse);
  EXPECT_EQ(same.eta, 0.0);

  EXPECT_THROW(downstream::train_recon(features.topRows(10), targets, {0.2, 1}, cfg), InputError);
}

TEST(Classify, Examples) {
  const Matrix train = (Matrix(4, 1) << 0, 1, 10, 11).finished();
  const std::vector<int> labels{3, 3, 7, 7};
  const auto exact = downstream::knn_classify(train, labels, (Matrix(1, 1) << 10).finished(), 1);
  EXPECT_EQ(exact.predicted, std::vector<int>{7});

  const Matrix tie_train = (Matrix(2, 1) << -1, 1).finished();
  const auto tie = downstream::knn_classify(tie_train, {1, 0}, Matrix::Zero(1, 1), 2);
  EXPECT_EQ(tie.predicted, std::vector<int>{0});

  EXPECT_THROW(downstream::knn_classify(Matrix(0, 1), {}, Matrix::Zero(1, 1), 1), InputError);
  EXPECT_THROW(downstream::knn_classify(train, labels, Matrix::Zero(1, 1), 5), ConfigError);
}

TEST(Classify, SeparatedBlobs) {
  oracle::Gen gen(104);
  Matrix train(40, 2);
  Matrix test(20, 2);
  std::vector<int> tl;
  std::vector<int> sl;
  for (int i = 0; i < 40; ++i) {
    const int c = i % 2;
    train.row(i) << gen.normal() * 0.3 + c * 10, gen.normal() * 0.3;
    tl.push_back(c);
  }
  for (int i = 0; i < 20; ++i) {
    const int c = i % 2;
    test.row(i) << gen.normal() * 0.3 + c * 10, gen.normal() * 0.3;
    sl.push_back(c);
  }
  const auto r = downstream::knn_classify(train, tl, test, 3, sl);
  ASSERT_TRUE(r.accuracy.has_value());
  EXPECT_EQ(*r.accuracy, 1.0);
  EXPECT_EQ(r.predicted, sl);
}

}  // namespace
}  // namespace iikl
