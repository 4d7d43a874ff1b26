#include <gtest/gtest.h>

#include <filesystem>

#include "iikl/error.hpp"
#include "iikl/nn/adam.hpp"
#include "iikl/nn/checkpoint.hpp"
#include "iikl/nn/network.hpp"
#include "oracle/oracle.hpp"

namespace iikl {
namespace {

using nn::Activation;
using nn::LayerSpec;
using nn::Network;

LayerSpec linear(int in, int out) { return {in, out, Activation::kIdentity, 0.01, false}; }

TEST(Network, InitIsDeterministicPerSeed) {
  const auto specs = nn::mlp_specs(3, std::vector<int>{5, 4}, 2);
  const auto a = Network::init(specs, 7);
  const auto b = Network::init(specs, 7);
  const auto c = Network::init(specs, 8);
  EXPECT_EQ(a.parameters(), b.parameters());
  EXPECT_NE(a.parameters().sum(), c.parameters().sum());
}

TEST(Network, InitDrawsWithinFanInBoundAndZeroBias) {
  const auto net = Network::init(nn::mlp_specs(9, std::vector<int>{16}, 4), 3);
  EXPECT_LE(net.weights(0).cwiseAbs().maxCoeff(), 1.0 / 3.0);
  EXPECT_LE(net.weights(1).cwiseAbs().maxCoeff(), 1.0 / 4.0);
  EXPECT_EQ(net.bias(0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Network, ParameterCountByHand) {
  const Network net({linear(3, 5), linear(5, 2)});
  EXPECT_EQ(net.parameter_count(), 3 * 5 + 5 + 5 * 2 + 2);
}

TEST(Network, RejectsNonChainingSpecs) {
  EXPECT_THROW(Network({linear(3, 5), linear(4, 2)}), ConfigError);
  LayerSpec bad = linear(2, 2);
  bad.activation = Activation::kLeakyRelu;
  bad.slope = 1.0;
  EXPECT_THROW(Network({bad}), ConfigError);
  EXPECT_THROW(Network({linear(0, 2)}), ConfigError);
}

TEST(Network, ForwardExamples) {
  Network id({linear(3, 3)});
  id.set_weights(0, Matrix::Identity(3, 3));
  const Vector x = Vector::LinSpaced(3, -1.0, 2.0);
  EXPECT_EQ(id.forward(x), x);

  Network affine({linear(1, 1)});
  affine.set_weights(0, Matrix::Constant(1, 1, 2.0));
  affine.set_bias(0, Vector::Constant(1, 1.0));
  EXPECT_DOUBLE_EQ(affine.forward(Vector::Constant(1, 3.0))[0], 7.0);

  Network leaky({{1, 1, Activation::kLeakyRelu, 0.01, false}});
  leaky.set_weights(0, Matrix::Constant(1, 1, 1.0));
  EXPECT_DOUBLE_EQ(leaky.forward(Vector::Constant(1, -2.0))[0], -0.02);
}

TEST(Network, ForwardErrors) {
  Network net({linear(2, 1)});
  EXPECT_THROW(net.forward(Vector::Zero(3)), InputError);
  net.set_weights(0, Matrix::Constant(1, 2, 1e308));
  EXPECT_THROW(net.forward(Vector::Constant(2, 1e308)), NumericError);
}

TEST(Network, ForwardMatchesOracleWithNorm) {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int in = gen.integer(1, 4);
    const auto net = gen.network(gen.specs(in, gen.integer(1, 4), 3, 6, true));
    const Matrix xs = gen.matrix(in, 5);
    const Matrix batch = net.forward_batch(xs);
    for (Eigen::Index s = 0; s < xs.cols(); ++s) {
      EXPECT_LT(oracle::rel_err(batch.col(s), oracle::forward(net, xs.col(s))), 1e-13);
    }
  }
}

TEST(Network, JacobianExamples) {
  Network lin({linear(3, 2)});
  const Matrix w = (Matrix(2, 3) << 1, 2, 3, 4, 5, 6).finished();
  lin.set_weights(0, w);
  EXPECT_EQ(lin.jacobian(Vector::Random(3)), w);

  // Pre-activation exactly zero takes slope 1.
  Network leaky({{1, 1, Activation::kLeakyRelu, 0.1, false}});
  leaky.set_weights(0, Matrix::Constant(1, 1, 2.0));
  EXPECT_DOUBLE_EQ(leaky.jacobian(Vector::Zero(1))(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(leaky.jacobian(Vector::Constant(1, -1.0))(0, 0), 0.2);
}

TEST(Network, JacobianMatchesFiniteDifferences) {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int in = gen.integer(1, 4);
    const auto net = gen.network(gen.specs(in, gen.integer(1, 5), 3, 6, true));
    const Vector z = gen.vector(in);
    EXPECT_LT(oracle::rel_err(net.jacobian(z), oracle::fd_jacobian(net, z)), 1e-6) << "trial " << trial;
  }
}

TEST(Network, BatchedJacobianMatchesSingle) {
  oracle::Gen gen(6);
  const auto net = gen.network(gen.specs(3, 4, 2, 5, true));
  const Matrix zs = gen.matrix(3, 6);
  const auto jb = net.jacobian_batch(zs);
  ASSERT_EQ(jb.size(), 6);
  for (Eigen::Index s = 0; s < 6; ++s) EXPECT_LT(oracle::rel_err(jb.jacobian(s), net.jacobian(zs.col(s))), 1e-14);
}

TEST(Network, ParameterGradientsMatchFiniteDifferences) {
  oracle::Gen gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = gen.integer(1, 3);
    const int out = gen.integer(1, 3);
    auto net = gen.network(gen.specs(in, out, 2, 5, true));
    const Matrix xs = gen.matrix(in, 4);
    const Matrix cot = gen.matrix(out, 4);
    const auto f = [&](const Network& n) { return (n.forward_batch(xs).array() * cot.array()).sum(); };
    Matrix input_cot;
    const Vector g = net.parameter_gradients(net.forward_cached(xs), cot, &input_cot);
    EXPECT_LT(oracle::rel_err(g, oracle::fd_gradient(net, f)), 1e-6) << "trial " << trial;
    for (Eigen::Index s = 0; s < xs.cols(); ++s) {
      const Vector expected = oracle::fd_jacobian(net, xs.col(s)).transpose() * cot.col(s);
      EXPECT_LT(oracle::rel_err(input_cot.col(s), expected), 1e-6);
    }
  }
}

TEST(Network, JacobianParameterGradientsMatchFiniteDifferences) {
  oracle::Gen gen(22);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = gen.integer(1, 3);
    const int out = gen.integer(1, 4);
    auto net = gen.network(gen.specs(in, out, 2, 5, true));
    const Matrix zs = gen.matrix(in, 3);
    const Matrix cot = gen.matrix(out, in * 3);
    const auto f = [&](const Network& n) { return (n.jacobian_batch(zs).stacked.array() * cot.array()).sum(); };
    const Vector g = net.jacobian_parameter_gradients(net.jacobian_batch(zs), cot);
    EXPECT_LT(oracle::rel_err(g, oracle::fd_gradient(net, f)), 1e-6) << "trial " << trial;
  }
}

TEST(Network, StaleCacheIsRejected) {
  auto net = Network::init(nn::mlp_specs(2, std::vector<int>{3}, 1), 1);
  const auto cache = net.forward_cached(Matrix::Ones(2, 2));
  net.set_bias(0, Vector::Ones(3));
  EXPECT_THROW(net.parameter_gradients(cache, Matrix::Ones(1, 2)), UsageError);
}

TEST(Network, ChecksumTracksParameters) {
  auto net = Network::init(nn::mlp_specs(2, std::vector<int>{3}, 1), 1);
  const auto before = net.checksum();
  EXPECT_EQ(before, Network(net).checksum());
  net.set_bias(1, Vector::Constant(1, 0.5));
  EXPECT_NE(before, net.checksum());
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Vector x = Vector::Zero(3);
  auto state = nn::AdamState::for_size(3, 0.1);
  nn::adam_step(x, (Vector(3) << 2.0, -0.5, 0.0).finished(), state);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  EXPECT_NEAR(x[0], -0.1 * 2.0 / (2.0 + 1e-8), 1e-15);
  EXPECT_NEAR(x[1], 0.1 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_EQ(x[2], 0.0);
  EXPECT_EQ(state.step, 1);
}

TEST(Adam, MatchesHandRolledRecurrence) {
  oracle::Gen gen(3);
  Vector x = gen.vector(4);
  Vector ref = x;
  Vector m = Vector::Zero(4);
  Vector v = Vector::Zero(4);
  auto state = nn::AdamState::for_size(4, 1e-2);
  for (int t = 1; t <= 25; ++t) {
    const Vector g = gen.vector(4);
    nn::adam_step(x, g, state);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g.cwiseProduct(g);
    const Vector mh = m / (1.0 - std::pow(0.9, t));
    const Vector vh = v / (1.0 - std::pow(0.999, t));
    ref -= (1e-2 * mh.array() / (vh.array().sqrt() + 1e-8)).matrix();
  }
  EXPECT_LT((x - ref).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Adam, RejectsNonFiniteGradientWithoutMutation) {
  Vector x = Vector::Ones(2);
  auto state = nn::AdamState::for_size(2, 0.1);
  Vector g(2);
  g << 1.0, std::nan("");
  EXPECT_THROW(nn::adam_step(x, g, state), NumericError);
  EXPECT_EQ(state.step, 0);
  EXPECT_EQ(x, Vector::Ones(2));
}

TEST(Checkpoint, RoundTripIsBitExact) {
  oracle::Gen gen(9);
  nn::Checkpoint ckpt;
  ckpt.networks.emplace("encoder", gen.network(gen.specs(3, 2, 2, 4, true)));
  ckpt.networks.emplace("decoder", gen.network(gen.specs(2, 3, 2, 4, false)));
  ckpt.train_config_echo = {{"seed", 4}};
  const auto dir = std::filesystem::path(IIKL_TEST_TMP);
  std::filesystem::create_directories(dir);
  const auto path = dir / "ckpt.json";
  nn::save_checkpoint(ckpt, path);
  const auto back = nn::load_checkpoint(path);
  for (const auto& [name, net] : ckpt.networks) {
    EXPECT_EQ(back.at(name).parameters(), net.parameters()) << name;
    EXPECT_EQ(back.at(name).specs(), net.specs());
    EXPECT_EQ(back.at(name).checksum(), net.checksum());
  }
  EXPECT_EQ(back.train_config_echo, ckpt.train_config_echo);
  EXPECT_THROW(back.at("pullback"), LoadError);
}

TEST(Checkpoint, RejectsWrongVersion) {
  auto doc = nn::to_json(nn::Checkpoint{});
  doc["version"] = "something-else";
  EXPECT_THROW(nn::checkpoint_from_json(doc), LoadError);
}

}  // namespace
}  // namespace iikl
