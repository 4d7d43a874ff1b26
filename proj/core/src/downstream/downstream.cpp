#include "iikl/downstream/downstream.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "iikl/error.hpp"
#include "iikl/geometry/metric.hpp"
#include "iikl/neighborhood/knn.hpp"
#include "iikl/nn/adam.hpp"
#include "iikl/parallel.hpp"

namespace iikl::downstream {

Matrix build_rie_features(const nn::Network& encoder, const nn::Network& pullback, const Matrix& X) {
  if (encoder.input_width() != X.cols()) {
    throw ConfigError("data width " + std::to_string(X.cols()) + " does not match the encoder input width " +
                      std::to_string(encoder.input_width()));
  }
  if (pullback.input_width() != encoder.output_width()) {
    throw ConfigError("pullback input width does not match the encoder latent width");
  }
  const int n = encoder.output_width();
  const Matrix z = encoder.forward_batch(X.transpose());
  const auto metrics = geometry::pullback_metrics(pullback, z);
  Matrix out(X.rows(), n * n + X.cols());
  for (Eigen::Index h = 0; h < X.rows(); ++h) {
    const Matrix& g = metrics[static_cast<std::size_t>(h)].g;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) out(h, i * n + j) = g(i, j);
    }
    out.row(h).tail(X.cols()) = X.row(h);
  }
  return out;
}

double eta(double l_coor, double l_rie) {
  if (l_coor == 0.0 || !std::isfinite(l_coor)) throw InputError("eta needs a non-zero, finite coordinate-arm loss");
  return std::abs(l_coor - l_rie) / std::abs(l_coor);
}

namespace {

ArmResult train_arm(const Matrix& train_in, const Matrix& train_out, const Matrix& valid_in,
                    const Matrix& valid_out, const ReconConfig& cfg) {
  auto net = nn::Network::init(
      nn::mlp_specs(static_cast<int>(train_in.cols()), cfg.hidden, static_cast<int>(train_out.cols()),
                    cfg.leaky_slope, false),
      cfg.seed);
  auto state = nn::AdamState::for_size(net.parameter_count(), cfg.lr);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<int> order(static_cast<std::size_t>(train_in.rows()));
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(std::min<Eigen::Index>(cfg.batch_size, train_in.rows()));
  std::size_t cursor = order.size();

  ArmResult arm;
  for (int it = 0; it < cfg.iterations; ++it) {
    if (cursor + batch > order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    Matrix xb(train_in.cols(), static_cast<Eigen::Index>(batch));
    Matrix yb(train_out.cols(), static_cast<Eigen::Index>(batch));
    for (std::size_t b = 0; b < batch; ++b) {
      xb.col(static_cast<Eigen::Index>(b)) = train_in.row(order[cursor + b]).transpose();
      yb.col(static_cast<Eigen::Index>(b)) = train_out.row(order[cursor + b]).transpose();
    }
    cursor += batch;
    const Vector before = net.parameters();
    try {
      const auto cache = net.forward_cached(xb);
      const Matrix residual = cache.output - yb;
      const Matrix cot = (2.0 / static_cast<double>(residual.size())) * residual;
      nn::adam_step(net, net.parameter_gradients(cache, cot), state);
      if (!net.parameters().allFinite()) throw NumericError("regressor parameters became non-finite");
    } catch (const NumericError&) {
      net.set_parameters(before);
      arm.converged = false;
      break;
    }
  }
  const Matrix pred = net.forward_batch(valid_in.transpose()).transpose();
  const Matrix err = (pred - valid_out).array().square().matrix();
  arm.valid_mse = err.mean();
  arm.per_sample.resize(static_cast<std::size_t>(err.rows()));
  for (Eigen::Index r = 0; r < err.rows(); ++r) arm.per_sample[static_cast<std::size_t>(r)] = err.row(r).mean();
  return arm;
}

Matrix gather(const Matrix& m, const std::vector<int>& ids) {
  Matrix out(static_cast<Eigen::Index>(ids.size()), m.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(ids[i]);
  return out;
}

}  // namespace

ReconResult train_recon(const Matrix& features, const Matrix& targets, const data::SplitSpec& split_spec,
                        const ReconConfig& cfg) {
  if (features.rows() != targets.rows()) throw InputError("feature and target row counts differ");
  if (features.cols() < targets.cols()) throw InputError("features must end with the coordinate columns");
  if (cfg.iterations < 1 || cfg.batch_size < 1 || !(cfg.lr > 0.0)) {
    throw ConfigError("reconstruction iterations, batch size and learning rate must be positive");
  }
  data::Dataset index_only;
  index_only.X = Matrix::Zero(features.rows(), 1);
  const auto parts = data::split(index_only, split_spec);

  const Matrix train_f = gather(features, parts.train_ids);
  const Matrix valid_f = gather(features, parts.valid_ids);
  const Matrix train_t = gather(targets, parts.train_ids);
  const Matrix valid_t = gather(targets, parts.valid_ids);
  data::Dataset train_ds;
  train_ds.X = train_f;
  const auto scale = data::minmax_normalize(train_ds).second;
  const Matrix train_rie = data::minmax_apply(train_f, scale);
  const Matrix valid_rie = data::minmax_apply(valid_f, scale);
  const auto d = targets.cols();
  const Matrix train_coor = train_rie.rightCols(d);
  const Matrix valid_coor = valid_rie.rightCols(d);

  ReconResult out;
  out.valid_ids = parts.valid_ids;
  parallel_for(2, cfg.threads, [&](std::size_t arm) {
    if (arm == 0) {
      out.rie = train_arm(train_rie, train_t, valid_rie, valid_t, cfg);
    } else {
      out.coor = train_arm(train_coor, train_t, valid_coor, valid_t, cfg);
    }
  });
  out.eta = eta(out.coor.valid_mse, out.rie.valid_mse);
  return out;
}

ClassifyResult knn_classify(const Matrix& train_X, const std::vector<int>& train_labels, const Matrix& test_X,
                            int k, const std::optional<std::vector<int>>& test_labels) {
  if (train_X.rows() == 0) throw InputError("knn_classify needs a non-empty training set");
  if (static_cast<Eigen::Index>(train_labels.size()) != train_X.rows()) {
    throw InputError("training labels do not match the training rows");
  }
  if (k < 1 || k > train_X.rows()) throw ConfigError("k must lie in [1, training size]");
  if (test_X.cols() != train_X.cols()) throw InputError("test width differs from training width");
  if (test_labels && static_cast<Eigen::Index>(test_labels->size()) != test_X.rows()) {
    throw InputError("test labels do not match the test rows");
  }
  const auto index = neighborhood::knn_query(train_X, test_X, k, false);
  ClassifyResult out;
  out.predicted.reserve(static_cast<std::size_t>(test_X.rows()));
  for (Eigen::Index q = 0; q < test_X.rows(); ++q) {
    std::map<int, int> votes;
    for (int r = 0; r < k; ++r) ++votes[train_labels[static_cast<std::size_t>(index.neighbor(q, r))]];
    // std::map iterates labels in ascending order, so the first maximum is the smallest label.
    int best = votes.begin()->first;
    int best_votes = 0;
    for (const auto& [label, count] : votes) {
      if (count > best_votes) {
        best = label;
        best_votes = count;
      }
    }
    out.predicted.push_back(best);
  }
  if (test_labels) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < out.predicted.size(); ++i) hits += out.predicted[i] == (*test_labels)[i] ? 1 : 0;
    out.accuracy = out.predicted.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(out.predicted.size());
  }
  return out;
}

nlohmann::json to_json(const ReconResult& r) {
  return {{"l_ae_rie", r.rie.valid_mse},
          {"l_ae_coor", r.coor.valid_mse},
          {"eta", r.eta},
          {"rie_converged", r.rie.converged},
          {"coor_converged", r.coor.converged},
          {"validation_samples", r.valid_ids.size()}};
}

}  // namespace iikl::downstream
