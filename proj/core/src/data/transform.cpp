#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "iikl/data/data.hpp"
#include "iikl/error.hpp"

namespace iikl::data {

std::pair<Dataset, MinMax> minmax_normalize(const Dataset& ds) {
  MinMax params{ds.X.colwise().minCoeff().transpose(), ds.X.colwise().maxCoeff().transpose()};
  Dataset out = ds;
  out.X = minmax_apply(ds.X, params);
  return {std::move(out), std::move(params)};
}

Matrix minmax_apply(const Matrix& X, const MinMax& p) {
  if (X.cols() != p.min.size()) throw InputError("normalization parameters do not match the data width");
  Matrix out(X.rows(), X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double range = p.max[c] - p.min[c];
    if (range > 0.0) {
      out.col(c) = (X.col(c).array() - p.min[c]) / range;
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

Matrix minmax_denormalize(const Matrix& X, const MinMax& p) {
  if (X.cols() != p.min.size()) throw InputError("normalization parameters do not match the data width");
  Matrix out(X.rows(), X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    out.col(c) = X.col(c).array() * (p.max[c] - p.min[c]) + p.min[c];
  }
  return out;
}

Dataset subset(const Dataset& ds, const std::vector<int>& ids) {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(ids.size()), ds.X.cols());
  std::vector<int> labels;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= ds.X.rows()) throw InputError("subset index out of range");
    out.X.row(static_cast<Eigen::Index>(i)) = ds.X.row(ids[i]);
    if (ds.labels) labels.push_back((*ds.labels)[static_cast<std::size_t>(ids[i])]);
  }
  if (ds.labels) out.labels = std::move(labels);
  out.feature_names = ds.feature_names;
  out.provenance = ds.provenance;
  return out;
}

Split split(const Dataset& ds, const SplitSpec& spec) {
  const auto n = static_cast<long long>(ds.X.rows());
  if (!(spec.validation_ratio > 0.0 && spec.validation_ratio < 1.0)) {
    throw ConfigError("validation ratio must lie strictly between 0 and 1");
  }
  const long long n_valid = std::llround(spec.validation_ratio * static_cast<double>(n));
  if (n_valid < 1 || n_valid >= n) {
    throw ConfigError("validation ratio " + std::to_string(spec.validation_ratio) + " leaves an empty partition for N = " +
                      std::to_string(n));
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  Split out;
  out.valid_ids.assign(order.begin(), order.begin() + n_valid);
  out.train_ids.assign(order.begin() + n_valid, order.end());
  std::sort(out.valid_ids.begin(), out.valid_ids.end());
  std::sort(out.train_ids.begin(), out.train_ids.end());
  out.train = subset(ds, out.train_ids);
  out.valid = subset(ds, out.valid_ids);
  return out;
}

}  // namespace iikl::data
