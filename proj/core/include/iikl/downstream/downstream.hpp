#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "iikl/data/data.hpp"
#include "iikl/nn/network.hpp"
#include "iikl/types.hpp"

namespace iikl::downstream {

/// Row h: row-major flatten of G(f_E(x_h)) followed by x_h. Width n^2 + d.
Matrix build_rie_features(const nn::Network& encoder, const nn::Network& pullback, const Matrix& X);

struct ReconConfig {
  std::vector<int> hidden{64, 64};
  double lr = 1e-3;
  int iterations = 2000;
  int batch_size = 64;
  std::uint64_t seed = 0;
  double leaky_slope = 0.01;
  int threads = 1;  // the two arms may run concurrently
};

struct ArmResult {
  double valid_mse = 0.0;
  bool converged = true;  // false when training hit a non-finite loss
  std::vector<double> per_sample;  // validation squared error, averaged over coordinates
};

struct ReconResult {
  ArmResult rie;
  ArmResult coor;
  double eta = 0.0;
  std::vector<int> valid_ids;
};

/// |l_coor - l_rie| / |l_coor|.
double eta(double l_coor, double l_rie);

// Trains two regressors with identical hidden layers, optimizer, seed and
// step budget: one on `features`, one on the trailing target-width columns
// (the raw coordinates). Inputs are min-max scaled with statistics of the
// training split. Reports validation MSEs.
ReconResult train_recon(const Matrix& features, const Matrix& targets, const data::SplitSpec& split,
                        const ReconConfig& cfg);

struct ClassifyResult {
  std::vector<int> predicted;
  std::optional<double> accuracy;  // present when test labels were given
};

/// Majority vote among the k Euclidean nearest training rows; ties go to the smallest label.
ClassifyResult knn_classify(const Matrix& train_X, const std::vector<int>& train_labels,
                            const Matrix& test_X, int k,
                            const std::optional<std::vector<int>>& test_labels = std::nullopt);

nlohmann::json to_json(const ReconResult& r);

}  // namespace iikl::downstream
