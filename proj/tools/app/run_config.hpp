#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iikl/trainer/config.hpp"

namespace iikl::app {

// Everything a command reads: the training hyperparameters plus dataset
// paths and command-specific options. Loaded from one flat JSON document
// whose keys are the TrainConfig keys and the keys below; flags override it.
struct RunConfig {
  trainer::TrainConfig train;

  std::string data;
  std::string out = "out";
  std::optional<std::string> label_column;  // header name, or a column index
  bool normalize = true;                    // min-max scale features before use
  int threads = 1;

  // synth
  std::string kind = "plane";
  int n = 500;
  int ambient_dim = 5;
  double noise = 0.0;

  // eval, downstream-recon, export-metric
  std::string checkpoint;
  std::string embedding;
  std::string eval_neighbor_space = "ambient";
  std::vector<std::string> baselines;

  // baseline
  std::string method = "pca";

  // downstream
  double ratio = 0.2;
  int recon_iterations = 2000;
  double recon_lr = 1e-3;
  int recon_batch = 64;
  std::vector<int> recon_hidden{64, 64};
  std::string test;
  int classify_k = 5;

  // sweeps
  std::vector<int> i_range{2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> j_range{2, 3, 4, 5, 6, 7, 8, 9, 10};
  int budget = 10;
  std::vector<double> gammas{0.1, 1.0, 10.0};
  int runs = 20;
};

/// Overlays `j`; unknown keys and wrong types raise ConfigError naming the key.
RunConfig apply_run_json(RunConfig base, const nlohmann::json& j);
RunConfig load_run_config(const std::string& path, RunConfig base = {});
nlohmann::json to_json(const RunConfig& cfg);

/// "2:10" (inclusive range) or "2,4,8".
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);
std::vector<std::string> parse_string_list(const std::string& text);

}  // namespace iikl::app
