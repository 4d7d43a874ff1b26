#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iikl/losses/losses.hpp"

namespace iikl::trainer {

enum class DualMode { kSoft, kHard };
enum class NeighborSpace { kAmbient, kLatent };
// relative: a threshold is a fraction of the first recorded loss value.
// absolute: a threshold is compared with the loss directly.
enum class ThresholdMode { kRelative, kAbsolute };

struct TrainConfig {
  double alpha = 100.0;
  double gamma = 1.0;
  double epsilon = 1.0;
  int k = 8;
  int latent_dim = 2;
  double lr = 1e-4;
  int batch_size = 100;
  int iterations = 2000;
  int iter_imm = 5;
  int iter_iso = 5;
  DualMode dual_mode = DualMode::kSoft;
  losses::PushMode push_mode = losses::PushMode::kSecant;
  NeighborSpace neighbor_space = NeighborSpace::kAmbient;
  std::uint64_t seed = 0;
  std::vector<int> encoder_hidden{64, 32};
  std::vector<int> decoder_hidden{32, 64};
  double leaky_slope = 0.01;
  bool affine_norm = false;
  double norm_momentum = 0.1;
  ThresholdMode threshold_mode = ThresholdMode::kRelative;
  double tau_re = 0.01;
  double tau_is = 0.01;

  losses::StageWeights weights() const { return {alpha, gamma, epsilon}; }
};

/// Throws ConfigError describing the first invalid field.
void validate(const TrainConfig& cfg);

nlohmann::json to_json(const TrainConfig& cfg);

/// Overlays the keys of `j` onto `base`. Unknown keys and wrongly typed values
/// raise ConfigError naming the key.
TrainConfig apply_json(TrainConfig base, const nlohmann::json& j);

/// Keys accepted by apply_json, for callers that embed a TrainConfig in a larger document.
const std::vector<std::string>& config_keys();

std::string to_string(DualMode m);
std::string to_string(losses::PushMode m);
std::string to_string(NeighborSpace m);
DualMode parse_dual_mode(const std::string& s);
losses::PushMode parse_push_mode(const std::string& s);
NeighborSpace parse_neighbor_space(const std::string& s);

}  // namespace iikl::trainer
