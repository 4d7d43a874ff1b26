#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "iikl/nn/network.hpp"

namespace iikl::nn {

inline constexpr const char* kCheckpointVersion = "iikl-checkpoint-v1";

// A set of named networks plus the configuration that produced them.
//
// On disk this is one JSON document with the fields
//   version, layer_specs, weights, biases, norm_params, train_config_echo
// where the four per-network fields are objects keyed by network name
// ("encoder", "decoder", "pullback"). Weights are nested row-major
// out x in arrays. Doubles are written in shortest round-trip form, so
// loading reproduces every parameter bit for bit.
struct Checkpoint {
  std::map<std::string, Network> networks;
  nlohmann::json train_config_echo = nlohmann::json::object();

  const Network& at(const std::string& name) const;
};

nlohmann::json to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& doc);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json specs_to_json(const std::vector<LayerSpec>& specs);
std::vector<LayerSpec> specs_from_json(const nlohmann::json& j);

}  // namespace iikl::nn
