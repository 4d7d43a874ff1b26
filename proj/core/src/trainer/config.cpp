#include "iikl/trainer/config.hpp"

#include <functional>
#include <map>

#include "iikl/error.hpp"

namespace iikl::trainer {

using nlohmann::json;

std::string to_string(DualMode m) { return m == DualMode::kSoft ? "soft" : "hard"; }
std::string to_string(losses::PushMode m) {
  return m == losses::PushMode::kSecant ? "secant" : "jvp";
}
std::string to_string(NeighborSpace m) {
  return m == NeighborSpace::kAmbient ? "ambient" : "latent";
}

DualMode parse_dual_mode(const std::string& s) {
  if (s == "soft") return DualMode::kSoft;
  if (s == "hard") return DualMode::kHard;
  throw ConfigError("dual mode must be 'soft' or 'hard', got '" + s + "'");
}

losses::PushMode parse_push_mode(const std::string& s) {
  if (s == "secant") return losses::PushMode::kSecant;
  if (s == "jvp") return losses::PushMode::kJvp;
  throw ConfigError("push mode must be 'secant' or 'jvp', got '" + s + "'");
}

NeighborSpace parse_neighbor_space(const std::string& s) {
  if (s == "ambient") return NeighborSpace::kAmbient;
  if (s == "latent") return NeighborSpace::kLatent;
  throw ConfigError("neighbor space must be 'ambient' or 'latent', got '" + s + "'");
}

void validate(const TrainConfig& c) {
  losses::validate_weights(c.weights());
  if (c.k < 2) throw ConfigError("k must be >= 2 so that tangent-vector pairs exist");
  if (c.latent_dim < 1) throw ConfigError("latent_dim must be >= 1");
  if (!(c.lr > 0.0)) throw ConfigError("lr must be > 0");
  if (c.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (c.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (c.iter_imm < 1 || c.iter_iso < 1) throw ConfigError("iter_imm and iter_iso must be >= 1");
  if (!(c.leaky_slope > 0.0 && c.leaky_slope < 1.0)) throw ConfigError("leaky_slope must lie in (0,1)");
  for (int w : c.encoder_hidden) {
    if (w < 1) throw ConfigError("encoder_hidden widths must be >= 1");
  }
  for (int w : c.decoder_hidden) {
    if (w < 1) throw ConfigError("decoder_hidden widths must be >= 1");
  }
  if (!(c.norm_momentum >= 0.0 && c.norm_momentum <= 1.0)) {
    throw ConfigError("norm_momentum must lie in [0,1]");
  }
  if (!(c.tau_re >= 0.0) || !(c.tau_is >= 0.0)) throw ConfigError("thresholds must be >= 0");
}

json to_json(const TrainConfig& c) {
  return json{{"alpha", c.alpha},
              {"gamma", c.gamma},
              {"epsilon", c.epsilon},
              {"k", c.k},
              {"latent_dim", c.latent_dim},
              {"lr", c.lr},
              {"batch_size", c.batch_size},
              {"iterations", c.iterations},
              {"iter_imm", c.iter_imm},
              {"iter_iso", c.iter_iso},
              {"dual_mode", to_string(c.dual_mode)},
              {"push_mode", to_string(c.push_mode)},
              {"neighbor_space", to_string(c.neighbor_space)},
              {"seed", c.seed},
              {"encoder_hidden", c.encoder_hidden},
              {"decoder_hidden", c.decoder_hidden},
              {"leaky_slope", c.leaky_slope},
              {"affine_norm", c.affine_norm},
              {"norm_momentum", c.norm_momentum},
              {"threshold_mode", c.threshold_mode == ThresholdMode::kRelative ? "relative" : "absolute"},
              {"tau_re", c.tau_re},
              {"tau_is", c.tau_is}};
}

namespace {

using Setter = std::function<void(TrainConfig&, const json&)>;

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError("");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
          throw ConfigError("");
        }
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type: " + v.dump());
  }
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"alpha", [](TrainConfig& c, const json& v) { c.alpha = get_as<double>(v, "alpha"); }},
      {"gamma", [](TrainConfig& c, const json& v) { c.gamma = get_as<double>(v, "gamma"); }},
      {"epsilon", [](TrainConfig& c, const json& v) { c.epsilon = get_as<double>(v, "epsilon"); }},
      {"k", [](TrainConfig& c, const json& v) { c.k = get_as<int>(v, "k"); }},
      {"latent_dim", [](TrainConfig& c, const json& v) { c.latent_dim = get_as<int>(v, "latent_dim"); }},
      {"lr", [](TrainConfig& c, const json& v) { c.lr = get_as<double>(v, "lr"); }},
      {"batch_size", [](TrainConfig& c, const json& v) { c.batch_size = get_as<int>(v, "batch_size"); }},
      {"iterations", [](TrainConfig& c, const json& v) { c.iterations = get_as<int>(v, "iterations"); }},
      {"iter_imm", [](TrainConfig& c, const json& v) { c.iter_imm = get_as<int>(v, "iter_imm"); }},
      {"iter_iso", [](TrainConfig& c, const json& v) { c.iter_iso = get_as<int>(v, "iter_iso"); }},
      {"dual_mode",
       [](TrainConfig& c, const json& v) {
         c.dual_mode = parse_dual_mode(get_as<std::string>(v, "dual_mode"));
       }},
      {"push_mode",
       [](TrainConfig& c, const json& v) {
         c.push_mode = parse_push_mode(get_as<std::string>(v, "push_mode"));
       }},
      {"neighbor_space",
       [](TrainConfig& c, const json& v) {
         c.neighbor_space = parse_neighbor_space(get_as<std::string>(v, "neighbor_space"));
       }},
      {"seed", [](TrainConfig& c, const json& v) { c.seed = get_as<std::uint64_t>(v, "seed"); }},
      {"encoder_hidden",
       [](TrainConfig& c, const json& v) {
         if (!v.is_array()) throw ConfigError("config key 'encoder_hidden' must be an array");
         c.encoder_hidden.clear();
         for (const auto& w : v) c.encoder_hidden.push_back(get_as<int>(w, "encoder_hidden"));
       }},
      {"decoder_hidden",
       [](TrainConfig& c, const json& v) {
         if (!v.is_array()) throw ConfigError("config key 'decoder_hidden' must be an array");
         c.decoder_hidden.clear();
         for (const auto& w : v) c.decoder_hidden.push_back(get_as<int>(w, "decoder_hidden"));
       }},
      {"leaky_slope",
       [](TrainConfig& c, const json& v) { c.leaky_slope = get_as<double>(v, "leaky_slope"); }},
      {"affine_norm",
       [](TrainConfig& c, const json& v) { c.affine_norm = get_as<bool>(v, "affine_norm"); }},
      {"norm_momentum",
       [](TrainConfig& c, const json& v) { c.norm_momentum = get_as<double>(v, "norm_momentum"); }},
      {"threshold_mode",
       [](TrainConfig& c, const json& v) {
         const auto s = get_as<std::string>(v, "threshold_mode");
         if (s == "relative") {
           c.threshold_mode = ThresholdMode::kRelative;
         } else if (s == "absolute") {
           c.threshold_mode = ThresholdMode::kAbsolute;
         } else {
           throw ConfigError("threshold_mode must be 'relative' or 'absolute', got '" + s + "'");
         }
       }},
      {"tau_re", [](TrainConfig& c, const json& v) { c.tau_re = get_as<double>(v, "tau_re"); }},
      {"tau_is", [](TrainConfig& c, const json& v) { c.tau_is = get_as<double>(v, "tau_is"); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

TrainConfig apply_json(TrainConfig base, const json& j) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(base, value);
  }
  return base;
}

}  // namespace iikl::trainer
