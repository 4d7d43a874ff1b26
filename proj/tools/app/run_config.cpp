#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "iikl/error.hpp"

namespace iikl::app {

using nlohmann::json;

namespace {

template <typename T>
T typed(const json& v, const std::string& key) {
  const auto wrong = [&] { return ConfigError("config key '" + key + "' has the wrong type: " + v.dump()); };
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw wrong();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw wrong();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw wrong();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw wrong();
  }
  return v.get<T>();
}

template <typename T>
std::vector<T> typed_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
  std::vector<T> out;
  for (const auto& e : v) out.push_back(typed<T>(e, key));
  return out;
}

using Setter = std::function<void(RunConfig&, const json&)>;

#define IIKL_FIELD(name, type) \
  {#name, [](RunConfig& c, const json& v) { c.name = typed<type>(v, #name); }}
#define IIKL_LIST(name, type) \
  {#name, [](RunConfig& c, const json& v) { c.name = typed_list<type>(v, #name); }}

const std::map<std::string, Setter>& run_setters() {
  static const std::map<std::string, Setter> table = {
      IIKL_FIELD(data, std::string),
      IIKL_FIELD(out, std::string),
      {"label_column",
       [](RunConfig& c, const json& v) {
         if (v.is_null()) {
           c.label_column.reset();
         } else if (v.is_number_integer()) {
           c.label_column = std::to_string(v.get<int>());
         } else {
           c.label_column = typed<std::string>(v, "label_column");
         }
       }},
      IIKL_FIELD(normalize, bool),
      IIKL_FIELD(threads, int),
      IIKL_FIELD(kind, std::string),
      IIKL_FIELD(n, int),
      IIKL_FIELD(ambient_dim, int),
      IIKL_FIELD(noise, double),
      IIKL_FIELD(checkpoint, std::string),
      IIKL_FIELD(embedding, std::string),
      IIKL_FIELD(eval_neighbor_space, std::string),
      IIKL_LIST(baselines, std::string),
      IIKL_FIELD(method, std::string),
      IIKL_FIELD(ratio, double),
      IIKL_FIELD(recon_iterations, int),
      IIKL_FIELD(recon_lr, double),
      IIKL_FIELD(recon_batch, int),
      IIKL_LIST(recon_hidden, int),
      IIKL_FIELD(test, std::string),
      IIKL_FIELD(classify_k, int),
      IIKL_LIST(i_range, int),
      IIKL_LIST(j_range, int),
      IIKL_FIELD(budget, int),
      IIKL_LIST(gammas, double),
      IIKL_FIELD(runs, int),
  };
  return table;
}

#undef IIKL_FIELD
#undef IIKL_LIST

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("'" + s + "' is not an integer");
  return v;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

RunConfig apply_run_json(RunConfig base, const json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  const auto& train_keys = trainer::config_keys();
  json train_part = json::object();
  for (const auto& [key, value] : j.items()) {
    if (std::find(train_keys.begin(), train_keys.end(), key) != train_keys.end()) {
      train_part[key] = value;
      continue;
    }
    const auto it = run_setters().find(key);
    if (it == run_setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(base, value);
  }
  base.train = trainer::apply_json(base.train, train_part);
  return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return apply_run_json(std::move(base), j);
}

json to_json(const RunConfig& c) {
  json j = trainer::to_json(c.train);
  j["data"] = c.data;
  j["out"] = c.out;
  j["label_column"] = c.label_column ? json(*c.label_column) : json(nullptr);
  j["normalize"] = c.normalize;
  j["threads"] = c.threads;
  j["kind"] = c.kind;
  j["n"] = c.n;
  j["ambient_dim"] = c.ambient_dim;
  j["noise"] = c.noise;
  j["checkpoint"] = c.checkpoint;
  j["embedding"] = c.embedding;
  j["eval_neighbor_space"] = c.eval_neighbor_space;
  j["baselines"] = c.baselines;
  j["method"] = c.method;
  j["ratio"] = c.ratio;
  j["recon_iterations"] = c.recon_iterations;
  j["recon_lr"] = c.recon_lr;
  j["recon_batch"] = c.recon_batch;
  j["recon_hidden"] = c.recon_hidden;
  j["test"] = c.test;
  j["classify_k"] = c.classify_k;
  j["i_range"] = c.i_range;
  j["j_range"] = c.j_range;
  j["budget"] = c.budget;
  j["gammas"] = c.gammas;
  j["runs"] = c.runs;
  return j;
}

std::vector<int> parse_int_list(const std::string& text) {
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const int lo = parse_int(text.substr(0, colon));
    const int hi = parse_int(text.substr(colon + 1));
    if (hi < lo) throw ConfigError("range '" + text + "' is empty");
    std::vector<int> out;
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::vector<int> out;
  for (const auto& item : split_commas(text)) out.push_back(parse_int(item));
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_commas(text)) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) throw ConfigError("'" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) { return split_commas(text); }

}  // namespace iikl::app
