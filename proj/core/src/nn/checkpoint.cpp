#include "iikl/nn/checkpoint.hpp"

#include <fstream>

#include "iikl/error.hpp"

namespace iikl::nn {

using nlohmann::json;

namespace {

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from(const json& a, Eigen::Index expected, const std::string& what) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != expected) {
    throw LoadError(what + ": expected array of length " + std::to_string(expected));
  }
  Vector v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v[i] = a.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace

json specs_to_json(const std::vector<LayerSpec>& specs) {
  json a = json::array();
  for (const auto& s : specs) {
    json j = {{"in_width", s.in_width},
              {"out_width", s.out_width},
              {"activation", s.activation == Activation::kLeakyRelu ? "leaky_relu" : "identity"},
              {"slope", s.slope},
              {"affine_norm", s.affine_norm}};
    a.push_back(std::move(j));
  }
  return a;
}

std::vector<LayerSpec> specs_from_json(const json& a) {
  if (!a.is_array()) throw LoadError("layer_specs must be an array");
  std::vector<LayerSpec> specs;
  for (const auto& j : a) {
    LayerSpec s;
    s.in_width = j.at("in_width").get<int>();
    s.out_width = j.at("out_width").get<int>();
    const auto act = j.at("activation").get<std::string>();
    s.slope = j.value("slope", s.slope);
    if (act == "leaky_relu") {
      s.activation = Activation::kLeakyRelu;
    } else if (act == "identity") {
      s.activation = Activation::kIdentity;
    } else {
      throw LoadError("unknown activation '" + act + "'");
    }
    s.affine_norm = j.value("affine_norm", false);
    specs.push_back(s);
  }
  return specs;
}

const Network& Checkpoint::at(const std::string& name) const {
  auto it = networks.find(name);
  if (it == networks.end()) throw LoadError("checkpoint has no network named '" + name + "'");
  return it->second;
}

json to_json(const Checkpoint& ckpt) {
  json doc;
  doc["version"] = kCheckpointVersion;
  json specs = json::object(), weights = json::object(), biases = json::object(),
       norms = json::object();
  for (const auto& [name, net] : ckpt.networks) {
    specs[name] = specs_to_json(net.specs());
    json w = json::array(), b = json::array(), n = json::array();
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      const RowMatrix wl = net.weights(l);
      json rows = json::array();
      for (Eigen::Index r = 0; r < wl.rows(); ++r) rows.push_back(vector_json(wl.row(r).transpose()));
      w.push_back(std::move(rows));
      b.push_back(vector_json(net.bias(l)));
      if (net.specs()[l].affine_norm) {
        const auto& st = net.norm_stats(l);
        n.push_back({{"mean", vector_json(st.mean)},
                     {"variance", vector_json(st.variance)},
                     {"scale", vector_json(net.norm_scale(l))},
                     {"shift", vector_json(net.norm_shift(l))}});
      } else {
        n.push_back(nullptr);
      }
    }
    weights[name] = std::move(w);
    biases[name] = std::move(b);
    norms[name] = std::move(n);
  }
  doc["layer_specs"] = std::move(specs);
  doc["weights"] = std::move(weights);
  doc["biases"] = std::move(biases);
  doc["norm_params"] = std::move(norms);
  doc["train_config_echo"] = ckpt.train_config_echo;
  return doc;
}

Checkpoint checkpoint_from_json(const json& doc) {
  try {
    if (doc.at("version").get<std::string>() != kCheckpointVersion) {
      throw LoadError("unsupported checkpoint version '" + doc.at("version").get<std::string>() + "'");
    }
    Checkpoint ckpt;
    for (const auto& [name, specs_json] : doc.at("layer_specs").items()) {
      Network net(specs_from_json(specs_json));
      const auto& w = doc.at("weights").at(name);
      const auto& b = doc.at("biases").at(name);
      const auto& n = doc.at("norm_params").at(name);
      if (w.size() != net.num_layers() || b.size() != net.num_layers() ||
          n.size() != net.num_layers()) {
        throw LoadError("network '" + name + "': per-layer arrays do not match layer_specs");
      }
      for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const auto& s = net.specs()[l];
        const auto& rows = w.at(l);
        if (!rows.is_array() || static_cast<int>(rows.size()) != s.out_width) {
          throw LoadError("network '" + name + "' layer " + std::to_string(l) + ": bad weight rows");
        }
        Matrix wl(s.out_width, s.in_width);
        for (int r = 0; r < s.out_width; ++r) {
          wl.row(r) = vector_from(rows.at(static_cast<std::size_t>(r)), s.in_width, "weights").transpose();
        }
        net.set_weights(l, wl);
        net.set_bias(l, vector_from(b.at(l), s.out_width, "biases"));
        if (s.affine_norm) {
          const auto& np = n.at(l);
          net.set_norm(l, vector_from(np.at("scale"), s.out_width, "scale"),
                       vector_from(np.at("shift"), s.out_width, "shift"),
                       {vector_from(np.at("mean"), s.out_width, "mean"),
                        vector_from(np.at("variance"), s.out_width, "variance")});
        }
      }
      if (!net.parameters().allFinite()) throw LoadError("network '" + name + "' has non-finite parameters");
      ckpt.networks.emplace(name, std::move(net));
    }
    ckpt.train_config_echo = doc.value("train_config_echo", json::object());
    return ckpt;
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(std::string("invalid layer specs in checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write checkpoint " + path.string());
  out << to_json(ckpt).dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open checkpoint " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  return checkpoint_from_json(doc);
}

}  // namespace iikl::nn
