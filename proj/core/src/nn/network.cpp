#include "iikl/nn/network.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include "iikl/error.hpp"

namespace iikl::nn {

namespace {

double activate(Activation act, double slope, double v) {
  if (act == Activation::kLeakyRelu && v < 0.0) return slope * v;
  return v;
}

double derivative(Activation act, double slope, double v) {
  if (act == Activation::kLeakyRelu && v < 0.0) return slope;
  return 1.0;
}

Matrix apply_activation(const LayerSpec& spec, const Matrix& pre) {
  if (spec.activation == Activation::kIdentity) return pre;
  return pre.unaryExpr([&](double v) { return activate(spec.activation, spec.slope, v); });
}

Matrix activation_slopes(const LayerSpec& spec, const Matrix& pre) {
  if (spec.activation == Activation::kIdentity) return Matrix::Ones(pre.rows(), pre.cols());
  return pre.unaryExpr([&](double v) { return derivative(spec.activation, spec.slope, v); });
}

// Multiplies column block s (width `block`) of `m` row-wise by factors.col(s).
void scale_blocks(Matrix& m, const Matrix& factors, int block) {
  for (Eigen::Index s = 0; s < factors.cols(); ++s) {
    m.middleCols(s * block, block).array().colwise() *= factors.col(s).array();
  }
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void validate_specs(std::span<const LayerSpec> specs) {
  if (specs.empty()) throw ConfigError("network needs at least one layer");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    if (s.in_width < 1 || s.out_width < 1) {
      throw ConfigError("layer " + std::to_string(i) + ": widths must be >= 1");
    }
    if (s.activation == Activation::kLeakyRelu && !(s.slope > 0.0 && s.slope < 1.0)) {
      throw ConfigError("layer " + std::to_string(i) + ": LeakyReLU slope must lie in (0,1)");
    }
    if (i > 0 && specs[i - 1].out_width != s.in_width) {
      throw ConfigError("layer " + std::to_string(i) + ": in_width " + std::to_string(s.in_width) +
                        " does not chain with previous out_width " +
                        std::to_string(specs[i - 1].out_width));
    }
  }
}

std::vector<LayerSpec> mlp_specs(int in_width, std::span<const int> hidden, int out_width,
                                 double slope, bool affine_norm) {
  std::vector<LayerSpec> specs;
  int prev = in_width;
  for (int w : hidden) {
    specs.push_back({prev, w, Activation::kLeakyRelu, slope, affine_norm});
    prev = w;
  }
  specs.push_back({prev, out_width, Activation::kIdentity, slope, false});
  return specs;
}

Network::Network(std::vector<LayerSpec> specs) : specs_(std::move(specs)) {
  validate_specs(specs_);
  Eigen::Index off = 0;
  for (const auto& s : specs_) {
    Offsets o;
    o.weights = off;
    off += static_cast<Eigen::Index>(s.out_width) * s.in_width;
    o.bias = off;
    off += s.out_width;
    if (s.affine_norm) {
      o.scale = off;
      off += s.out_width;
      o.shift = off;
      off += s.out_width;
    }
    offsets_.push_back(o);
    stats_.push_back(s.affine_norm ? NormStats{Vector::Zero(s.out_width), Vector::Ones(s.out_width)}
                                   : NormStats{});
  }
  params_ = Vector::Zero(off);
  for (std::size_t l = 0; l < specs_.size(); ++l) {
    if (specs_[l].affine_norm) params_.segment(offsets_[l].scale, specs_[l].out_width).setOnes();
  }
}

Network Network::init(std::vector<LayerSpec> specs, std::uint64_t seed) {
  Network net(std::move(specs));
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < net.specs_.size(); ++l) {
    const auto& s = net.specs_[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(s.in_width));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto w = net.weight_map(l);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
    }
  }
  net.touch();
  return net;
}

int Network::input_width() const { return specs_.empty() ? 0 : specs_.front().in_width; }
int Network::output_width() const { return specs_.empty() ? 0 : specs_.back().out_width; }

void Network::set_parameters(const Vector& params) {
  if (params.size() != params_.size()) {
    throw InputError("parameter vector has size " + std::to_string(params.size()) + ", expected " +
                     std::to_string(params_.size()));
  }
  params_ = params;
  touch();
}

void Network::add_to_parameters(const Vector& delta) {
  if (delta.size() != params_.size()) throw InputError("parameter delta has wrong size");
  params_ += delta;
  touch();
}

Eigen::Map<const RowMatrix> Network::weight_map(std::size_t l) const {
  return {params_.data() + offsets_[l].weights, specs_[l].out_width, specs_[l].in_width};
}

Eigen::Map<RowMatrix> Network::weight_map(std::size_t l) {
  return {params_.data() + offsets_[l].weights, specs_[l].out_width, specs_[l].in_width};
}

RowMatrix Network::weights(std::size_t l) const { return weight_map(l); }

Vector Network::bias(std::size_t l) const {
  return params_.segment(offsets_.at(l).bias, specs_[l].out_width);
}

Vector Network::norm_scale(std::size_t l) const {
  if (!specs_.at(l).affine_norm) return {};
  return params_.segment(offsets_[l].scale, specs_[l].out_width);
}

Vector Network::norm_shift(std::size_t l) const {
  if (!specs_.at(l).affine_norm) return {};
  return params_.segment(offsets_[l].shift, specs_[l].out_width);
}

void Network::set_weights(std::size_t l, const Matrix& w) {
  if (w.rows() != specs_.at(l).out_width || w.cols() != specs_[l].in_width) {
    throw InputError("weight matrix shape does not match layer " + std::to_string(l));
  }
  weight_map(l) = w;
  touch();
}

void Network::set_bias(std::size_t l, const Vector& b) {
  if (b.size() != specs_.at(l).out_width) {
    throw InputError("bias shape does not match layer " + std::to_string(l));
  }
  params_.segment(offsets_[l].bias, b.size()) = b;
  touch();
}

void Network::set_norm(std::size_t l, const Vector& scale, const Vector& shift,
                       const NormStats& stats) {
  const auto& s = specs_.at(l);
  if (!s.affine_norm) throw InputError("layer " + std::to_string(l) + " has no affine norm");
  const Eigen::Index w = s.out_width;
  if (scale.size() != w || shift.size() != w || stats.mean.size() != w ||
      stats.variance.size() != w) {
    throw InputError("norm parameter shape does not match layer " + std::to_string(l));
  }
  if ((stats.variance.array() < 0.0).any()) throw InputError("norm variance must be >= 0");
  params_.segment(offsets_[l].scale, w) = scale;
  params_.segment(offsets_[l].shift, w) = shift;
  stats_[l] = stats;
  touch();
}

Vector Network::norm_factor(std::size_t l) const {
  return norm_scale(l).array() / (stats_[l].variance.array() + kNormEpsilon).sqrt();
}

void Network::touch() {
  static std::atomic<std::uint64_t> counter{0};
  version_ = ++counter;
}

Vector Network::forward(const Vector& x) const {
  Matrix xs = x;
  return forward_batch(xs).col(0);
}

Matrix Network::forward_batch(const Matrix& xs) const { return forward_cached(xs).output; }

ForwardCache Network::forward_cached(const Matrix& xs) const {
  if (xs.rows() != input_width()) {
    throw InputError("input has dimension " + std::to_string(xs.rows()) + ", network expects " +
                     std::to_string(input_width()));
  }
  ForwardCache cache;
  cache.version = version_;
  cache.owner = this;
  const std::size_t L = specs_.size();
  cache.inputs.reserve(L);
  cache.normalized.resize(L);
  cache.pre.reserve(L);
  Matrix a = xs;
  for (std::size_t l = 0; l < L; ++l) {
    const auto& s = specs_[l];
    Matrix pre = weight_map(l) * a;
    pre.colwise() += bias(l);
    if (s.affine_norm) {
      const Vector inv_sd = (stats_[l].variance.array() + kNormEpsilon).rsqrt();
      Matrix normed = (pre.colwise() - stats_[l].mean).array().colwise() * inv_sd.array();
      pre = normed.array().colwise() * norm_scale(l).array();
      pre.colwise() += norm_shift(l);
      cache.normalized[l] = std::move(normed);
    }
    cache.inputs.push_back(std::move(a));
    a = apply_activation(s, pre);
    cache.pre.push_back(std::move(pre));
  }
  if (!a.allFinite()) throw NumericError("network produced a non-finite output");
  cache.output = std::move(a);
  return cache;
}

Matrix Network::jacobian(const Vector& z) const {
  Matrix zs = z;
  return jacobian_batch(zs).stacked;
}

JacobianBatch Network::jacobian_batch(const Matrix& zs) const {
  ForwardCache fwd = forward_cached(zs);
  const int n = input_width();
  const Eigen::Index batch = zs.cols();
  JacobianBatch out;
  out.block = n;
  out.version = version_;
  out.owner = this;
  Matrix chain(n, n * batch);
  for (Eigen::Index s = 0; s < batch; ++s) chain.middleCols(s * n, n).setIdentity();
  for (std::size_t l = 0; l < specs_.size(); ++l) {
    Matrix lin = weight_map(l) * chain;
    Matrix slopes = activation_slopes(specs_[l], fwd.pre[l]);
    if (specs_[l].affine_norm) {
      out.act_slopes.push_back(slopes);
      slopes.array().colwise() *= norm_factor(l).array();
    } else {
      out.act_slopes.emplace_back();
    }
    chain = lin;
    scale_blocks(chain, slopes, n);
    out.linear.push_back(std::move(lin));
    out.slopes.push_back(std::move(slopes));
    out.chain.push_back(chain);
  }
  if (!chain.allFinite()) throw NumericError("jacobian has non-finite entries");
  out.stacked = std::move(chain);
  return out;
}

Vector Network::parameter_gradients(const ForwardCache& cache, const Matrix& cotangents,
                                   Matrix* input_cotangents) const {
  if (cache.owner != this || cache.version != version_) {
    throw UsageError("forward cache is stale: network parameters changed since it was computed");
  }
  if (cotangents.rows() != output_width() || cotangents.cols() != cache.output.cols()) {
    throw InputError("cotangent shape does not match network output");
  }
  Vector grad = Vector::Zero(params_.size());
  Matrix delta = cotangents;
  for (std::size_t li = specs_.size(); li-- > 0;) {
    const auto& s = specs_[li];
    const auto& off = offsets_[li];
    delta.array() *= activation_slopes(s, cache.pre[li]).array();
    if (s.affine_norm) {
      grad.segment(off.scale, s.out_width) =
          (delta.array() * cache.normalized[li].array()).rowwise().sum();
      grad.segment(off.shift, s.out_width) = delta.rowwise().sum();
      const Vector inv_sd = (stats_[li].variance.array() + kNormEpsilon).rsqrt();
      delta.array().colwise() *= (norm_scale(li).array() * inv_sd.array());
    }
    Eigen::Map<RowMatrix> gw(grad.data() + off.weights, s.out_width, s.in_width);
    gw = delta * cache.inputs[li].transpose();
    grad.segment(off.bias, s.out_width) = delta.rowwise().sum();
    if (li > 0) {
      delta = weight_map(li).transpose() * delta;
    } else if (input_cotangents != nullptr) {
      *input_cotangents = weight_map(li).transpose() * delta;
    }
  }
  return grad;
}

Vector Network::jacobian_parameter_gradients(const JacobianBatch& jac,
                                             const Matrix& cotangents) const {
  if (jac.owner != this || jac.version != version_) {
    throw UsageError("jacobian cache is stale: network parameters changed since it was computed");
  }
  if (cotangents.rows() != jac.stacked.rows() || cotangents.cols() != jac.stacked.cols()) {
    throw InputError("jacobian cotangent shape does not match");
  }
  const int n = jac.block;
  Vector grad = Vector::Zero(params_.size());
  Matrix upstream = cotangents;  // dL/dM_l
  for (std::size_t li = specs_.size(); li-- > 0;) {
    const auto& s = specs_[li];
    const auto& off = offsets_[li];
    Matrix scaled = upstream;  // D_l * dL/dM_l
    scale_blocks(scaled, jac.slopes[li], n);
    if (s.affine_norm) {
      // M_l = diag(act' * scale / sd) * P_l, so dM/dscale_k = act'_k / sd_k * P_l[k, :].
      const Vector inv_sd = (stats_[li].variance.array() + kNormEpsilon).rsqrt();
      Matrix prod = upstream.cwiseProduct(jac.linear[li]);
      scale_blocks(prod, jac.act_slopes[li], n);
      grad.segment(off.scale, s.out_width) = prod.rowwise().sum().cwiseProduct(inv_sd);
    }
    Eigen::Map<RowMatrix> gw(grad.data() + off.weights, s.out_width, s.in_width);
    if (li > 0) {
      gw = scaled * jac.chain[li - 1].transpose();
      upstream = weight_map(li).transpose() * scaled;
    } else {
      // M_0 is the identity in every block, so the product collapses to a block sum.
      Matrix acc = Matrix::Zero(s.out_width, n);
      for (Eigen::Index b = 0; b < jac.size(); ++b) acc += scaled.middleCols(b * n, n);
      gw = acc;
    }
  }
  return grad;
}

void Network::update_norm_statistics(const Matrix& xs, double momentum) {
  if (!(momentum >= 0.0 && momentum <= 1.0)) throw ConfigError("momentum must lie in [0,1]");
  if (xs.rows() != input_width()) throw InputError("input dimension mismatch");
  Matrix a = xs;
  for (std::size_t l = 0; l < specs_.size(); ++l) {
    const auto& s = specs_[l];
    Matrix pre = weight_map(l) * a;
    pre.colwise() += bias(l);
    if (s.affine_norm && xs.cols() > 0) {
      const Vector mean = pre.rowwise().mean();
      const Vector var = (pre.colwise() - mean).array().square().rowwise().mean();
      stats_[l].mean = (1.0 - momentum) * stats_[l].mean + momentum * mean;
      stats_[l].variance = (1.0 - momentum) * stats_[l].variance + momentum * var;
      const Vector inv_sd = (stats_[l].variance.array() + kNormEpsilon).rsqrt();
      Matrix normed = (pre.colwise() - stats_[l].mean).array().colwise() * inv_sd.array();
      pre = normed.array().colwise() * norm_scale(l).array();
      pre.colwise() += norm_shift(l);
    }
    a = apply_activation(s, pre);
  }
  touch();
}

std::uint64_t Network::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a(params_.data(), sizeof(double) * static_cast<std::size_t>(params_.size()), h);
  for (const auto& st : stats_) {
    h = fnv1a(st.mean.data(), sizeof(double) * static_cast<std::size_t>(st.mean.size()), h);
    h = fnv1a(st.variance.data(), sizeof(double) * static_cast<std::size_t>(st.variance.size()), h);
  }
  return h;
}

}  // namespace iikl::nn
