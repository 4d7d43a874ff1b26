#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "iikl/types.hpp"

namespace iikl::nn {

enum class Activation { kIdentity, kLeakyRelu };

struct LayerSpec {
  int in_width = 1;
  int out_width = 1;
  Activation activation = Activation::kIdentity;
  double slope = 0.01;  // LeakyReLU negative-side slope, strictly inside (0, 1)
  bool affine_norm = false;

  bool operator==(const LayerSpec&) const = default;
};

/// Throws ConfigError unless widths are positive, slopes lie in (0,1) and
/// consecutive layers chain.
void validate_specs(std::span<const LayerSpec> specs);

/// Dense feedforward chain of `d -> hidden... -> out` with LeakyReLU hidden
/// activations and an identity output, as used for all three maps.
std::vector<LayerSpec> mlp_specs(int in_width, std::span<const int> hidden, int out_width,
                                 double slope = 0.01, bool affine_norm = false);

// Frozen running statistics of an affine-norm layer. They are buffers, not
// parameters: optimizers never touch them and Jacobians treat them as constants.
struct NormStats {
  Vector mean;
  Vector variance;
};

// Intermediate values of a batched forward pass, one column per sample.
struct ForwardCache {
  std::vector<Matrix> inputs;      // input to layer l
  std::vector<Matrix> normalized;  // (a - mean)/sqrt(var + eps); empty when no norm
  std::vector<Matrix> pre;         // activation input of layer l
  Matrix output;
  std::uint64_t version = 0;
  const void* owner = nullptr;
};

// Input-Jacobians of a batch, stored side by side: block s occupies
// columns [s*n, (s+1)*n) of `stacked`, where n is the input width.
struct JacobianBatch {
  Matrix stacked;
  int block = 0;
  std::vector<Matrix> chain;   // per layer l: M_l = D_l W_l M_{l-1}, stacked like above
  std::vector<Matrix> linear;  // per layer l: W_l M_{l-1}, stacked
  std::vector<Matrix> slopes;  // per layer l: D_l diagonal (activation slope times norm factor)
  std::vector<Matrix> act_slopes;  // activation slope alone; filled for affine-norm layers only
  std::uint64_t version = 0;
  const void* owner = nullptr;

  Eigen::Index size() const { return block == 0 ? 0 : stacked.cols() / block; }
  auto jacobian(Eigen::Index s) const { return stacked.middleCols(s * block, block); }
};

class Network {
 public:
  static constexpr double kNormEpsilon = 1e-5;

  Network() = default;
  /// All parameters zero, norm scales one. Use init() for a trainable net.
  explicit Network(std::vector<LayerSpec> specs);

  /// Weights uniform in +-1/sqrt(in_width), biases zero. Deterministic per seed.
  static Network init(std::vector<LayerSpec> specs, std::uint64_t seed);

  const std::vector<LayerSpec>& specs() const { return specs_; }
  std::size_t num_layers() const { return specs_.size(); }
  int input_width() const;
  int output_width() const;

  Eigen::Index parameter_count() const { return params_.size(); }
  const Vector& parameters() const { return params_; }
  void set_parameters(const Vector& params);
  /// params += delta. Used by the optimizers.
  void add_to_parameters(const Vector& delta);

  RowMatrix weights(std::size_t layer) const;
  Vector bias(std::size_t layer) const;
  Vector norm_scale(std::size_t layer) const;
  Vector norm_shift(std::size_t layer) const;
  const NormStats& norm_stats(std::size_t layer) const { return stats_.at(layer); }

  void set_weights(std::size_t layer, const Matrix& w);
  void set_bias(std::size_t layer, const Vector& b);
  void set_norm(std::size_t layer, const Vector& scale, const Vector& shift, const NormStats& stats);

  Vector forward(const Vector& x) const;
  /// Columns of `xs` are samples.
  Matrix forward_batch(const Matrix& xs) const;
  ForwardCache forward_cached(const Matrix& xs) const;

  /// d_out x d_in matrix of exact partials. A pre-activation of exactly zero
  /// takes the positive LeakyReLU branch (derivative 1).
  Matrix jacobian(const Vector& z) const;
  JacobianBatch jacobian_batch(const Matrix& zs) const;

  /// Gradient of sum_s <cotangents.col(s), f(x_s)> with respect to the
  /// parameter vector. Throws UsageError when the cache predates a parameter change.
  /// When `input_cotangents` is given it receives the gradient with respect to
  /// the inputs, one column per sample.
  Vector parameter_gradients(const ForwardCache& cache, const Matrix& cotangents,
                             Matrix* input_cotangents = nullptr) const;

  /// Gradient of sum_s <C_s, J(z_s)>_F with respect to the parameters, with C
  /// stacked like JacobianBatch::stacked. Activation slopes are piecewise
  /// constant, so biases and norm shifts receive zero gradient.
  Vector jacobian_parameter_gradients(const JacobianBatch& jac, const Matrix& cotangents) const;

  /// Exponential moving update of the frozen normalization statistics from a
  /// batch; call between optimizer steps only.
  void update_norm_statistics(const Matrix& xs, double momentum);

  /// Bumped on every mutation; caches compare against it.
  std::uint64_t version() const { return version_; }
  /// FNV-1a over the raw parameter and statistics bytes.
  std::uint64_t checksum() const;

 private:
  struct Offsets {
    Eigen::Index weights = 0;
    Eigen::Index bias = 0;
    Eigen::Index scale = -1;
    Eigen::Index shift = -1;
  };

  Eigen::Map<const RowMatrix> weight_map(std::size_t layer) const;
  Eigen::Map<RowMatrix> weight_map(std::size_t layer);
  Vector norm_factor(std::size_t layer) const;
  void touch();

  std::vector<LayerSpec> specs_;
  std::vector<Offsets> offsets_;
  std::vector<NormStats> stats_;
  Vector params_;
  std::uint64_t version_ = 0;
};

}  // namespace iikl::nn
