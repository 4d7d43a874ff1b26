#pragma once

#include <cstdint>

#include "iikl/types.hpp"

namespace iikl::nn {

class Network;

struct AdamState {
  Vector m;
  Vector v;
  std::int64_t step = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_size(Eigen::Index n, double lr);
};

// One bias-corrected Adam update. Non-finite gradients raise NumericError and
// leave both params and state untouched.
void adam_step(Vector& params, const Vector& grads, AdamState& state);

/// Same update applied to a network's parameter vector.
void adam_step(Network& net, const Vector& grads, AdamState& state);

}  // namespace iikl::nn
