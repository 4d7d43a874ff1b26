#include "iikl/nn/adam.hpp"

#include <cmath>

#include "iikl/error.hpp"
#include "iikl/nn/network.hpp"

namespace iikl::nn {

AdamState AdamState::for_size(Eigen::Index n, double lr) {
  AdamState s;
  s.m = Vector::Zero(n);
  s.v = Vector::Zero(n);
  s.lr = lr;
  return s;
}

namespace {

Vector adam_delta(const Vector& grads, AdamState& state) {
  if (state.m.size() != grads.size() || state.v.size() != grads.size()) {
    throw InputError("adam state and gradient sizes differ");
  }
  if (!grads.allFinite()) throw NumericError("non-finite gradient; adam step refused");
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  return -state.lr * ((state.m / c1).array() / ((state.v / c2).array().sqrt() + state.epsilon)).matrix();
}

}  // namespace

void adam_step(Vector& params, const Vector& grads, AdamState& state) {
  if (params.size() != grads.size()) throw InputError("parameter and gradient sizes differ");
  params += adam_delta(grads, state);
}

void adam_step(Network& net, const Vector& grads, AdamState& state) {
  if (net.parameter_count() != grads.size()) throw InputError("parameter and gradient sizes differ");
  net.add_to_parameters(adam_delta(grads, state));
}

}  // namespace iikl::nn
