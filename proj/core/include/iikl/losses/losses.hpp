#pragma once

#include <vector>

#include "iikl/neighborhood/knn.hpp"
#include "iikl/nn/network.hpp"
#include "iikl/types.hpp"

namespace iikl::losses {

using nn::Network;
using neighborhood::SamplingSet;

// How a latent displacement p at z is carried into the ambient space.
//   secant: f_D(z + p) - f_D(z)   (neighborhood approximation, default)
//   jvp:    J_D(z) p              (linearization; makes the hard-dual loss vanish)
enum class PushMode { kSecant, kJvp };

enum class TrainableSide { kDecoder, kPullback };

struct LossComponents {
  double re = 0.0;
  double is = 0.0;
  double du_d = 0.0;
  double du_phi = 0.0;
};

struct LossValue {
  double value = 0.0;
  LossComponents parts;
};

// Mean squared reconstruction error, averaged over samples and coordinates.
// `batch` holds one sample per row.
struct ReconstructionResult {
  LossValue loss;
  Vector grad_encoder;
  Vector grad_decoder;
};
ReconstructionResult reconstruction_loss(const Network& encoder, const Network& decoder,
                                         const Matrix& batch, bool with_gradients = true);

Vector push_tangent(const Network& decoder, const Vector& z, const Vector& p, PushMode mode);

// Decoder pushes of every tangent vector and their pairwise Euclidean Gram,
// computed once per outer iteration while the decoder is frozen.
struct AmbientTargets {
  PushMode mode = PushMode::kSecant;
  std::vector<Matrix> pushes;  // per origin: K x d
  std::vector<Matrix> gram;    // per origin: K x K
};

/// Origins z_h as columns, in the order of `sets`.
Matrix origin_matrix(const Matrix& latents, const std::vector<SamplingSet>& sets);

AmbientTargets ambient_targets(const Network& decoder, const Matrix& origins,
                               const std::vector<SamplingSet>& sets, PushMode mode);

// Mean over origins of the pair-averaged squared discrepancy between the
// pullback metric inner product and the ambient inner product of the pushes.
struct IsometricResult {
  LossValue loss;
  Vector grad_pullback;
  Vector grad_decoder;  // filled only when decoder gradients were requested
};

struct IsometricOptions {
  bool pullback_gradient = true;
  // Also differentiate through the decoder pushes. Used when decoder and
  // pullback share parameters.
  bool decoder_gradient = false;
};

IsometricResult isometric_loss(const Network& pullback, const Network& decoder, const Matrix& latents,
                               const std::vector<SamplingSet>& sets, PushMode mode,
                               IsometricOptions options = {});

/// Same loss against precomputed targets; decoder gradients are unavailable here.
IsometricResult isometric_loss(const Network& pullback, const Matrix& origins,
                               const std::vector<SamplingSet>& sets, const AmbientTargets& targets,
                               bool with_gradient = true);

// Mean (unsquared) Euclidean norm of f_D(z) - f_phi(z) over the rows of
// `latents`. The value does not depend on `side`; only the returned gradient
// does. Passing the same network twice yields exactly zero.
struct DualResult {
  LossValue loss;
  Vector grad;
};
DualResult dual_loss(const Network& decoder, const Network& pullback, const Matrix& latents,
                     TrainableSide side, bool with_gradient = true);

struct StageWeights {
  double alpha = 1.0;
  double gamma = 1.0;
  double epsilon = 1.0;
};

/// Throws ConfigError for negative weights or a non-positive epsilon.
void validate_weights(const StageWeights& w);

// Step E objective: alpha * L_re + gamma * L_du,d, gradients for theta.
struct ImmersionResult {
  LossValue loss;
  Vector grad_encoder;
  Vector grad_decoder;
};
ImmersionResult immersion_objective(const Network& encoder, const Network& decoder,
                                    const Network& pullback, const Matrix& batch,
                                    const Matrix& dual_latents, const StageWeights& w,
                                    bool with_gradients = true);

// Step M objective: epsilon * L_is + gamma * L_du,phi, gradients for omega.
// With a shared decoder/pullback the push path is differentiated too and the
// full gradient lands in grad_pullback.
struct IsometryResult {
  LossValue loss;
  Vector grad_pullback;
};
IsometryResult isometry_objective(const Network& pullback, const Network& decoder,
                                  const Matrix& latents, const std::vector<SamplingSet>& sets,
                                  const AmbientTargets* targets, const Matrix& dual_latents,
                                  const StageWeights& w, PushMode mode,
                                  bool with_gradients = true);

// Both stage composites and V = immersion + isometry. Gradients are routed
// per stage: theta only from the immersion stage, omega only from the
// isometry stage.
struct StageObjectives {
  ImmersionResult immersion;
  IsometryResult isometry;
  double total = 0.0;
};

/// Both composites at once, with component breakdown.
StageObjectives stage_objectives(const Network& encoder, const Network& decoder,
                                 const Network& pullback, const Matrix& batch,
                                 const Matrix& latents, const std::vector<SamplingSet>& sets,
                                 const StageWeights& w, PushMode mode);

}  // namespace iikl::losses
