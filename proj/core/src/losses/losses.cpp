#include "iikl/losses/losses.hpp"

#include <cmath>
#include <string>

#include "iikl/error.hpp"
#include "iikl/geometry/metric.hpp"

namespace iikl::losses {

ReconstructionResult reconstruction_loss(const Network& encoder, const Network& decoder,
                                         const Matrix& batch, bool with_gradients) {
  if (batch.rows() == 0) throw InputError("reconstruction_loss: empty batch");
  if (batch.cols() != encoder.input_width() || decoder.output_width() != encoder.input_width()) {
    throw InputError("reconstruction_loss: batch width " + std::to_string(batch.cols()) +
                     " does not match encoder/decoder widths");
  }
  const Matrix xt = batch.transpose();
  const auto enc = encoder.forward_cached(xt);
  const auto dec = decoder.forward_cached(enc.output);
  const Matrix diff = dec.output - xt;
  const double denom = static_cast<double>(diff.size());
  ReconstructionResult out;
  out.loss.parts.re = diff.squaredNorm() / denom;
  out.loss.value = out.loss.parts.re;
  if (with_gradients) {
    Matrix z_cot;
    out.grad_decoder = decoder.parameter_gradients(dec, (2.0 / denom) * diff, &z_cot);
    out.grad_encoder = encoder.parameter_gradients(enc, z_cot);
  }
  return out;
}

Vector push_tangent(const Network& decoder, const Vector& z, const Vector& p, PushMode mode) {
  if (z.size() != decoder.input_width() || p.size() != z.size()) {
    throw InputError("push_tangent: latent dimensions do not match the decoder");
  }
  if (mode == PushMode::kJvp) return decoder.jacobian(z) * p;
  Matrix pts(z.size(), 2);
  pts.col(0) = z + p;
  pts.col(1) = z;
  const Matrix out = decoder.forward_batch(pts);
  return out.col(0) - out.col(1);
}

Matrix origin_matrix(const Matrix& latents, const std::vector<SamplingSet>& sets) {
  Matrix origins(latents.cols(), static_cast<Eigen::Index>(sets.size()));
  for (std::size_t h = 0; h < sets.size(); ++h) {
    const int o = sets[h].origin;
    if (o < 0 || o >= latents.rows()) throw InputError("sampling set origin out of range");
    origins.col(static_cast<Eigen::Index>(h)) = latents.row(o).transpose();
  }
  return origins;
}

namespace {

void check_sets(const std::vector<SamplingSet>& sets, Eigen::Index latent_dim) {
  if (sets.empty()) throw ConfigError("isometric loss needs at least one sampling set");
  for (const auto& s : sets) {
    if (s.pairs.empty()) {
      throw ConfigError("isometric loss: sampling set of origin " + std::to_string(s.origin) +
                        " has no tangent-vector pairs (K must be >= 2)");
    }
    if (s.vectors.cols() != latent_dim) throw InputError("tangent vectors have the wrong dimension");
  }
}

// Column block per origin of all secant end points z_h + p_r.
Matrix shifted_points(const Matrix& origins, const std::vector<SamplingSet>& sets,
                      std::vector<Eigen::Index>& offsets) {
  Eigen::Index total = 0;
  offsets.clear();
  for (const auto& s : sets) {
    offsets.push_back(total);
    total += s.vectors.rows();
  }
  Matrix pts(origins.rows(), total);
  for (std::size_t h = 0; h < sets.size(); ++h) {
    const auto& v = sets[h].vectors;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      pts.col(offsets[h] + r) = origins.col(static_cast<Eigen::Index>(h)) + v.row(r).transpose();
    }
  }
  return pts;
}

// Symmetric K x K matrix holding the residual of each listed pair in both
// triangles, zero elsewhere.
Matrix pair_matrix(const SamplingSet& s, const Matrix& residual) {
  const Eigen::Index k = s.vectors.rows();
  Matrix m = Matrix::Zero(k, k);
  for (const auto& [a, b] : s.pairs) {
    m(a, b) = residual(a, b);
    m(b, a) = residual(a, b);
  }
  return m;
}

struct MetricSide {
  double value = 0.0;
  Vector grad;
  std::vector<Matrix> residual_pairs;  // per origin, weighted by 1/(H * pairs)
};

// Metric half of the isometric loss: value, omega-gradient, and the weighted
// residual matrices needed for the push-side gradient.
MetricSide metric_side(const Network& pullback, const Matrix& origins,
                       const std::vector<SamplingSet>& sets, const std::vector<Matrix>& gram,
                       bool with_gradient) {
  const auto jac = pullback.jacobian_batch(origins);
  const double inv_h = 1.0 / static_cast<double>(sets.size());
  MetricSide out;
  Matrix cot(jac.stacked.rows(), jac.stacked.cols());
  for (std::size_t h = 0; h < sets.size(); ++h) {
    const auto& s = sets[h];
    const auto j = jac.jacobian(static_cast<Eigen::Index>(h));
    const Matrix g = geometry::gram_of_jacobian(j);
    const Matrix latent_gram = s.vectors * g * s.vectors.transpose();
    const Matrix residual = latent_gram - gram[h];
    const double w = inv_h / static_cast<double>(s.pairs.size());
    double sum = 0.0;
    for (const auto& [a, b] : s.pairs) sum += residual(a, b) * residual(a, b);
    out.value += w * sum;
    Matrix weighted = w * pair_matrix(s, residual);
    if (with_gradient) {
      const Matrix sens = s.vectors.transpose() * weighted * s.vectors;  // dL/dG
      cot.middleCols(static_cast<Eigen::Index>(h) * jac.block, jac.block) = 2.0 * j * sens;
    }
    out.residual_pairs.push_back(std::move(weighted));
  }
  if (with_gradient) out.grad = pullback.jacobian_parameter_gradients(jac, cot);
  return out;
}

}  // namespace

AmbientTargets ambient_targets(const Network& decoder, const Matrix& origins,
                               const std::vector<SamplingSet>& sets, PushMode mode) {
  check_sets(sets, origins.rows());
  AmbientTargets t;
  t.mode = mode;
  if (mode == PushMode::kSecant) {
    std::vector<Eigen::Index> offsets;
    const Matrix ends = decoder.forward_batch(shifted_points(origins, sets, offsets));
    const Matrix base = decoder.forward_batch(origins);
    for (std::size_t h = 0; h < sets.size(); ++h) {
      const Eigen::Index k = sets[h].vectors.rows();
      Matrix u = (ends.middleCols(offsets[h], k).colwise() - base.col(static_cast<Eigen::Index>(h)))
                     .transpose();
      t.gram.push_back(u * u.transpose());
      t.pushes.push_back(std::move(u));
    }
  } else {
    const auto jac = decoder.jacobian_batch(origins);
    for (std::size_t h = 0; h < sets.size(); ++h) {
      Matrix u = sets[h].vectors * jac.jacobian(static_cast<Eigen::Index>(h)).transpose();
      t.gram.push_back(u * u.transpose());
      t.pushes.push_back(std::move(u));
    }
  }
  return t;
}

IsometricResult isometric_loss(const Network& pullback, const Matrix& origins,
                               const std::vector<SamplingSet>& sets, const AmbientTargets& targets,
                               bool with_gradient) {
  check_sets(sets, origins.rows());
  if (targets.gram.size() != sets.size()) throw InputError("ambient targets do not match sampling sets");
  auto side = metric_side(pullback, origins, sets, targets.gram, with_gradient);
  IsometricResult out;
  out.loss.parts.is = side.value;
  out.loss.value = side.value;
  out.grad_pullback = std::move(side.grad);
  return out;
}

IsometricResult isometric_loss(const Network& pullback, const Network& decoder, const Matrix& latents,
                               const std::vector<SamplingSet>& sets, PushMode mode,
                               IsometricOptions options) {
  check_sets(sets, latents.cols());
  const Matrix origins = origin_matrix(latents, sets);
  if (!options.decoder_gradient) {
    return isometric_loss(pullback, origins, sets, ambient_targets(decoder, origins, sets, mode),
                          options.pullback_gradient);
  }

  // Pushes are recomputed with caches so the push path can be differentiated.
  std::vector<Matrix> pushes, gram;
  std::vector<Eigen::Index> offsets;
  nn::ForwardCache ends_cache, base_cache;
  nn::JacobianBatch dec_jac;
  if (mode == PushMode::kSecant) {
    ends_cache = decoder.forward_cached(shifted_points(origins, sets, offsets));
    base_cache = decoder.forward_cached(origins);
    for (std::size_t h = 0; h < sets.size(); ++h) {
      const Eigen::Index k = sets[h].vectors.rows();
      pushes.push_back((ends_cache.output.middleCols(offsets[h], k).colwise() -
                        base_cache.output.col(static_cast<Eigen::Index>(h)))
                           .transpose());
    }
  } else {
    dec_jac = decoder.jacobian_batch(origins);
    for (std::size_t h = 0; h < sets.size(); ++h) {
      pushes.push_back(sets[h].vectors * dec_jac.jacobian(static_cast<Eigen::Index>(h)).transpose());
    }
  }
  for (const auto& u : pushes) gram.push_back(u * u.transpose());

  auto side = metric_side(pullback, origins, sets, gram, options.pullback_gradient);
  IsometricResult out;
  out.loss.parts.is = side.value;
  out.loss.value = side.value;
  out.grad_pullback = std::move(side.grad);

  // L = sum w (L_ab - <u_a,u_b>)^2, so dL/du_a = -2 sum_b w R_ab u_b.
  if (mode == PushMode::kSecant) {
    Matrix ends_cot = Matrix::Zero(ends_cache.output.rows(), ends_cache.output.cols());
    Matrix base_cot = Matrix::Zero(base_cache.output.rows(), base_cache.output.cols());
    for (std::size_t h = 0; h < sets.size(); ++h) {
      const Matrix du = -2.0 * side.residual_pairs[h] * pushes[h];  // K x d
      ends_cot.middleCols(offsets[h], du.rows()) = du.transpose();
      base_cot.col(static_cast<Eigen::Index>(h)) = -du.colwise().sum().transpose();
    }
    out.grad_decoder = decoder.parameter_gradients(ends_cache, ends_cot) +
                       decoder.parameter_gradients(base_cache, base_cot);
  } else {
    Matrix cot(dec_jac.stacked.rows(), dec_jac.stacked.cols());
    for (std::size_t h = 0; h < sets.size(); ++h) {
      const Matrix du = -2.0 * side.residual_pairs[h] * pushes[h];
      cot.middleCols(static_cast<Eigen::Index>(h) * dec_jac.block, dec_jac.block) =
          du.transpose() * sets[h].vectors;
    }
    out.grad_decoder = decoder.jacobian_parameter_gradients(dec_jac, cot);
  }
  return out;
}

DualResult dual_loss(const Network& decoder, const Network& pullback, const Matrix& latents,
                     TrainableSide side, bool with_gradient) {
  if (decoder.input_width() != pullback.input_width() ||
      decoder.output_width() != pullback.output_width()) {
    throw ConfigError("dual loss: decoder and pullback widths differ");
  }
  const Network& trainable = side == TrainableSide::kDecoder ? decoder : pullback;
  DualResult out;
  if (with_gradient) out.grad = Vector::Zero(trainable.parameter_count());
  if (&decoder == &pullback || latents.rows() == 0) return out;
  if (latents.cols() != decoder.input_width()) throw InputError("dual loss: latent width mismatch");

  const Matrix zt = latents.transpose();
  const auto fd = decoder.forward_cached(zt);
  const auto fp = pullback.forward_cached(zt);
  const Matrix r = fd.output - fp.output;
  const double inv_n = 1.0 / static_cast<double>(latents.rows());
  Matrix cot = Matrix::Zero(r.rows(), r.cols());
  double sum = 0.0;
  for (Eigen::Index s = 0; s < r.cols(); ++s) {
    const double norm = r.col(s).norm();
    sum += norm;
    if (norm > 0.0) cot.col(s) = r.col(s) * (inv_n / norm);
  }
  const double value = sum * inv_n;
  out.loss.value = value;
  if (side == TrainableSide::kDecoder) {
    out.loss.parts.du_d = value;
    if (with_gradient) out.grad = decoder.parameter_gradients(fd, cot);
  } else {
    out.loss.parts.du_phi = value;
    if (with_gradient) out.grad = pullback.parameter_gradients(fp, -cot);
  }
  return out;
}

void validate_weights(const StageWeights& w) {
  if (!(w.alpha >= 0.0) || !(w.gamma >= 0.0)) {
    throw ConfigError("alpha and gamma must be >= 0");
  }
  if (!(w.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
}

ImmersionResult immersion_objective(const Network& encoder, const Network& decoder,
                                    const Network& pullback, const Matrix& batch,
                                    const Matrix& dual_latents, const StageWeights& w,
                                    bool with_gradients) {
  validate_weights(w);
  const auto rec = reconstruction_loss(encoder, decoder, batch, with_gradients);
  const auto dual = dual_loss(decoder, pullback, dual_latents, TrainableSide::kDecoder, with_gradients);
  ImmersionResult out;
  out.loss.parts.re = rec.loss.parts.re;
  out.loss.parts.du_d = dual.loss.parts.du_d;
  out.loss.value = w.alpha * out.loss.parts.re + w.gamma * out.loss.parts.du_d;
  if (with_gradients) {
    out.grad_encoder = w.alpha * rec.grad_encoder;
    out.grad_decoder = w.alpha * rec.grad_decoder + w.gamma * dual.grad;
  }
  return out;
}

IsometryResult isometry_objective(const Network& pullback, const Network& decoder,
                                  const Matrix& latents, const std::vector<SamplingSet>& sets,
                                  const AmbientTargets* targets, const Matrix& dual_latents,
                                  const StageWeights& w, PushMode mode, bool with_gradients) {
  validate_weights(w);
  const bool shared = &pullback == &decoder;
  IsometricResult iso;
  if (shared) {
    iso = isometric_loss(pullback, decoder, latents, sets, mode,
                         {.pullback_gradient = with_gradients, .decoder_gradient = with_gradients});
    if (with_gradients) iso.grad_pullback += iso.grad_decoder;
  } else if (targets != nullptr) {
    iso = isometric_loss(pullback, origin_matrix(latents, sets), sets, *targets, with_gradients);
  } else {
    iso = isometric_loss(pullback, decoder, latents, sets, mode, {.pullback_gradient = with_gradients});
  }
  const auto dual = dual_loss(decoder, pullback, dual_latents, TrainableSide::kPullback, with_gradients);
  IsometryResult out;
  out.loss.parts.is = iso.loss.parts.is;
  out.loss.parts.du_phi = dual.loss.parts.du_phi;
  out.loss.value = w.epsilon * out.loss.parts.is + w.gamma * out.loss.parts.du_phi;
  if (with_gradients) out.grad_pullback = w.epsilon * iso.grad_pullback + w.gamma * dual.grad;
  return out;
}

StageObjectives stage_objectives(const Network& encoder, const Network& decoder,
                                 const Network& pullback, const Matrix& batch,
                                 const Matrix& latents, const std::vector<SamplingSet>& sets,
                                 const StageWeights& w, PushMode mode) {
  StageObjectives out;
  out.immersion = immersion_objective(encoder, decoder, pullback, batch, latents, w);
  out.isometry = isometry_objective(pullback, decoder, latents, sets, nullptr, latents, w, mode);
  out.total = out.immersion.loss.value + out.isometry.loss.value;
  return out;
}

}  // namespace iikl::losses
