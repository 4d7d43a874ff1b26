#include "iikl/trainer/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "iikl/error.hpp"
#include "iikl/neighborhood/knn.hpp"
#include "iikl/nn/adam.hpp"

namespace iikl::trainer {

using nn::Network;
using neighborhood::SamplingSet;

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint64_t out[1];
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  out[0] = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out[0];
}

// Seeded reshuffle per epoch, cycling through the dataset.
class BatchSampler {
 public:
  BatchSampler(Eigen::Index n, int batch, std::uint64_t seed)
      : order_(static_cast<std::size_t>(n)), batch_(std::min<Eigen::Index>(batch, n)), rng_(seed) {
    std::iota(order_.begin(), order_.end(), 0);
    reshuffle();
  }

  bool epoch_start() const { return cursor_ == 0; }

  std::vector<int> next() {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(batch_));
    while (static_cast<Eigen::Index>(out.size()) < batch_) {
      if (cursor_ == order_.size()) reshuffle();
      out.push_back(order_[cursor_++]);
    }
    return out;
  }

 private:
  void reshuffle() {
    std::shuffle(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
  }

  std::vector<int> order_;
  Eigen::Index batch_;
  std::size_t cursor_ = 0;
  std::mt19937_64 rng_;
};

Matrix gather_rows(const Matrix& m, const std::vector<int>& ids) {
  Matrix out(static_cast<Eigen::Index>(ids.size()), m.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(ids[i]);
  return out;
}

// Mini-batch origins together with their neighbors, encoded once per outer
// iteration. Sampling sets refer to rows of `latents`.
struct LocalNeighborhood {
  Matrix latents;
  std::vector<SamplingSet> sets;
};

LocalNeighborhood build_neighborhood(const Network& encoder, const Matrix& data,
                                     const neighborhood::NeighborIndex& index,
                                     const std::vector<int>& batch) {
  std::vector<int> involved(batch);
  for (int h : batch) {
    const int* row = index.row(h);
    involved.insert(involved.end(), row, row + index.k);
  }
  std::sort(involved.begin(), involved.end());
  involved.erase(std::unique(involved.begin(), involved.end()), involved.end());
  std::vector<int> local(static_cast<std::size_t>(data.rows()), -1);
  for (std::size_t i = 0; i < involved.size(); ++i) local[static_cast<std::size_t>(involved[i])] = static_cast<int>(i);

  LocalNeighborhood out;
  out.latents = encoder.forward_batch(gather_rows(data, involved).transpose()).transpose();
  out.sets.reserve(batch.size());
  for (int h : batch) {
    SamplingSet s;
    s.origin = local[static_cast<std::size_t>(h)];
    s.vectors.resize(index.k, out.latents.cols());
    for (int r = 0; r < index.k; ++r) {
      const int nb = local[static_cast<std::size_t>(index.neighbor(h, r))];
      s.neighbor_ids.push_back(nb);
      s.vectors.row(r) = out.latents.row(nb) - out.latents.row(s.origin);
    }
    s.pairs = neighborhood::pair_list(index.k);
    out.sets.push_back(std::move(s));
  }
  return out;
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

Networks make_networks(int ambient_dim, const TrainConfig& cfg) {
  const int n = cfg.latent_dim;
  Networks nets{
      Network::init(nn::mlp_specs(ambient_dim, cfg.encoder_hidden, n, cfg.leaky_slope, cfg.affine_norm),
                    mix_seed(cfg.seed, 1)),
      Network::init(nn::mlp_specs(n, cfg.decoder_hidden, ambient_dim, cfg.leaky_slope, cfg.affine_norm),
                    mix_seed(cfg.seed, 2)),
      Network::init(nn::mlp_specs(n, cfg.decoder_hidden, ambient_dim, cfg.leaky_slope, cfg.affine_norm),
                    mix_seed(cfg.seed, 3))};
  if (cfg.dual_mode == DualMode::kHard) nets.pullback = nets.decoder;
  return nets;
}

TrainResult train(const Matrix& data, const TrainConfig& cfg, const TrainHooks& hooks) {
  validate(cfg);
  if (data.rows() <= cfg.k) {
    throw ConfigError("dataset has " + std::to_string(data.rows()) + " samples; need more than K = " +
                      std::to_string(cfg.k));
  }
  if (!data.allFinite()) throw InputError("training data contains non-finite values");
  const auto start = std::chrono::steady_clock::now();
  const bool hard = cfg.dual_mode == DualMode::kHard;
  const auto weights = cfg.weights();

  TrainResult result;
  Networks& nets = result.nets;
  nets = hooks.initial != nullptr ? *hooks.initial : make_networks(static_cast<int>(data.cols()), cfg);
  if (nets.encoder.input_width() != data.cols() || nets.encoder.output_width() != cfg.latent_dim ||
      nets.decoder.input_width() != cfg.latent_dim || nets.decoder.output_width() != data.cols() ||
      nets.pullback.input_width() != cfg.latent_dim || nets.pullback.output_width() != data.cols()) {
    throw ConfigError("initial networks do not match the data width and latent_dim");
  }
  Network& encoder = nets.encoder;
  Network& decoder = nets.decoder;
  Network& pullback = hard ? nets.decoder : nets.pullback;

  auto enc_state = nn::AdamState::for_size(encoder.parameter_count(), cfg.lr);
  auto dec_state = nn::AdamState::for_size(decoder.parameter_count(), cfg.lr);
  auto pull_state = nn::AdamState::for_size(pullback.parameter_count(), cfg.lr);

  BatchSampler sampler(data.rows(), cfg.batch_size, mix_seed(cfg.seed, 4));
  neighborhood::NeighborIndex index;
  if (cfg.neighbor_space == NeighborSpace::kAmbient) index = neighborhood::knn_index(data, cfg.k);

  TrainReport& report = result.report;
  const auto fail = [&](const std::string& reason, const Networks& last_finite) {
    report.diverged = true;
    report.abort_reason = reason;
    nets = last_finite;
  };

  for (int it = 0; it < cfg.iterations; ++it) {
    const Networks snapshot = nets;
    try {
      if (cfg.neighbor_space == NeighborSpace::kLatent && sampler.epoch_start()) {
        index = neighborhood::knn_index(encoder.forward_batch(data.transpose()).transpose(), cfg.k);
      }
      const auto batch_ids = sampler.next();
      const Matrix batch = gather_rows(data, batch_ids);
      const auto hood = build_neighborhood(encoder, data, index, batch_ids);

      // Step E: theta moves, omega frozen.
      const auto omega_before = hard ? 0 : pullback.checksum();
      losses::ImmersionResult imm;
      for (int t = 0; t < cfg.iter_imm; ++t) {
        imm = losses::immersion_objective(encoder, decoder, pullback, batch, hood.latents, weights);
        if (!finite(imm.loss.value)) throw NumericError("immersion loss is not finite");
        nn::adam_step(encoder, imm.grad_encoder, enc_state);
        nn::adam_step(decoder, imm.grad_decoder, dec_state);
      }
      if (cfg.affine_norm) {
        encoder.update_norm_statistics(batch.transpose(), cfg.norm_momentum);
        decoder.update_norm_statistics(encoder.forward_batch(batch.transpose()), cfg.norm_momentum);
      }
      if (!hard && pullback.checksum() != omega_before) {
        throw std::logic_error("step E modified the pullback parameters");
      }

      // Step M: omega moves, theta frozen.
      const auto theta_before = encoder.checksum() ^ (hard ? 0 : decoder.checksum());
      losses::AmbientTargets targets;
      if (!hard) {
        targets = losses::ambient_targets(decoder, losses::origin_matrix(hood.latents, hood.sets),
                                          hood.sets, cfg.push_mode);
      }
      losses::IsometryResult iso;
      for (int t = 0; t < cfg.iter_iso; ++t) {
        iso = losses::isometry_objective(pullback, decoder, hood.latents, hood.sets,
                                         hard ? nullptr : &targets, hood.latents, weights,
                                         cfg.push_mode);
        if (!finite(iso.loss.value)) throw NumericError("isometry loss is not finite");
        nn::adam_step(pullback, iso.grad_pullback, hard ? dec_state : pull_state);
      }
      if (cfg.affine_norm && !hard) pullback.update_norm_statistics(hood.latents.transpose(), cfg.norm_momentum);
      if ((encoder.checksum() ^ (hard ? 0 : decoder.checksum())) != theta_before) {
        throw std::logic_error("step M modified the encoder/decoder parameters");
      }

      report.re.push_back(imm.loss.parts.re);
      report.du_d.push_back(imm.loss.parts.du_d);
      report.is.push_back(iso.loss.parts.is);
      report.du_phi.push_back(iso.loss.parts.du_phi);
      report.iterations_used = it + 1;
    } catch (const NumericError& e) {
      fail(e.what(), snapshot);
      break;
    }
    if (hooks.on_iteration) hooks.on_iteration(it, report);
  }

  if (hard) nets.pullback = nets.decoder;
  report.checksum = nets.encoder.checksum() ^ (nets.decoder.checksum() * 31) ^ (nets.pullback.checksum() * 131);
  report.converged = convergence_check(report, cfg);
  std::tie(report.tau_re, report.tau_is) = effective_thresholds(report, cfg);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::pair<double, double> effective_thresholds(const TrainReport& report, const TrainConfig& cfg) {
  if (cfg.threshold_mode == ThresholdMode::kAbsolute) return {cfg.tau_re, cfg.tau_is};
  if (report.re.empty()) return {0.0, 0.0};
  return {cfg.tau_re * report.re.front(), cfg.tau_is * report.is.front()};
}

bool convergence_check(const TrainReport& report, const TrainConfig& cfg) {
  if (report.re.empty() || report.is.empty() || report.diverged) return false;
  const auto any_nan = [](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return !std::isfinite(x); });
  };
  if (any_nan(report.re) || any_nan(report.is) || any_nan(report.du_d) || any_nan(report.du_phi)) {
    return false;
  }
  const auto [tau_re, tau_is] = effective_thresholds(report, cfg);
  // Both thresholds must hold at the same iteration. An untrained decoder is
  // nearly constant, so L_is alone is tiny at the start of every run.
  for (std::size_t i = 0; i < report.re.size() && i < report.is.size(); ++i) {
    if (report.re[i] <= tau_re && report.is[i] <= tau_is) return true;
  }
  return false;
}

ConvergenceStats convergence_probability(const Matrix& data, const TrainConfig& cfg, int runs,
                                         int threads) {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  validate(cfg);
  ConvergenceStats stats;
  stats.reports.resize(static_cast<std::size_t>(runs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int r = next++; r < runs; r = next++) {
      try {
        TrainConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
        stats.reports[static_cast<std::size_t>(r)] = train(data, run_cfg).report;
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  const int pool = std::clamp(threads, 1, runs);
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> workers;
    for (int t = 0; t < pool; ++t) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  int hits = 0;
  for (const auto& rep : stats.reports) {
    stats.converged.push_back(rep.converged);
    hits += rep.converged ? 1 : 0;
  }
  stats.rate = static_cast<double>(hits) / runs;
  return stats;
}

nlohmann::json summary_json(const TrainReport& r) {
  const auto last = [](const std::vector<double>& v) { return v.empty() ? 0.0 : v.back(); };
  const auto min = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
  };
  std::ostringstream checksum;
  checksum << std::hex << std::setw(16) << std::setfill('0') << r.checksum;
  return {{"converged", r.converged},
          {"diverged", r.diverged},
          {"abort_reason", r.abort_reason},
          {"iterations_used", r.iterations_used},
          {"final", {{"re", last(r.re)}, {"is", last(r.is)}, {"du_d", last(r.du_d)}, {"du_phi", last(r.du_phi)}}},
          {"min", {{"re", min(r.re)}, {"is", min(r.is)}}},
          {"tau_re", r.tau_re},
          {"tau_is", r.tau_is},
          {"parameter_checksum", checksum.str()}};
}

std::string trace_csv(const TrainReport& r) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "iteration,re,is,du_d,du_phi\n";
  for (std::size_t i = 0; i < r.re.size(); ++i) {
    out << i + 1 << ',' << r.re[i] << ',' << r.is[i] << ',' << r.du_d[i] << ',' << r.du_phi[i] << '\n';
  }
  return out.str();
}

}  // namespace iikl::trainer
