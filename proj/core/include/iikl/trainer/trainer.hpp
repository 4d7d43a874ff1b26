#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iikl/nn/network.hpp"
#include "iikl/trainer/config.hpp"

namespace iikl::trainer {

struct TrainReport {
  // One entry per outer iteration.
  std::vector<double> re;
  std::vector<double> is;
  std::vector<double> du_d;
  std::vector<double> du_phi;
  bool converged = false;
  bool diverged = false;
  std::string abort_reason;
  int iterations_used = 0;
  double wall_seconds = 0.0;
  std::uint64_t checksum = 0;
  double tau_re = 0.0;  // effective thresholds after resolving relative mode
  double tau_is = 0.0;
};

struct Networks {
  nn::Network encoder;
  nn::Network decoder;
  nn::Network pullback;  // equal to decoder in hard-dual mode
};

struct TrainResult {
  Networks nets;
  TrainReport report;
};

struct TrainHooks {
  // Called after every outer iteration with the iteration index.
  std::function<void(int, const TrainReport&)> on_iteration;
  // Warm start; architectures must match the config.
  const Networks* initial = nullptr;
};

/// Default architectures: encoder d -> hidden -> n, decoder/pullback n -> hidden -> d.
Networks make_networks(int ambient_dim, const TrainConfig& cfg);

// Alternating optimization. Each outer iteration draws a mini-batch, encodes
// it together with its K neighbors, runs iter_imm Adam steps on theta
// (encoder, decoder) against alpha*L_re + gamma*L_du,d with omega frozen, then
// iter_iso Adam steps on omega against epsilon*L_is + gamma*L_du,phi with
// theta frozen. Deterministic per seed. A non-finite loss aborts the run and
// returns the parameters of the last finite iteration.
TrainResult train(const Matrix& data, const TrainConfig& cfg, const TrainHooks& hooks = {});

/// True iff no divergence occurred and some iteration has L_re and L_is both
/// at or below their thresholds.
bool convergence_check(const TrainReport& report, const TrainConfig& cfg);

/// Thresholds implied by cfg for this report (relative mode scales by the first entry).
std::pair<double, double> effective_thresholds(const TrainReport& report, const TrainConfig& cfg);

struct ConvergenceStats {
  double rate = 0.0;
  std::vector<bool> converged;  // per run, in seed order
  std::vector<TrainReport> reports;
};

/// Runs `runs` trainings with seeds cfg.seed + r. Up to `threads` runs execute
/// concurrently; results are merged in seed order.
ConvergenceStats convergence_probability(const Matrix& data, const TrainConfig& cfg, int runs,
                                         int threads = 1);

nlohmann::json summary_json(const TrainReport& report);
/// iteration,re,is,du_d,du_phi
std::string trace_csv(const TrainReport& report);

}  // namespace iikl::trainer
