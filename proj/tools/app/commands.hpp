#pragma once

#include <fstream>
#include <ostream>
#include <string>

#include "run_config.hpp"

namespace iikl::app {

// Shared state of one command invocation. Timestamps and wall times go only
// to the sidecar log so that report files stay byte-identical across runs.
class Context {
 public:
  Context(const RunConfig& cfg, std::ostream& out);

  const RunConfig& cfg;
  std::ostream& out;

  std::string path(const std::string& file) const;
  void log(const std::string& line);
  /// Worker count for parallel sections: threads (0 = hardware), capped by IIKL_THREADS.
  int threads() const;

 private:
  std::ofstream log_;
};

/// Writes config.json: the effective configuration of this invocation.
void write_effective_config(Context& ctx, const std::string& command);

int cmd_synth(Context& ctx);
int cmd_train(Context& ctx);
int cmd_eval(Context& ctx);
int cmd_baseline(Context& ctx);
int cmd_downstream_recon(Context& ctx);
int cmd_downstream_classify(Context& ctx);
int cmd_sweep_k(Context& ctx);
int cmd_sweep_dual(Context& ctx);
int cmd_export_metric(Context& ctx);

}  // namespace iikl::app
