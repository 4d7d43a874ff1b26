#include "app.hpp"

#include <CLI11.hpp>
#include <functional>
#include <map>
#include <optional>

#include "commands.hpp"
#include "iikl/error.hpp"

namespace iikl::app {

namespace {

using nlohmann::json;

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

// Flag values land here and are turned into a JSON overlay, so flags go
// through exactly the same validation as config-file keys.
struct Overrides {
  std::map<std::string, std::optional<std::string>> strings;
  std::map<std::string, std::optional<int>> ints;
  std::map<std::string, std::optional<double>> doubles;
  std::map<std::string, std::optional<std::uint64_t>> uints;
  std::optional<std::string> i_range, j_range, gammas, baselines, recon_hidden;
  bool no_normalize = false;

  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : strings) {
      if (v) j[k] = *v;
    }
    for (const auto& [k, v] : ints) {
      if (v) j[k] = *v;
    }
    for (const auto& [k, v] : doubles) {
      if (v) j[k] = *v;
    }
    for (const auto& [k, v] : uints) {
      if (v) j[k] = *v;
    }
    if (i_range) j["i_range"] = parse_int_list(*i_range);
    if (j_range) j["j_range"] = parse_int_list(*j_range);
    if (gammas) j["gammas"] = parse_double_list(*gammas);
    if (baselines) j["baselines"] = parse_string_list(*baselines);
    if (recon_hidden) j["recon_hidden"] = parse_int_list(*recon_hidden);
    if (no_normalize) j["normalize"] = false;
    return j;
  }
};

template <typename T>
void add(CLI::App* app, std::map<std::string, std::optional<T>>& slots, const std::string& flag,
         const std::string& key, const std::string& help) {
  app->add_option(flag, slots[key], help);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Riemannian metric learning for point data"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::string> config_path;
  Overrides ov;

  app.add_option("--config", config_path, "JSON run config; flags override its keys");
  add(&app, ov.uints, "--seed", "seed", "Random seed");
  add(&app, ov.strings, "--out", "out", "Output directory");
  add(&app, ov.strings, "--data", "data", "Dataset path (CSV, or OFF for meshes)");
  add(&app, ov.strings, "--label-column", "label_column", "Label column name or zero-based index");
  add(&app, ov.ints, "--k", "k", "Neighbors per sampling set");
  add(&app, ov.ints, "--latent-dim", "latent_dim", "Latent dimension n");
  add(&app, ov.doubles, "--alpha", "alpha", "Reconstruction weight");
  add(&app, ov.doubles, "--gamma", "gamma", "Soft-dual weight");
  add(&app, ov.doubles, "--epsilon", "epsilon", "Isometric loss weight");
  add(&app, ov.strings, "--dual", "dual_mode", "soft or hard");
  add(&app, ov.strings, "--push", "push_mode", "secant or jvp");
  add(&app, ov.strings, "--neighbor-space", "neighbor_space", "ambient or latent");
  add(&app, ov.ints, "--iterations", "iterations", "Outer iterations");
  add(&app, ov.doubles, "--lr", "lr", "Adam learning rate");
  add(&app, ov.ints, "--batch-size", "batch_size", "Mini-batch size");
  add(&app, ov.ints, "--threads", "threads", "Worker threads (0 = all cores)");
  add(&app, ov.strings, "--checkpoint", "checkpoint", "Checkpoint JSON");
  app.add_flag("--no-normalize", ov.no_normalize, "Use raw features instead of min-max scaling");

  std::map<std::string, std::function<int(Context&)>> handlers;
  const auto command = [&](const std::string& name, const std::string& help, std::function<int(Context&)> fn) {
    handlers[name] = std::move(fn);
    return app.add_subcommand(name, help);
  };

  auto* synth = command("synth", "Generate a synthetic manifold dataset", cmd_synth);
  add(synth, ov.strings, "--kind", "kind", "plane, swiss_roll or sphere");
  add(synth, ov.ints, "--n", "n", "Number of samples");
  add(synth, ov.ints, "--ambient-dim", "ambient_dim", "Ambient dimension (plane)");
  add(synth, ov.doubles, "--noise", "noise", "Ambient Gaussian noise level");

  command("train", "Train encoder, decoder and pullback networks", cmd_train);

  auto* eval = command("eval", "Evaluate IPI, isometry and conformal losses", cmd_eval);
  add(eval, ov.strings, "--embedding", "embedding", "Embedding CSV (identity metric)");
  add(eval, ov.strings, "--eval-neighbor-space", "eval_neighbor_space", "ambient or embedded");
  eval->add_option("--baselines", ov.baselines, "Comma list of baselines for sigma (pca,isomap)");

  auto* baseline = command("baseline", "Compute a PCA or ISOMAP embedding", cmd_baseline);
  add(baseline, ov.strings, "--method", "method", "pca or isomap");

  auto* recon = command("downstream-recon", "Metric-augmented reconstruction comparison", cmd_downstream_recon);
  add(recon, ov.doubles, "--ratio", "ratio", "Validation ratio");
  add(recon, ov.ints, "--recon-iterations", "recon_iterations", "Regressor training steps");
  add(recon, ov.doubles, "--recon-lr", "recon_lr", "Regressor learning rate");
  recon->add_option("--recon-hidden", ov.recon_hidden, "Regressor hidden widths, e.g. 64,64");

  auto* classify = command("downstream-classify", "KNN classification", cmd_downstream_classify);
  add(classify, ov.strings, "--test", "test", "Test CSV (default: split --data)");
  add(classify, ov.ints, "--classify-k", "classify_k", "Neighbors for the vote");
  add(classify, ov.doubles, "--ratio", "ratio", "Validation ratio when splitting --data");

  auto* sweep_k = command("sweep-k", "Train with i neighbors, validate with j neighbors", cmd_sweep_k);
  sweep_k->add_option("--i-range", ov.i_range, "Training neighbor counts, e.g. 2:10");
  sweep_k->add_option("--j-range", ov.j_range, "Validation neighbor counts, e.g. 2:10");
  add(sweep_k, ov.ints, "--budget", "budget", "Largest allowed neighbor count");
  add(sweep_k, ov.doubles, "--ratio", "ratio", "Validation ratio");

  auto* sweep_dual = command("sweep-dual", "Convergence rate per dual strength", cmd_sweep_dual);
  sweep_dual->add_option("--gammas", ov.gammas, "Comma list of soft-dual weights");
  add(sweep_dual, ov.ints, "--runs", "runs", "Seeded runs per row");

  auto* export_metric = command("export-metric", "Write the metric tensor at each latent point", cmd_export_metric);
  add(export_metric, ov.strings, "--latents", "embedding", "Latent points CSV (default: encode --data)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    report_error(err, "usage_error", e.what());
    return kExitConfig;
  }

  try {
    RunConfig cfg;
    if (config_path) cfg = load_run_config(*config_path, cfg);
    cfg = apply_run_json(cfg, ov.to_json());
    trainer::validate(cfg.train);
    const auto* sub = app.get_subcommands().front();
    Context ctx(cfg, out);
    write_effective_config(ctx, sub->get_name());
    return handlers.at(sub->get_name())(ctx);
  } catch (const ConfigError& e) {
    report_error(err, e.kind(), e.what());
    return kExitConfig;
  } catch (const UsageError& e) {
    report_error(err, e.kind(), e.what());
    return kExitConfig;
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    report_error(err, "runtime_error", e.what());
    return kExitRuntime;
  }
}

}  // namespace iikl::app
