#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "iikl/baselines/baselines.hpp"
#include "iikl/data/data.hpp"
#include "iikl/downstream/downstream.hpp"
#include "iikl/error.hpp"
#include "iikl/geometry/metric.hpp"
#include "iikl/metrics/metrics.hpp"
#include "iikl/neighborhood/knn.hpp"
#include "iikl/nn/checkpoint.hpp"
#include "iikl/parallel.hpp"
#include "iikl/trainer/trainer.hpp"

namespace iikl::app {

namespace fs = std::filesystem;
using nlohmann::json;

Context::Context(const RunConfig& c, std::ostream& o) : cfg(c), out(o) {
  fs::create_directories(cfg.out);
  log_.open(path("run.log"), std::ios::app);
}

std::string Context::path(const std::string& file) const { return (fs::path(cfg.out) / file).string(); }

void Context::log(const std::string& line) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  log_ << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << line << '\n';
  log_.flush();
}

int Context::threads() const {
  int n = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  if (const char* cap = std::getenv("IIKL_THREADS")) {
    const int c = std::atoi(cap);
    if (c >= 1) n = std::min(n, c);
  }
  return std::max(1, n);
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path + "'");
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json envelope(const std::string& command, const RunConfig& cfg) {
  return {{"command", command}, {"config", to_json(cfg)}, {"seed", cfg.train.seed}};
}

std::vector<std::string> column_names(const std::string& prefix, Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::optional<data::LabelColumn> label_selector(const RunConfig& cfg) {
  if (!cfg.label_column) return std::nullopt;
  const auto& s = *cfg.label_column;
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return data::LabelColumn(std::stoi(s));
  }
  return data::LabelColumn(s);
}

data::Dataset load_dataset(const std::string& path, const RunConfig& cfg) {
  if (path.empty()) throw ConfigError("no dataset given (set 'data' or --data)");
  if (fs::path(path).extension() == ".off") return data::load_off(path);
  return data::load_csv(path, label_selector(cfg));
}

json minmax_json(const data::MinMax& m) {
  return {{"min", std::vector<double>(m.min.begin(), m.min.end())},
          {"max", std::vector<double>(m.max.begin(), m.max.end())}};
}

std::optional<data::MinMax> minmax_from_json(const json& j) {
  if (!j.is_object() || !j.contains("normalization") || j["normalization"].is_null()) return std::nullopt;
  const auto lo = j["normalization"].at("min").get<std::vector<double>>();
  const auto hi = j["normalization"].at("max").get<std::vector<double>>();
  return data::MinMax{Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                      Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()))};
}

// Features as the model sees them: min-max scaled when requested.
struct Prepared {
  data::Dataset ds;
  std::optional<data::MinMax> scaling;
};

Prepared prepare(data::Dataset ds, bool normalize) {
  Prepared p;
  if (normalize) {
    auto [scaled, params] = data::minmax_normalize(ds);
    p.ds = std::move(scaled);
    p.scaling = std::move(params);
  } else {
    p.ds = std::move(ds);
  }
  return p;
}

// Applies the checkpoint's stored scaling so that evaluation sees the same
// feature space as training did.
Prepared prepare_for_checkpoint(data::Dataset ds, const nn::Checkpoint& ckpt) {
  Prepared p;
  p.scaling = minmax_from_json(ckpt.train_config_echo);
  if (p.scaling) ds.X = data::minmax_apply(ds.X, *p.scaling);
  p.ds = std::move(ds);
  return p;
}

trainer::Networks networks_of(const nn::Checkpoint& ckpt) {
  return {ckpt.at("encoder"), ckpt.at("decoder"), ckpt.at("pullback")};
}

Matrix encode(const nn::Network& encoder, const Matrix& X) {
  if (encoder.input_width() != X.cols()) {
    throw ConfigError("data width " + std::to_string(X.cols()) + " does not match the checkpoint encoder input width " +
                      std::to_string(encoder.input_width()));
  }
  return encoder.forward_batch(X.transpose()).transpose();
}

baselines::Embedding run_baseline(const std::string& method, const Matrix& X, int k, int n, int threads) {
  if (method == "pca") return baselines::pca_embed(X, n);
  if (method == "isomap") return baselines::isomap_embed(X, k, n, threads);
  throw ConfigError("unknown baseline method '" + method + "' (expected pca or isomap)");
}

metrics::EvalNeighborSpace eval_space(const std::string& s) {
  if (s == "ambient") return metrics::EvalNeighborSpace::kAmbient;
  if (s == "embedded") return metrics::EvalNeighborSpace::kEmbedded;
  throw ConfigError("eval_neighbor_space must be 'ambient' or 'embedded', got '" + s + "'");
}

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

void write_effective_config(Context& ctx, const std::string& command) {
  write_json(ctx.path("config.json"), envelope(command, ctx.cfg));
}

int cmd_synth(Context& ctx) {
  const auto& cfg = ctx.cfg;
  data::SynthParams params;
  params.ambient_dim = cfg.ambient_dim;
  params.noise = cfg.noise;
  const auto kind = data::parse_synth_kind(cfg.kind);
  const auto result = data::synth_generate(kind, cfg.n, params, cfg.train.seed);
  data::save_csv(ctx.path("data.csv"), result.data.X, column_names("x", result.data.X.cols()));
  data::save_csv(ctx.path("intrinsic.csv"), result.intrinsic, column_names("u", result.intrinsic.cols()));
  auto report = envelope("synth", cfg);
  report["provenance"] = result.data.provenance;
  report["samples"] = result.data.X.rows();
  report["width"] = result.data.X.cols();
  write_json(ctx.path("report.json"), report);
  ctx.log("synth " + result.data.provenance);
  ctx.out << ctx.path("data.csv") << '\n';
  return 0;
}

int cmd_train(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto start = std::chrono::steady_clock::now();
  const auto prepared = prepare(load_dataset(cfg.data, cfg), cfg.normalize);
  const Matrix& X = prepared.ds.X;

  std::optional<trainer::Networks> warm;
  if (!cfg.checkpoint.empty()) warm = networks_of(nn::load_checkpoint(cfg.checkpoint));
  trainer::TrainHooks hooks;
  if (warm) hooks.initial = &*warm;
  const long long per_epoch = (X.rows() + cfg.train.batch_size - 1) / cfg.train.batch_size;
  hooks.on_iteration = [&](int it, const trainer::TrainReport& r) {
    if ((it + 1) % per_epoch == 0 || it + 1 == cfg.train.iterations) {
      std::ostringstream line;
      line << std::setprecision(6) << "epoch " << (it + 1 + per_epoch - 1) / per_epoch << " iteration " << it + 1
           << " re=" << r.re.back() << " is=" << r.is.back() << " du_d=" << r.du_d.back()
           << " du_phi=" << r.du_phi.back();
      ctx.log(line.str());
    }
  };
  const auto result = trainer::train(X, cfg.train, hooks);

  nn::Checkpoint ckpt;
  ckpt.networks.emplace("encoder", result.nets.encoder);
  ckpt.networks.emplace("decoder", result.nets.decoder);
  ckpt.networks.emplace("pullback", result.nets.pullback);
  ckpt.train_config_echo = {{"config", to_json(cfg)},
                            {"normalization", prepared.scaling ? minmax_json(*prepared.scaling) : json(nullptr)}};
  nn::save_checkpoint(ckpt, ctx.path("checkpoint.json"));
  write_text(ctx.path("trace.csv"), trainer::trace_csv(result.report));
  auto report = envelope("train", cfg);
  report["summary"] = trainer::summary_json(result.report);
  report["samples"] = X.rows();
  report["width"] = X.cols();
  write_json(ctx.path("report.json"), report);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ctx.log("train finished in " + format_double(wall) + " s; converged=" + (result.report.converged ? "true" : "false"));
  ctx.out << report["summary"].dump() << '\n';
  return result.report.diverged ? 1 : 0;
}

int cmd_eval(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto raw = load_dataset(cfg.data, cfg);
  metrics::EvalOptions options;
  options.k = cfg.train.k;
  options.neighbor_space = eval_space(cfg.eval_neighbor_space);
  options.threads = ctx.threads();

  std::optional<nn::Checkpoint> ckpt;
  Prepared prepared;
  Matrix Z;
  if (!cfg.checkpoint.empty()) {
    ckpt = nn::load_checkpoint(cfg.checkpoint);
    prepared = prepare_for_checkpoint(std::move(raw), *ckpt);
    Z = encode(ckpt->at("encoder"), prepared.ds.X);
    options.decoder = &ckpt->at("decoder");
  } else if (!cfg.embedding.empty()) {
    prepared = prepare(std::move(raw), cfg.normalize);
    Z = data::load_csv(cfg.embedding).X;
  } else {
    throw ConfigError("eval needs a checkpoint (--checkpoint) or an embedding (--embedding)");
  }
  const Matrix& X = prepared.ds.X;
  const auto field = ckpt ? metrics::MetricField::pullback(ckpt->at("pullback"))
                          : metrics::MetricField::identity(static_cast<int>(Z.cols()));
  auto report = metrics::evaluate(X, Z, field, options);

  json baseline_ipi = json::object();
  for (const auto& method : cfg.baselines) {
    const auto emb = run_baseline(method, X, cfg.train.k, static_cast<int>(Z.cols()), options.threads);
    metrics::EvalOptions base_options = options;
    base_options.decoder = nullptr;
    const double other = metrics::evaluate(X, emb.Z, metrics::MetricField::identity(static_cast<int>(Z.cols())),
                                           base_options)
                             .ipi;
    baseline_ipi[method] = other;
    if (other > 0.0) report.sigma_vs[method] = metrics::sigma_reduction(report.ipi, other);
  }

  auto out = envelope("eval", cfg);
  out["source"] = ckpt ? "checkpoint" : "embedding";
  out["report"] = metrics::to_json(report);
  out["baseline_ipi"] = baseline_ipi;
  write_json(ctx.path("eval.json"), out);
  write_text(ctx.path("per_point.csv"), metrics::per_point_csv(report));
  ctx.log("eval ipi=" + format_double(report.ipi));
  ctx.out << out["report"].dump() << '\n';
  return 0;
}

int cmd_baseline(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto prepared = prepare(load_dataset(cfg.data, cfg), cfg.normalize);
  const auto emb = run_baseline(cfg.method, prepared.ds.X, cfg.train.k, cfg.train.latent_dim, ctx.threads());
  data::save_csv(ctx.path("embedding.csv"), emb.Z, column_names("z", emb.Z.cols()));
  auto report = envelope("baseline", cfg);
  report["method"] = emb.method;
  report["parameters"] = emb.parameters;
  report["samples"] = emb.Z.rows();
  write_json(ctx.path("report.json"), report);
  ctx.log("baseline " + emb.method + " done");
  ctx.out << ctx.path("embedding.csv") << '\n';
  return 0;
}

int cmd_downstream_recon(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.checkpoint.empty()) throw ConfigError("downstream-recon needs --checkpoint");
  const auto ckpt = nn::load_checkpoint(cfg.checkpoint);
  const auto prepared = prepare_for_checkpoint(load_dataset(cfg.data, cfg), ckpt);
  const Matrix& X = prepared.ds.X;
  const Matrix features = downstream::build_rie_features(ckpt.at("encoder"), ckpt.at("pullback"), X);
  downstream::ReconConfig rc;
  rc.hidden = cfg.recon_hidden;
  rc.lr = cfg.recon_lr;
  rc.iterations = cfg.recon_iterations;
  rc.batch_size = cfg.recon_batch;
  rc.seed = cfg.train.seed;
  rc.leaky_slope = cfg.train.leaky_slope;
  rc.threads = ctx.threads();
  const auto result = downstream::train_recon(features, X, {cfg.ratio, cfg.train.seed}, rc);

  auto report = envelope("downstream-recon", cfg);
  report["result"] = downstream::to_json(result);
  report["feature_width"] = features.cols();
  write_json(ctx.path("recon.json"), report);
  std::ostringstream csv;
  csv << std::setprecision(17) << "index,rie_error,coor_error\n";
  for (std::size_t i = 0; i < result.valid_ids.size(); ++i) {
    csv << result.valid_ids[i] << ',' << result.rie.per_sample[i] << ',' << result.coor.per_sample[i] << '\n';
  }
  write_text(ctx.path("per_sample.csv"), csv.str());
  ctx.log("downstream-recon eta=" + format_double(result.eta));
  ctx.out << report["result"].dump() << '\n';
  return 0;
}

int cmd_downstream_classify(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.label_column) throw ConfigError("downstream-classify needs a label column (--label-column)");
  auto train_raw = load_dataset(cfg.data, cfg);
  data::Dataset test_raw;
  std::vector<int> test_ids;
  if (cfg.test.empty()) {
    auto parts = data::split(train_raw, {cfg.ratio, cfg.train.seed});
    train_raw = std::move(parts.train);
    test_raw = std::move(parts.valid);
    test_ids = std::move(parts.valid_ids);
  } else {
    test_raw = load_dataset(cfg.test, cfg);
    test_ids.resize(static_cast<std::size_t>(test_raw.size()));
    std::iota(test_ids.begin(), test_ids.end(), 0);
  }
  if (!train_raw.labels) throw InputError("training data has no labels");

  Matrix train_X;
  Matrix test_X;
  if (!cfg.checkpoint.empty()) {
    // Classify the model's reconstructions f_D(f_E(x)).
    const auto ckpt = nn::load_checkpoint(cfg.checkpoint);
    const auto scaling = minmax_from_json(ckpt.train_config_echo);
    const auto reconstruct = [&](const Matrix& raw) {
      const Matrix x = scaling ? data::minmax_apply(raw, *scaling) : raw;
      return Matrix(ckpt.at("decoder").forward_batch(encode(ckpt.at("encoder"), x).transpose()).transpose());
    };
    train_X = scaling ? data::minmax_apply(train_raw.X, *scaling) : train_raw.X;
    test_X = reconstruct(test_raw.X);
  } else if (cfg.normalize) {
    const auto scaling = data::minmax_normalize(train_raw).second;
    train_X = data::minmax_apply(train_raw.X, scaling);
    test_X = data::minmax_apply(test_raw.X, scaling);
  } else {
    train_X = train_raw.X;
    test_X = test_raw.X;
  }
  const auto result = downstream::knn_classify(train_X, *train_raw.labels, test_X, cfg.classify_k, test_raw.labels);

  auto report = envelope("downstream-classify", cfg);
  report["k"] = cfg.classify_k;
  report["train_samples"] = train_X.rows();
  report["test_samples"] = test_X.rows();
  report["reconstructed"] = !cfg.checkpoint.empty();
  report["accuracy"] = result.accuracy ? json(*result.accuracy) : json(nullptr);
  write_json(ctx.path("classify.json"), report);
  std::ostringstream csv;
  csv << (test_raw.labels ? "index,predicted,label\n" : "index,predicted\n");
  for (std::size_t i = 0; i < result.predicted.size(); ++i) {
    csv << test_ids[i] << ',' << result.predicted[i];
    if (test_raw.labels) csv << ',' << (*test_raw.labels)[i];
    csv << '\n';
  }
  write_text(ctx.path("predictions.csv"), csv.str());
  ctx.out << json{{"accuracy", report["accuracy"]}}.dump() << '\n';
  return 0;
}

int cmd_sweep_k(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.budget < 2) throw ConfigError("neighbor budget must be >= 2");
  for (const auto* range : {&cfg.i_range, &cfg.j_range}) {
    if (range->empty()) throw ConfigError("sweep ranges must not be empty");
    for (int v : *range) {
      if (v < 2 || v > cfg.budget) {
        throw ConfigError("sweep value " + std::to_string(v) + " outside [2, budget = " + std::to_string(cfg.budget) +
                          "]");
      }
    }
  }
  const auto prepared = prepare(load_dataset(cfg.data, cfg), cfg.normalize);
  const auto parts = data::split(prepared.ds, {cfg.ratio, cfg.train.seed});
  if (parts.valid.size() <= cfg.budget) throw ConfigError("validation split is too small for the neighbor budget");
  if (parts.train.size() <= cfg.budget) throw ConfigError("training split is too small for the neighbor budget");
  std::optional<trainer::Networks> warm;
  if (!cfg.checkpoint.empty()) warm = networks_of(nn::load_checkpoint(cfg.checkpoint));

  // Validation neighborhoods come from the validation samples themselves.
  const auto valid_index = neighborhood::knn_index(parts.valid.X, cfg.budget);
  const std::size_t ni = cfg.i_range.size();
  const std::size_t nj = cfg.j_range.size();
  std::vector<double> grid(ni * nj);
  std::vector<json> runs(ni);
  parallel_for(ni, ctx.threads(), [&](std::size_t a) {
    trainer::TrainConfig tc = cfg.train;
    tc.k = cfg.i_range[a];
    trainer::TrainHooks hooks;
    if (warm) hooks.initial = &*warm;
    const auto trained = trainer::train(parts.train.X, tc, hooks);
    runs[a] = trainer::summary_json(trained.report);
    const Matrix z = encode(trained.nets.encoder, parts.valid.X);
    for (std::size_t b = 0; b < nj; ++b) {
      std::vector<neighborhood::SamplingSet> sets;
      for (Eigen::Index h = 0; h < z.rows(); ++h) {
        sets.push_back(neighborhood::sampling_set(z, valid_index, static_cast<int>(h), cfg.j_range[b]));
      }
      grid[a * nj + b] = losses::isometric_loss(trained.nets.pullback, trained.nets.decoder, z, sets,
                                                cfg.train.push_mode, {.pullback_gradient = false})
                             .loss.parts.is;
    }
  });

  std::ostringstream csv;
  csv << std::setprecision(17) << "i,j,valid_is\n";
  double diag = 0.0;
  double all = 0.0;
  int diag_cells = 0;
  for (std::size_t a = 0; a < ni; ++a) {
    for (std::size_t b = 0; b < nj; ++b) {
      const double v = grid[a * nj + b];
      csv << cfg.i_range[a] << ',' << cfg.j_range[b] << ',' << v << '\n';
      all += v;
      if (cfg.i_range[a] == cfg.j_range[b]) {
        diag += v;
        ++diag_cells;
      }
    }
  }
  write_text(ctx.path("grid.csv"), csv.str());
  auto report = envelope("sweep-k", cfg);
  report["rows"] = ni;
  report["cols"] = nj;
  report["mean_all"] = all / static_cast<double>(grid.size());
  report["mean_diagonal"] = diag_cells > 0 ? json(diag / diag_cells) : json(nullptr);
  report["train_runs"] = runs;
  write_json(ctx.path("report.json"), report);
  ctx.log("sweep-k finished");
  ctx.out << json{{"mean_all", report["mean_all"]}, {"mean_diagonal", report["mean_diagonal"]}}.dump() << '\n';
  return 0;
}

int cmd_sweep_dual(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.runs < 1) throw ConfigError("runs must be >= 1");
  if (cfg.gammas.empty()) throw ConfigError("gamma list must not be empty");
  const auto prepared = prepare(load_dataset(cfg.data, cfg), cfg.normalize);
  const Matrix& X = prepared.ds.X;

  struct Row {
    std::string mode;
    double gamma;
    trainer::ConvergenceStats stats;
  };
  std::vector<Row> rows;
  for (double g : cfg.gammas) {
    trainer::TrainConfig tc = cfg.train;
    tc.dual_mode = trainer::DualMode::kSoft;
    tc.gamma = g;
    rows.push_back({"soft", g, trainer::convergence_probability(X, tc, cfg.runs, ctx.threads())});
    ctx.log("sweep-dual soft gamma=" + format_double(g) + " rate=" + format_double(rows.back().stats.rate));
  }
  trainer::TrainConfig hard = cfg.train;
  hard.dual_mode = trainer::DualMode::kHard;
  rows.push_back({"hard", hard.gamma, trainer::convergence_probability(X, hard, cfg.runs, ctx.threads())});
  ctx.log("sweep-dual hard rate=" + format_double(rows.back().stats.rate));

  std::ostringstream csv;
  csv << std::setprecision(17) << "dual_mode,gamma,runs,converged,rate\n";
  json table = json::array();
  for (const auto& r : rows) {
    const auto hits = std::count(r.stats.converged.begin(), r.stats.converged.end(), true);
    csv << r.mode << ',' << r.gamma << ',' << cfg.runs << ',' << hits << ',' << r.stats.rate << '\n';
    json per_run = json::array();
    for (const auto& rep : r.stats.reports) per_run.push_back(trainer::summary_json(rep));
    table.push_back({{"dual_mode", r.mode}, {"gamma", r.gamma}, {"rate", r.stats.rate}, {"runs", per_run}});
  }
  write_text(ctx.path("dual.csv"), csv.str());
  auto report = envelope("sweep-dual", cfg);
  report["rows"] = table;
  write_json(ctx.path("report.json"), report);
  ctx.out << csv.str();
  return 0;
}

int cmd_export_metric(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.checkpoint.empty()) throw ConfigError("export-metric needs --checkpoint");
  const auto ckpt = nn::load_checkpoint(cfg.checkpoint);
  Matrix Z;
  if (!cfg.embedding.empty()) {
    Z = data::load_csv(cfg.embedding).X;
  } else {
    const auto prepared = prepare_for_checkpoint(load_dataset(cfg.data, cfg), ckpt);
    Z = encode(ckpt.at("encoder"), prepared.ds.X);
  }
  const auto field = metrics::MetricField::pullback(ckpt.at("pullback"));
  const auto gs = field.at_rows(Z);
  const auto n = Z.cols();
  std::vector<std::string> header = column_names("z", n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) header.push_back("g" + std::to_string(i) + "_" + std::to_string(j));
  }
  header.push_back("min_eigenvalue");
  header.push_back("is_psd");
  Matrix table(Z.rows(), n + n * n + 2);
  long long psd = 0;
  for (Eigen::Index h = 0; h < Z.rows(); ++h) {
    table.row(h).head(n) = Z.row(h);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) table(h, n + i * n + j) = gs[static_cast<std::size_t>(h)](i, j);
    }
    const auto diag = geometry::psd_check(gs[static_cast<std::size_t>(h)]);
    table(h, n + n * n) = diag.min_eigenvalue;
    table(h, n + n * n + 1) = diag.is_psd ? 1.0 : 0.0;
    psd += diag.is_psd ? 1 : 0;
  }
  data::save_csv(ctx.path("metric.csv"), table, header);
  auto report = envelope("export-metric", cfg);
  report["points"] = Z.rows();
  report["psd_points"] = psd;
  write_json(ctx.path("report.json"), report);
  ctx.out << ctx.path("metric.csv") << '\n';
  return 0;
}

}  // namespace iikl::app
