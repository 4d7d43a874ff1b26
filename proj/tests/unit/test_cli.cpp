#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "app/app.hpp"
#include "app/run_config.hpp"
#include "iikl/data/data.hpp"
#include "iikl/error.hpp"

namespace iikl {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "iikl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = app::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::path(IIKL_TEST_TMP) / ("cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  std::string dir(const std::string& name) const { return (root_ / name).string(); }

  // Small plane dataset written by the synth command.
  std::string synth_plane(const std::string& name = "synth") {
    const auto r = cli({"synth", "--kind", "plane", "--n", "60", "--ambient-dim", "4", "--seed", "3", "--out", dir(name)});
    EXPECT_EQ(r.code, 0) << r.err;
    return (root_ / name / "data.csv").string();
  }

  std::vector<std::string> small_train(const std::string& data, const std::string& out) const {
    return {"train", "--data", data, "--out", out, "--iterations", "20", "--k", "4", "--batch-size", "16", "--lr", "1e-3"};
  }

  fs::path root_;
};

TEST_F(Cli, SynthTrainEvalPipeline) {
  const auto data = synth_plane();
  const auto train = cli(small_train(data, dir("train")));
  ASSERT_EQ(train.code, 0) << train.err;
  EXPECT_TRUE(fs::exists(root_ / "train" / "checkpoint.json"));
  EXPECT_TRUE(fs::exists(root_ / "train" / "trace.csv"));
  EXPECT_TRUE(fs::exists(root_ / "train" / "run.log"));

  const auto eval = cli({"eval", "--data", data, "--checkpoint", dir("train") + "/checkpoint.json", "--k", "4",
                         "--baselines", "pca,isomap", "--out", dir("eval")});
  ASSERT_EQ(eval.code, 0) << eval.err;
  const auto rep = read_json(root_ / "eval" / "eval.json");
  EXPECT_TRUE(std::isfinite(rep["report"]["ipi"].get<double>()));
  EXPECT_EQ(rep["report"]["ambient_source"], "decoder_push");
  EXPECT_TRUE(rep["report"]["sigma_vs"].contains("isomap"));
  EXPECT_EQ(rep["command"], "eval");
  EXPECT_EQ(rep["config"]["k"], 4);
  EXPECT_TRUE(rep.contains("seed"));
  EXPECT_TRUE(fs::exists(root_ / "eval" / "per_point.csv"));

  const auto metric = cli({"export-metric", "--data", data, "--checkpoint", dir("train") + "/checkpoint.json",
                           "--out", dir("metric")});
  ASSERT_EQ(metric.code, 0) << metric.err;
  const auto mrep = read_json(root_ / "metric" / "report.json");
  EXPECT_EQ(mrep["points"], mrep["psd_points"]);
}

TEST_F(Cli, EveryArtifactEchoesConfigAndSeed) {
  const auto data = synth_plane();
  ASSERT_EQ(cli({"baseline", "--data", data, "--method", "isomap", "--k", "5", "--out", dir("b")}).code, 0);
  for (const char* file : {"report.json", "config.json"}) {
    const auto j = read_json(root_ / "b" / file);
    EXPECT_EQ(j["config"]["method"], "isomap");
    EXPECT_EQ(j["seed"], 0);
  }
  const auto emb = data::load_csv(dir("b") + "/embedding.csv");
  EXPECT_EQ(emb.X.rows(), 60);
  const auto synth = read_json(root_ / "synth" / "report.json");
  EXPECT_EQ(synth["seed"], 3);
}

TEST_F(Cli, UnknownConfigKeyExitsTwoNamingKey) {
  const auto path = root_ / "bad.json";
  std::ofstream(path) << R"({"alpha": 1.0, "bogus_key": 3})";
  const auto r = cli({"synth", "--config", path.string(), "--out", dir("x")});
  EXPECT_EQ(r.code, 2);
  const auto err = json::parse(r.err);
  EXPECT_EQ(err["error"]["kind"], "config_error");
  EXPECT_NE(err["error"]["message"].get<std::string>().find("bogus_key"), std::string::npos);
}

TEST_F(Cli, UsageAndRuntimeErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  const auto bad_flag = cli({"synth", "--n", "ten"});
  EXPECT_EQ(bad_flag.code, 2);
  EXPECT_EQ(json::parse(bad_flag.err)["error"]["kind"], "usage_error");
  EXPECT_EQ(cli({"synth", "--kind", "torus", "--out", dir("t")}).code, 2);
  EXPECT_EQ(cli({"train", "--dual", "medium", "--out", dir("t")}).code, 2);

  const auto missing = cli({"train", "--data", dir("missing.csv"), "--out", dir("m")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(json::parse(missing.err)["error"]["kind"], "load_error");
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(Cli, FlagsOverrideConfigFile) {
  const auto path = root_ / "cfg.json";
  std::ofstream(path) << R"({"n": 40, "kind": "sphere", "seed": 9})";
  ASSERT_EQ(cli({"synth", "--config", path.string(), "--n", "30", "--out", dir("s")}).code, 0);
  const auto j = read_json(root_ / "s" / "report.json");
  EXPECT_EQ(j["config"]["n"], 30);
  EXPECT_EQ(j["config"]["kind"], "sphere");
  EXPECT_EQ(j["seed"], 9);
}

TEST_F(Cli, RepeatedCommandsAreByteIdentical) {
  const auto data = synth_plane("s");
  const auto first_synth = slurp(root_ / "s" / "report.json");
  const auto first_data = slurp(data);
  synth_plane("s");
  EXPECT_EQ(slurp(data), first_data);
  EXPECT_EQ(slurp(root_ / "s" / "report.json"), first_synth);

  const std::vector<std::string> files{"report.json", "checkpoint.json", "trace.csv", "config.json"};
  ASSERT_EQ(cli(small_train(data, dir("t"))).code, 0);
  std::vector<std::string> first;
  for (const auto& f : files) first.push_back(slurp(root_ / "t" / f));
  ASSERT_EQ(cli(small_train(data, dir("t"))).code, 0);
  for (std::size_t i = 0; i < files.size(); ++i) EXPECT_EQ(slurp(root_ / "t" / files[i]), first[i]) << files[i];
  // The sidecar log is the only place for timestamps; it accumulates across runs.
  EXPECT_NE(slurp(root_ / "t" / "run.log").find("train"), std::string::npos);
}

TEST_F(Cli, InputFilesAreNotModified) {
  const auto data = synth_plane();
  const auto before = slurp(data);
  const auto stamp = fs::last_write_time(data);
  ASSERT_EQ(cli(small_train(data, dir("t"))).code, 0);
  EXPECT_EQ(slurp(data), before);
  EXPECT_EQ(fs::last_write_time(data), stamp);
}

TEST_F(Cli, SweepDualRowsAndSweepKGrid) {
  const auto data = synth_plane();
  const auto dual = cli({"sweep-dual", "--data", data, "--gammas", "0.1,1", "--runs", "2", "--iterations", "3", "--k",
                         "4", "--batch-size", "16", "--out", dir("dual")});
  ASSERT_EQ(dual.code, 0) << dual.err;
  const auto d = read_json(root_ / "dual" / "report.json");
  ASSERT_EQ(d["rows"].size(), 3U);
  EXPECT_EQ(d["rows"][2]["dual_mode"], "hard");
  EXPECT_EQ(d["rows"][0]["runs"].size(), 2U);

  const auto sweep = cli({"sweep-k", "--data", data, "--i-range", "2:4", "--j-range", "2,3", "--budget", "5",
                          "--iterations", "3", "--batch-size", "16", "--ratio", "0.3", "--out", dir("k")});
  ASSERT_EQ(sweep.code, 0) << sweep.err;
  const auto g = read_json(root_ / "k" / "report.json");
  EXPECT_EQ(g["rows"], 3);
  EXPECT_EQ(g["cols"], 2);
  const auto grid = slurp(root_ / "k" / "grid.csv");
  EXPECT_EQ(std::count(grid.begin(), grid.end(), '\n'), 1 + 3 * 2);

  const auto over = cli({"sweep-k", "--data", data, "--i-range", "2:11", "--out", dir("k2")});
  EXPECT_EQ(over.code, 2);
}

TEST_F(Cli, DownstreamCommands) {
  const auto path = root_ / "labeled.csv";
  {
    std::ofstream f(path);
    f << "a,b,c,cls\n";
    for (int i = 0; i < 40; ++i) {
      const int c = i % 2;
      f << 0.1 * i << ',' << c * 5 + 0.01 * i << ',' << 0.02 * i * i << ',' << c << '\n';
    }
  }
  const auto train = cli({"train", "--data", path.string(), "--label-column", "cls", "--out", dir("t"), "--iterations",
                          "5", "--k", "4", "--batch-size", "16"});
  ASSERT_EQ(train.code, 0) << train.err;
  const auto recon = cli({"downstream-recon", "--data", path.string(), "--label-column", "cls", "--checkpoint",
                          dir("t") + "/checkpoint.json", "--recon-iterations", "20", "--recon-hidden", "8",
                          "--out", dir("r")});
  ASSERT_EQ(recon.code, 0) << recon.err;
  const auto r = read_json(root_ / "r" / "recon.json");
  EXPECT_TRUE(r.contains("seed"));
  const auto cls = cli({"downstream-classify", "--data", path.string(), "--label-column", "cls", "--classify-k", "3",
                        "--out", dir("c")});
  ASSERT_EQ(cls.code, 0) << cls.err;
  EXPECT_TRUE(fs::exists(root_ / "c" / "predictions.csv"));
  EXPECT_EQ(cli({"downstream-classify", "--data", path.string(), "--out", dir("c2")}).code, 2);
}

TEST(RunConfig, ListParsing) {
  EXPECT_EQ(app::parse_int_list("2:5"), (std::vector<int>{2, 3, 4, 5}));
  EXPECT_EQ(app::parse_int_list("2,4,8"), (std::vector<int>{2, 4, 8}));
  EXPECT_EQ(app::parse_double_list("0.1,1"), (std::vector<double>{0.1, 1.0}));
  EXPECT_EQ(app::parse_string_list("pca,isomap"), (std::vector<std::string>{"pca", "isomap"}));
  EXPECT_THROW(app::parse_int_list("2:x"), ConfigError);
}

TEST(RunConfig, JsonRoundTrip) {
  app::RunConfig cfg;
  cfg.train.gamma = 0.1;
  cfg.runs = 7;
  cfg.i_range = {3, 4};
  const auto j = app::to_json(cfg);
  EXPECT_EQ(app::to_json(app::apply_run_json({}, j)), j);
  EXPECT_THROW(app::apply_run_json({}, json{{"runs", "many"}}), ConfigError);
}

}  // namespace
}  // namespace iikl
