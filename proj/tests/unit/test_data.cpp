#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "iikl/data/data.hpp"
#include "iikl/error.hpp"
#include "oracle/oracle.hpp"

namespace iikl {
namespace {

std::string load_error(const std::string& text, const std::optional<data::LabelColumn>& label = std::nullopt) {
  try {
    data::parse_csv(text, label);
  } catch (const LoadError& e) {
    return e.what();
  }
  return "";
}

TEST(Csv, PlainNumericBody) {
  const auto ds = data::parse_csv("1,2\n3.5,-4e-1\n");
  ASSERT_EQ(ds.size(), 2);
  ASSERT_EQ(ds.width(), 2);
  EXPECT_EQ(ds.X, (Matrix(2, 2) << 1, 2, 3.5, -0.4).finished());
  EXPECT_TRUE(ds.feature_names.empty());
  EXPECT_FALSE(ds.labels.has_value());
}

TEST(Csv, HeaderAndLabelColumn) {
  const std::string text = "a,label,b\n0.5,1,2\n1.5,0,3\n2.5,1,4\n";
  const auto by_name = data::parse_csv(text, data::LabelColumn{std::string("label")});
  EXPECT_EQ(by_name.width(), 2);
  EXPECT_EQ(by_name.feature_names, (std::vector<std::string>{"a", "b"}));
  ASSERT_TRUE(by_name.labels.has_value());
  EXPECT_EQ(*by_name.labels, (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(by_name.X.col(1), (Vector(3) << 2, 3, 4).finished());
  const auto by_index = data::parse_csv(text, data::LabelColumn{1});
  EXPECT_EQ(by_index.X, by_name.X);
  EXPECT_EQ(*by_index.labels, *by_name.labels);
}

TEST(Csv, ErrorsCiteLocation) {
  EXPECT_NE(load_error("1,2\n3,abc\n").find("row 2, column 2"), std::string::npos);
  EXPECT_NE(load_error("1,2\n3\n").find("row 2"), std::string::npos);
  EXPECT_NE(load_error("1,nan\n").find("row 1, column 2"), std::string::npos);
  EXPECT_NE(load_error("1,inf\n").find("non-finite"), std::string::npos);
  EXPECT_NE(load_error("x,y\n1,0.5\n", data::LabelColumn{1}).find("integer"), std::string::npos);
  EXPECT_NE(load_error("x,y\n1,2\n", data::LabelColumn{std::string("z")}).find("'z'"), std::string::npos);
  EXPECT_FALSE(load_error("").empty());
  EXPECT_THROW(data::load_csv("/nonexistent/file.csv"), LoadError);
}

TEST(Csv, SaveLoadRoundTripIsExact) {
  oracle::Gen gen(91);
  const Matrix m = gen.matrix(7, 3, 1e3);
  const auto back = data::parse_csv(data::format_csv(m, {"a", "b", "c"}));
  EXPECT_EQ(back.X, m);
  EXPECT_EQ(back.feature_names, (std::vector<std::string>{"a", "b", "c"}));

  const auto path = std::filesystem::path(IIKL_TEST_TMP) / "roundtrip.csv";
  std::filesystem::create_directories(path.parent_path());
  data::save_csv(path.string(), m);
  EXPECT_EQ(data::load_csv(path.string()).X, m);
}

TEST(Off, VerticesOnlyAndErrors) {
  const auto tri = data::parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  EXPECT_EQ(tri.X, (Matrix(3, 3) << 0, 0, 0, 1, 0, 0, 0, 1, 0).finished());
  const auto no_faces = data::parse_off("OFF\n# comment\n3 0 0\n0 0 0\n1 0 0\n0 1 0\n");
  EXPECT_EQ(no_faces.size(), 3);
  const auto inline_counts = data::parse_off("OFF 2 0 0\n1 2 3\n4 5 6\n");
  EXPECT_EQ(inline_counts.size(), 2);
  EXPECT_THROW(data::parse_off("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n"), LoadError);
  EXPECT_THROW(data::parse_off("PLY\n3 0 0\n"), LoadError);
  EXPECT_THROW(data::parse_off("OFF\nx y z\n"), LoadError);
}

TEST(MinMax, Examples) {
  data::Dataset ds;
  ds.X = (Matrix(3, 2) << 0, 3, 5, 3, 10, 3).finished();
  const auto [norm, params] = data::minmax_normalize(ds);
  EXPECT_EQ(norm.X.col(0), (Vector(3) << 0, 0.5, 1).finished());
  EXPECT_EQ(norm.X.col(1), Vector::Zero(3));
}

TEST(MinMax, RoundTripProperty) {
  oracle::Gen gen(92);
  for (int trial = 0; trial < 50; ++trial) {
    data::Dataset ds;
    ds.X = gen.matrix(gen.integer(2, 30), gen.integer(1, 6), gen.uniform(0.01, 100));
    const auto [norm, params] = data::minmax_normalize(ds);
    EXPECT_GE(norm.X.minCoeff(), 0.0);
    EXPECT_LE(norm.X.maxCoeff(), 1.0);
    const Matrix back = data::minmax_denormalize(norm.X, params);
    EXPECT_LT((back - ds.X).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, ds.X.cwiseAbs().maxCoeff()));
  }
}

TEST(Split, SizesDisjointExhaustiveAndSeeded) {
  data::Dataset ds;
  ds.X = Matrix::Random(10, 2);
  ds.labels = std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto s = data::split(ds, {0.2, 5});
  EXPECT_EQ(s.train.size(), 8);
  EXPECT_EQ(s.valid.size(), 2);
  std::set<int> all(s.train_ids.begin(), s.train_ids.end());
  for (int v : s.valid_ids) EXPECT_TRUE(all.insert(v).second);
  EXPECT_EQ(all.size(), 10U);
  EXPECT_EQ(*s.valid.labels, s.valid_ids);
  const auto again = data::split(ds, {0.2, 5});
  EXPECT_EQ(again.valid_ids, s.valid_ids);

  EXPECT_THROW(data::split(ds, {0.0, 0}), ConfigError);
  EXPECT_THROW(data::split(ds, {1.0, 0}), ConfigError);
  EXPECT_THROW(data::split(ds, {0.01, 0}), ConfigError);
}

TEST(Split, PropertyOverRandomSizes) {
  oracle::Gen gen(93);
  for (int trial = 0; trial < 100; ++trial) {
    data::Dataset ds;
    const int n = gen.integer(4, 200);
    ds.X = Matrix::Zero(n, 1);
    const double ratio = gen.uniform(0.1, 0.9);
    const auto s = data::split(ds, {ratio, static_cast<std::uint64_t>(trial)});
    EXPECT_EQ(s.valid.size(), std::llround(ratio * n));
    EXPECT_EQ(s.train.size() + s.valid.size(), n);
  }
}

TEST(Synth, PlaneIsExactIsometry) {
  data::SynthParams p;
  p.ambient_dim = 5;
  const auto r = data::synth_generate(data::SynthKind::kPlane, 100, p, 3);
  ASSERT_EQ(r.data.X.cols(), 5);
  for (int i = 0; i < 100; i += 7) {
    for (int j = 0; j < 100; j += 11) {
      const double amb = (r.data.X.row(i) - r.data.X.row(j)).norm();
      const double intr = (r.intrinsic.row(i) - r.intrinsic.row(j)).norm();
      EXPECT_NEAR(amb, intr, 1e-10);
    }
  }
  EXPECT_EQ(r.data.X, data::synth_generate(data::SynthKind::kPlane, 100, p, 3).data.X);
}

TEST(Synth, SwissRollParametricIdentity) {
  data::SynthParams p;
  const auto r = data::synth_generate(data::SynthKind::kSwissRoll, 800, p, 0);
  ASSERT_EQ(r.clean.rows(), 800);
  for (Eigen::Index i = 0; i < 800; ++i) {
    const double x = r.clean(i, 0);
    const double z = r.clean(i, 2);
    const double t = std::sqrt(x * x + z * z);
    EXPECT_GE(t, p.t_min - 1e-9);
    EXPECT_LE(t, p.t_max + 1e-9);
    EXPECT_NEAR(std::atan2(z, x), std::atan2(std::sin(t), std::cos(t)), 1e-9);
    EXPECT_NEAR(data::spiral_arc_length(t), r.intrinsic(i, 0), 1e-9);
    EXPECT_EQ(r.clean(i, 1), r.intrinsic(i, 1));
  }
}

TEST(Synth, SphereNormsAndNoise) {
  data::SynthParams p;
  p.radius = 2.5;
  const auto r = data::synth_generate(data::SynthKind::kSphere, 200, p, 1);
  for (Eigen::Index i = 0; i < 200; ++i) EXPECT_NEAR(r.data.X.row(i).norm(), 2.5, 1e-12);
  p.noise = 0.1;
  const auto noisy = data::synth_generate(data::SynthKind::kSphere, 200, p, 1);
  EXPECT_EQ(noisy.clean, r.clean);
  EXPECT_GT((noisy.data.X - noisy.clean).norm(), 0.0);
}

TEST(Synth, Errors) {
  EXPECT_THROW(data::synth_generate(data::SynthKind::kPlane, 9, {}, 0), ConfigError);
  EXPECT_THROW(data::parse_synth_kind("torus"), ConfigError);
  EXPECT_EQ(data::parse_synth_kind("swiss_roll"), data::SynthKind::kSwissRoll);
  EXPECT_EQ(data::to_string(data::SynthKind::kSphere), "sphere");
}

TEST(Synth, ArcLengthDerivativeIsRadius) {
  for (double t : {0.5, 3.0, 10.0}) {
    const double h = 1e-5;
    EXPECT_NEAR((data::spiral_arc_length(t + h) - data::spiral_arc_length(t - h)) / (2 * h),
                std::sqrt(1 + t * t), 1e-6);
  }
  EXPECT_EQ(data::spiral_arc_length(0.0), 0.0);
}

}  // namespace
}  // namespace iikl
