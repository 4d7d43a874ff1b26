#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "iikl/types.hpp"

namespace iikl::data {

struct Dataset {
  Matrix X;  // one sample per row
  std::optional<std::vector<int>> labels;
  std::vector<std::string> feature_names;  // empty when the file had no header
  std::string provenance;

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index width() const { return X.cols(); }
};

// Label column selector: a header name or a zero-based column index.
using LabelColumn = std::variant<std::string, int>;

/// Comma-separated numeric body with an optional header row. Label cells must
/// be integers. Errors carry the 1-based row and column.
Dataset load_csv(const std::string& path, const std::optional<LabelColumn>& label = std::nullopt);
Dataset parse_csv(const std::string& text, const std::optional<LabelColumn>& label = std::nullopt,
                  const std::string& source = "<memory>");

/// Vertices of an ASCII OFF mesh; faces are read past and discarded.
Dataset load_off(const std::string& path);
Dataset parse_off(const std::string& text, const std::string& source = "<memory>");

/// Writes `m` with full round-trip precision. `header` may be empty.
void save_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& header = {});
std::string format_csv(const Matrix& m, const std::vector<std::string>& header = {});

struct MinMax {
  Vector min;
  Vector max;
};

/// Maps each feature to [0, 1]; constant features map to 0.
std::pair<Dataset, MinMax> minmax_normalize(const Dataset& ds);
Matrix minmax_apply(const Matrix& X, const MinMax& params);
Matrix minmax_denormalize(const Matrix& X, const MinMax& params);

struct SplitSpec {
  double validation_ratio = 0.2;
  std::uint64_t seed = 0;
};

struct Split {
  Dataset train;
  Dataset valid;
  std::vector<int> train_ids;
  std::vector<int> valid_ids;
};

/// Seeded shuffle, then the first round(ratio * N) shuffled samples form the
/// validation set.
Split split(const Dataset& ds, const SplitSpec& spec);
Dataset subset(const Dataset& ds, const std::vector<int>& ids);

enum class SynthKind { kPlane, kSwissRoll, kSphere };

struct SynthParams {
  int ambient_dim = 3;  // plane only; swiss roll and sphere live in R^3
  double extent = 1.0;  // plane side length
  double radius = 1.0;  // sphere
  double t_min = 1.5 * 3.14159265358979323846;
  double t_max = 4.5 * 3.14159265358979323846;
  double height = 10.0;  // swiss roll width along the second axis
  double jitter = 0.5;   // swiss roll grid jitter, as a fraction of a cell
  double noise = 0.0;    // isotropic ambient Gaussian noise
};

struct SynthResult {
  Dataset data;
  Matrix intrinsic;  // ground-truth coordinates, one row per sample
  Matrix clean;      // samples before ambient noise
};

SynthKind parse_synth_kind(const std::string& s);
std::string to_string(SynthKind kind);

// plane: uniform square coordinates through a random orthonormal frame plus
//        offset; ambient distances equal intrinsic distances.
// swiss_roll: (t cos t, h, t sin t) on a jittered grid over (t, h); the
//        intrinsic coordinates are (arc length, h).
// sphere: uniform on the sphere of the given radius; intrinsic = (polar, azimuth).
SynthResult synth_generate(SynthKind kind, int n, const SynthParams& params, std::uint64_t seed);

/// Arc length of the spiral r = t from 0 to t.
double spiral_arc_length(double t);

}  // namespace iikl::data
