#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "iikl/data/data.hpp"
#include "iikl/error.hpp"

namespace iikl::data {

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = normal(rng);
  }
  return m;
}

SynthResult plane(int n, const SynthParams& p, std::mt19937_64& rng) {
  if (p.ambient_dim < 2) throw ConfigError("plane needs an ambient dimension of at least 2");
  if (!(p.extent > 0.0)) throw ConfigError("plane extent must be positive");
  const Eigen::Index d = p.ambient_dim;
  const Matrix frame = Eigen::HouseholderQR<Matrix>(gaussian(d, 2, rng)).householderQ() * Matrix::Identity(d, 2);
  const Vector offset = gaussian(d, 1, rng);
  std::uniform_real_distribution<double> uniform(0.0, p.extent);
  SynthResult out;
  out.intrinsic.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    out.intrinsic(i, 0) = uniform(rng);
    out.intrinsic(i, 1) = uniform(rng);
  }
  out.clean = (out.intrinsic * frame.transpose()).rowwise() + offset.transpose();
  // Ground truth: the frame is orthonormal, so the map is an isometry.
  if (!(frame.transpose() * frame).isApprox(Matrix::Identity(2, 2), 1e-12)) {
    throw NumericError("plane frame is not orthonormal");
  }
  for (int i = 1; i < std::min(n, 16); ++i) {
    const double amb = (out.clean.row(i) - out.clean.row(0)).norm();
    const double intr = (out.intrinsic.row(i) - out.intrinsic.row(0)).norm();
    if (std::abs(amb - intr) > 1e-10 * std::max(1.0, intr)) throw NumericError("plane embedding is not isometric");
  }
  return out;
}

SynthResult swiss_roll(int n, const SynthParams& p, std::mt19937_64& rng) {
  if (!(p.t_max > p.t_min) || p.t_min < 0.0) throw ConfigError("swiss roll needs 0 <= t_min < t_max");
  if (!(p.height > 0.0)) throw ConfigError("swiss roll height must be positive");
  if (p.jitter < 0.0 || p.jitter > 1.0) throw ConfigError("swiss roll jitter must lie in [0, 1]");
  // Grid in (t, h) with cells roughly square in the intrinsic metric.
  const double length = spiral_arc_length(p.t_max) - spiral_arc_length(p.t_min);
  const int nt = std::max(1, static_cast<int>(std::ceil(std::sqrt(n * length / p.height))));
  const int nh = (n + nt - 1) / nt;
  std::vector<int> cells(static_cast<std::size_t>(nt * nh));
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), rng);
  cells.resize(static_cast<std::size_t>(n));
  std::sort(cells.begin(), cells.end());

  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const double dt = (p.t_max - p.t_min) / nt;
  const double dh = p.height / nh;
  SynthResult out;
  out.clean.resize(n, 3);
  out.intrinsic.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const int ct = cells[static_cast<std::size_t>(i)] / nh;
    const int ch = cells[static_cast<std::size_t>(i)] % nh;
    const double t = p.t_min + (ct + 0.5 + p.jitter * unit(rng)) * dt;
    const double h = (ch + 0.5 + p.jitter * unit(rng)) * dh;
    out.clean.row(i) << t * std::cos(t), h, t * std::sin(t);
    out.intrinsic.row(i) << spiral_arc_length(t), h;
  }
  return out;
}

SynthResult sphere(int n, const SynthParams& p, std::mt19937_64& rng) {
  if (!(p.radius > 0.0)) throw ConfigError("sphere radius must be positive");
  SynthResult out;
  out.clean.resize(n, 3);
  out.intrinsic.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    Vector v = gaussian(3, 1, rng);
    while (v.norm() < 1e-8) v = gaussian(3, 1, rng);
    v *= p.radius / v.norm();
    out.clean.row(i) = v.transpose();
    out.intrinsic.row(i) << std::acos(std::clamp(v[2] / p.radius, -1.0, 1.0)), std::atan2(v[1], v[0]);
  }
  return out;
}

}  // namespace

double spiral_arc_length(double t) { return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t)); }

SynthKind parse_synth_kind(const std::string& s) {
  if (s == "plane") return SynthKind::kPlane;
  if (s == "swiss_roll") return SynthKind::kSwissRoll;
  if (s == "sphere") return SynthKind::kSphere;
  throw ConfigError("unknown synthetic dataset kind '" + s + "' (expected plane, swiss_roll or sphere)");
}

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::kPlane: return "plane";
    case SynthKind::kSwissRoll: return "swiss_roll";
    case SynthKind::kSphere: return "sphere";
  }
  return "unknown";
}

SynthResult synth_generate(SynthKind kind, int n, const SynthParams& params, std::uint64_t seed) {
  if (n < 10) throw ConfigError("synthetic datasets need N >= 10");
  if (params.noise < 0.0) throw ConfigError("noise level must be non-negative");
  std::mt19937_64 rng(seed);
  SynthResult out;
  switch (kind) {
    case SynthKind::kPlane: out = plane(n, params, rng); break;
    case SynthKind::kSwissRoll: out = swiss_roll(n, params, rng); break;
    case SynthKind::kSphere: out = sphere(n, params, rng); break;
  }
  out.data.X = out.clean;
  if (params.noise > 0.0) out.data.X += params.noise * gaussian(out.clean.rows(), out.clean.cols(), rng);
  out.data.provenance = "synth:" + to_string(kind) + ":n=" + std::to_string(n) + ":seed=" + std::to_string(seed);
  return out;
}

}  // namespace iikl::data
