#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the code under test except for parameter
// accessors, so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "iikl/nn/network.hpp"
#include "iikl/types.hpp"

namespace iikl::oracle {

// Small hand-rolled generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }

  Matrix matrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = scale * normal();
    }
    return m;
  }
  Vector vector(Eigen::Index n, double scale = 1.0) { return matrix(n, 1, scale); }

  std::vector<nn::LayerSpec> specs(int in, int out, int max_hidden_layers = 3, int max_width = 6,
                                   bool allow_norm = false) {
    std::vector<nn::LayerSpec> s;
    const int hidden = integer(0, max_hidden_layers);
    int width = in;
    for (int l = 0; l <= hidden; ++l) {
      const bool last = l == hidden;
      nn::LayerSpec spec;
      spec.in_width = width;
      spec.out_width = last ? out : integer(1, max_width);
      spec.activation = last ? nn::Activation::kIdentity : nn::Activation::kLeakyRelu;
      spec.slope = uniform(0.05, 0.5);
      spec.affine_norm = allow_norm && integer(0, 1) == 1;
      width = spec.out_width;
      s.push_back(spec);
    }
    return s;
  }

  // Trainable net with randomized biases and norm parameters so that every
  // parameter group is exercised.
  nn::Network network(const std::vector<nn::LayerSpec>& specs) {
    auto net = nn::Network::init(specs, rng_());
    for (std::size_t l = 0; l < specs.size(); ++l) {
      net.set_bias(l, vector(specs[l].out_width, 0.3));
      if (specs[l].affine_norm) {
        const auto w = specs[l].out_width;
        nn::NormStats stats{vector(w, 0.2), (vector(w).array().abs() + 0.5).matrix()};
        net.set_norm(l, (vector(w, 0.3).array() + 1.0).matrix(), vector(w, 0.2), stats);
      }
    }
    return net;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Forward pass written directly from the layer definition.
inline Vector forward(const nn::Network& net, const Vector& x) {
  Vector a = x;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& spec = net.specs()[l];
    const Matrix w = net.weights(l);
    const Vector b = net.bias(l);
    Vector pre(spec.out_width);
    for (int i = 0; i < spec.out_width; ++i) {
      double s = b[i];
      for (int j = 0; j < spec.in_width; ++j) s += w(i, j) * a[j];
      if (spec.affine_norm) {
        const auto& st = net.norm_stats(l);
        s = (s - st.mean[i]) / std::sqrt(st.variance[i] + nn::Network::kNormEpsilon) * net.norm_scale(l)[i] +
            net.norm_shift(l)[i];
      }
      if (spec.activation == nn::Activation::kLeakyRelu && s < 0.0) s *= spec.slope;
      pre[i] = s;
    }
    a = pre;
  }
  return a;
}

inline Matrix fd_jacobian(const nn::Network& net, const Vector& z, double h = 1e-6) {
  const Vector f0 = forward(net, z);
  Matrix j(f0.size(), z.size());
  for (Eigen::Index c = 0; c < z.size(); ++c) {
    Vector zp = z;
    Vector zm = z;
    zp[c] += h;
    zm[c] -= h;
    j.col(c) = (forward(net, zp) - forward(net, zm)) / (2.0 * h);
  }
  return j;
}

// Central differences of a scalar function of the network parameters.
inline Vector fd_gradient(nn::Network net, const std::function<double(const nn::Network&)>& f, double h = 1e-6) {
  const Vector base = net.parameters();
  Vector g(base.size());
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    Vector p = base;
    p[i] += h;
    net.set_parameters(p);
    const double up = f(net);
    p[i] -= 2.0 * h;
    net.set_parameters(p);
    const double down = f(net);
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Exhaustive nearest neighbors: full sort by (distance, index).
inline std::vector<std::vector<int>> knn(const Matrix& pts, int k) {
  std::vector<std::vector<int>> out;
  for (Eigen::Index h = 0; h < pts.rows(); ++h) {
    std::vector<std::pair<double, int>> d;
    for (Eigen::Index j = 0; j < pts.rows(); ++j) {
      if (j != h) d.emplace_back((pts.row(j) - pts.row(h)).squaredNorm(), static_cast<int>(j));
    }
    std::sort(d.begin(), d.end());
    std::vector<int> row;
    for (int r = 0; r < k; ++r) row.push_back(d[static_cast<std::size_t>(r)].second);
    out.push_back(row);
  }
  return out;
}

using MetricAt = std::function<Matrix(const Vector&)>;

struct Metrics {
  double ipi = 0.0;
  double iso = 0.0;
  double con = 0.0;
};

// IPI, isometry and conformal preservation from their definitions. `ambient`
// supplies the ambient-side points (raw data or decoded latents).
inline Metrics preservation(const Matrix& X, const Matrix& ambient, const Matrix& Z, const MetricAt& g_at, int k) {
  const auto nb = knn(X, k);
  Metrics m;
  int ipi_origins = 0;
  int con_origins = 0;
  for (Eigen::Index h = 0; h < X.rows(); ++h) {
    const Matrix g = g_at(Z.row(h).transpose());
    double ipi = 0.0;
    double con = 0.0;
    double iso = 0.0;
    int ipi_n = 0;
    int con_n = 0;
    for (int a = 0; a < k; ++a) {
      const Vector p = (Z.row(nb[h][a]) - Z.row(h)).transpose();
      const Vector u = (ambient.row(nb[h][a]) - ambient.row(h)).transpose();
      const double giso = (p.transpose() * g * p)(0, 0) - u.squaredNorm();
      iso += giso * giso;
      for (int b = a + 1; b < k; ++b) {
        const Vector q = (Z.row(nb[h][b]) - Z.row(h)).transpose();
        const Vector v = (ambient.row(nb[h][b]) - ambient.row(h)).transpose();
        if (u.norm() < 1e-12 || v.norm() < 1e-12) continue;
        const double gpq = (p.transpose() * g * q)(0, 0);
        ipi += (gpq - u.dot(v)) * (gpq - u.dot(v));
        ++ipi_n;
        const double gp = std::sqrt((p.transpose() * g * p)(0, 0));
        const double gq = std::sqrt((q.transpose() * g * q)(0, 0));
        if (gp < 1e-12 || gq < 1e-12) continue;
        const double c = gpq / (gp * gq) - u.dot(v) / (u.norm() * v.norm());
        con += c * c;
        ++con_n;
      }
    }
    m.iso += iso / k;
    if (ipi_n > 0) {
      m.ipi += ipi / ipi_n;
      ++ipi_origins;
    }
    if (con_n > 0) {
      m.con += con / con_n;
      ++con_origins;
    }
  }
  m.iso /= static_cast<double>(X.rows());
  m.ipi /= ipi_origins;
  m.con /= con_origins;
  return m;
}

inline double sigma(double ours, double other) { return std::fabs(ours - other) / other; }
inline double eta(double coor, double rie) { return std::fabs(coor - rie) / std::fabs(coor); }

inline double rel_err(const Matrix& a, const Matrix& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-8});
  return (a - b).norm() / scale;
}

}  // namespace iikl::oracle
