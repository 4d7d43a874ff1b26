#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "iikl/baselines/baselines.hpp"
#include "iikl/error.hpp"
#include "iikl/neighborhood/knn.hpp"
#include "iikl/parallel.hpp"

namespace iikl::baselines {

namespace {

using Adjacency = std::vector<std::vector<std::pair<int, double>>>;

Adjacency knn_graph(const Matrix& X, int k) {
  const auto index = neighborhood::knn_index(X, k);
  const auto n = static_cast<std::size_t>(X.rows());
  Adjacency adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int r = 0; r < k; ++r) {
      const int j = index.neighbor(static_cast<Eigen::Index>(i), r);
      const double w = (X.row(static_cast<Eigen::Index>(i)) - X.row(j)).norm();
      adj[i].emplace_back(j, w);
      adj[static_cast<std::size_t>(j)].emplace_back(static_cast<int>(i), w);
    }
  }
  for (auto& edges : adj) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                edges.end());
  }
  return adj;
}

std::vector<std::vector<int>> components(const Adjacency& adj) {
  std::vector<int> label(adj.size(), -1);
  std::vector<std::vector<int>> out;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (label[s] >= 0) continue;
    out.emplace_back();
    std::vector<int> stack{static_cast<int>(s)};
    label[s] = static_cast<int>(out.size() - 1);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      out.back().push_back(u);
      for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
        if (label[static_cast<std::size_t>(v)] < 0) {
          label[static_cast<std::size_t>(v)] = label[s];
          stack.push_back(v);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

std::string describe(const std::vector<std::vector<int>>& comps) {
  std::ostringstream msg;
  msg << "KNN graph is disconnected: " << comps.size() << " components";
  for (std::size_t c = 0; c < comps.size() && c < 8; ++c) {
    msg << (c == 0 ? " [" : "; ") << "component " << c << ": " << comps[c].size() << " samples {";
    for (std::size_t i = 0; i < comps[c].size() && i < 6; ++i) msg << (i ? "," : "") << comps[c][i];
    msg << (comps[c].size() > 6 ? ",...}" : "}");
  }
  msg << (comps.size() > 8 ? "; ...]" : "]");
  return msg.str();
}

void dijkstra(const Adjacency& adj, int source, double* dist) {
  const auto n = adj.size();
  std::fill(dist, dist + n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        heap.emplace(dist[v], v);
      }
    }
  }
}

}  // namespace

Matrix geodesic_distances(const Matrix& X, int k, int threads) {
  if (k < 1 || k >= X.rows()) throw ConfigError("ISOMAP K must be in [1, N)");
  const auto adj = knn_graph(X, k);
  const auto comps = components(adj);
  if (comps.size() > 1) throw EvalError(describe(comps));
  Matrix d(X.rows(), X.rows());  // column-major: column s holds distances from s
  parallel_for(adj.size(), threads,
               [&](std::size_t s) { dijkstra(adj, static_cast<int>(s), d.col(static_cast<Eigen::Index>(s)).data()); });
  // Dijkstra on an undirected graph is symmetric up to summation order.
  return 0.5 * (d + d.transpose());
}

Embedding isomap_embed(const Matrix& X, int k, int n, int threads) {
  if (n < 1 || n >= X.rows()) throw ConfigError("ISOMAP target dimension must be in [1, N)");
  const Matrix geo = geodesic_distances(X, k, threads);
  const Eigen::Index N = X.rows();
  const Matrix sq = geo.array().square().matrix();
  const Vector row_mean = sq.rowwise().mean();
  const double all_mean = row_mean.mean();
  Matrix b(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) b(i, j) = -0.5 * (sq(i, j) - row_mean[i] - row_mean[j] + all_mean);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  if (eig.info() != Eigen::Success) throw EvalError("MDS eigendecomposition failed");
  Embedding out;
  out.Z.resize(N, n);
  std::vector<double> kept;
  for (int c = 0; c < n; ++c) {
    const Eigen::Index col = N - 1 - c;  // ascending order from Eigen
    const double lambda = std::max(0.0, eig.eigenvalues()[col]);
    Vector v = eig.eigenvectors().col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    out.Z.col(c) = std::sqrt(lambda) * v;
    kept.push_back(lambda);
  }
  out.method = "isomap";
  out.parameters = {{"k", k}, {"n", n}, {"eigenvalues", kept}};
  return out;
}

}  // namespace iikl::baselines
