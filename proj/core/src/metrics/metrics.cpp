#include "iikl/metrics/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "iikl/error.hpp"
#include "iikl/geometry/metric.hpp"
#include "iikl/neighborhood/knn.hpp"
#include "iikl/parallel.hpp"

namespace iikl::metrics {

MetricField MetricField::identity(int dim, double scale) {
  if (dim < 1) throw ConfigError("identity metric dimension must be >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("identity metric scale must be positive");
  MetricField f;
  f.dim_ = dim;
  f.scale_ = scale;
  return f;
}

MetricField MetricField::pullback(const nn::Network& net) {
  MetricField f;
  f.net_ = &net;
  f.dim_ = net.input_width();
  return f;
}

Matrix MetricField::at(const Vector& z) const {
  if (z.size() != dim_) throw InputError("latent point has the wrong dimension for the metric field");
  if (net_ == nullptr) return scale_ * Matrix::Identity(dim_, dim_);
  return geometry::pullback_metric(*net_, z).g;
}

std::vector<Matrix> MetricField::at_rows(const Matrix& z) const {
  if (z.cols() != dim_) throw InputError("latent points have the wrong dimension for the metric field");
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(z.rows()));
  if (net_ == nullptr) {
    out.assign(static_cast<std::size_t>(z.rows()), scale_ * Matrix::Identity(dim_, dim_));
    return out;
  }
  for (auto& m : geometry::pullback_metrics(*net_, z.transpose())) out.push_back(std::move(m.g));
  return out;
}

namespace {

void check_inputs(const Matrix& X, const Matrix& Z, const MetricField& field, int k) {
  if (X.rows() != Z.rows()) {
    throw InputError("ambient and embedded point counts differ (" + std::to_string(X.rows()) + " vs " +
                     std::to_string(Z.rows()) + ")");
  }
  if (Z.cols() != field.dim()) throw InputError("embedding width does not match the metric field");
  if (k < 2) throw ConfigError("K must be >= 2 so that every neighborhood has at least one pair");
  if (k >= X.rows()) throw ConfigError("K must be smaller than the number of samples");
  if (!X.allFinite() || !Z.allFinite()) throw InputError("evaluation inputs contain non-finite values");
}

}  // namespace

EvalReport evaluate(const Matrix& X, const Matrix& Z, const MetricField& field,
                    const EvalOptions& options) {
  const int k = options.k;
  check_inputs(X, Z, field, k);
  if (options.decoder != nullptr && (options.decoder->input_width() != Z.cols() ||
                                     options.decoder->output_width() != X.cols())) {
    throw InputError("decoder widths do not match the embedding and ambient data");
  }

  const auto index = neighborhood::knn_index(
      options.neighbor_space == EvalNeighborSpace::kAmbient ? X : Z, k);
  // Ambient side: decoded latents give secant pushes f_D(z_j) - f_D(z_h).
  const Matrix ambient = options.decoder != nullptr
                             ? Matrix(options.decoder->forward_batch(Z.transpose()).transpose())
                             : X;
  const auto metrics = field.at_rows(Z);
  const auto pairs = neighborhood::pair_list(k);

  EvalReport report;
  report.k = k;
  report.ambient_source = options.decoder != nullptr ? "decoder_push" : "ambient_difference";
  report.neighbor_space = options.neighbor_space == EvalNeighborSpace::kAmbient ? "ambient" : "embedded";
  report.per_point.resize(static_cast<std::size_t>(X.rows()));

  parallel_for(static_cast<std::size_t>(X.rows()), options.threads, [&](std::size_t hi) {
    const auto h = static_cast<Eigen::Index>(hi);
    const Matrix& g = metrics[hi];
    std::vector<Vector> lat(static_cast<std::size_t>(k));
    std::vector<Vector> amb(static_cast<std::size_t>(k));
    Vector g_norm(k);
    Vector a_norm(k);
    for (int r = 0; r < k; ++r) {
      const auto j = index.neighbor(h, r);
      lat[r] = Z.row(j) - Z.row(h);
      amb[r] = ambient.row(j) - ambient.row(h);
      g_norm[r] = std::sqrt(std::max(0.0, geometry::metric_inner(g, lat[r], lat[r])));
      a_norm[r] = amb[r].norm();
    }
    PointBreakdown& out = report.per_point[hi];
    double iso = 0.0;
    for (int r = 0; r < k; ++r) {
      const double diff = geometry::metric_inner(g, lat[r], lat[r]) - amb[r].squaredNorm();
      iso += diff * diff;
    }
    out.l_iso = iso / k;

    double ipi_sum = 0.0;
    double con_sum = 0.0;
    for (const auto& [a, b] : pairs) {
      const double kernel = geometry::metric_inner(g, lat[a], lat[b]);
      const double inner = amb[a].dot(amb[b]);
      if (a_norm[a] >= kDegenerateNorm && a_norm[b] >= kDegenerateNorm) {
        ipi_sum += (kernel - inner) * (kernel - inner);
        ++out.ipi_pairs;
        if (g_norm[a] >= kDegenerateNorm && g_norm[b] >= kDegenerateNorm) {
          const double c = kernel / (g_norm[a] * g_norm[b]) - inner / (a_norm[a] * a_norm[b]);
          con_sum += c * c;
          ++out.con_pairs;
        }
      }
    }
    out.ipi = out.ipi_pairs > 0 ? ipi_sum / out.ipi_pairs : 0.0;
    out.l_con = out.con_pairs > 0 ? con_sum / out.con_pairs : 0.0;
  });

  // Ordered reduction; origins without any usable pair drop out of the mean.
  int ipi_origins = 0;
  int con_origins = 0;
  for (const auto& p : report.per_point) {
    report.l_iso += p.l_iso;
    report.total_pairs += static_cast<long long>(pairs.size());
    report.ipi_excluded += static_cast<long long>(pairs.size()) - p.ipi_pairs;
    report.con_excluded += static_cast<long long>(pairs.size()) - p.con_pairs;
    if (p.ipi_pairs > 0) {
      report.ipi += p.ipi;
      ++ipi_origins;
    }
    if (p.con_pairs > 0) {
      report.l_con += p.l_con;
      ++con_origins;
    }
  }
  report.l_iso /= static_cast<double>(X.rows());
  if (ipi_origins == 0 || con_origins == 0) {
    throw EvalError("every neighbor pair is degenerate (zero-length vectors); metrics are undefined");
  }
  report.ipi /= ipi_origins;
  report.l_con /= con_origins;
  return report;
}

double ipi(const Matrix& X, const Matrix& Z, const MetricField& field, int k) {
  return evaluate(X, Z, field, {.k = k}).ipi;
}

double isometry_preservation(const Matrix& X, const Matrix& Z, const MetricField& field, int k,
                             const nn::Network* decoder) {
  return evaluate(X, Z, field, {.k = k, .decoder = decoder}).l_iso;
}

double conformal_preservation(const Matrix& X, const Matrix& Z, const MetricField& field, int k,
                              const nn::Network* decoder) {
  return evaluate(X, Z, field, {.k = k, .decoder = decoder}).l_con;
}

double sigma_reduction(double ours, double other) {
  if (!(other > 0.0)) throw InputError("sigma reduction needs a positive reference loss");
  return std::abs(ours - other) / other;
}

nlohmann::json to_json(const EvalReport& r) {
  return {{"ipi", r.ipi},
          {"l_iso", r.l_iso},
          {"l_con", r.l_con},
          {"sigma_vs", r.sigma_vs},
          {"k", r.k},
          {"total_pairs", r.total_pairs},
          {"ipi_excluded_pairs", r.ipi_excluded},
          {"con_excluded_pairs", r.con_excluded},
          {"ambient_source", r.ambient_source},
          {"neighbor_space", r.neighbor_space},
          {"samples", r.per_point.size()}};
}

std::string per_point_csv(const EvalReport& r) {
  std::ostringstream out;
  out << std::setprecision(17) << "index,ipi,l_iso,l_con,ipi_pairs,con_pairs\n";
  for (std::size_t i = 0; i < r.per_point.size(); ++i) {
    const auto& p = r.per_point[i];
    out << i << ',' << p.ipi << ',' << p.l_iso << ',' << p.l_con << ',' << p.ipi_pairs << ','
        << p.con_pairs << '\n';
  }
  return out.str();
}

}  // namespace iikl::metrics
