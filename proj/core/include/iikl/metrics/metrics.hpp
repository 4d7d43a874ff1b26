#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iikl/nn/network.hpp"
#include "iikl/types.hpp"

namespace iikl::metrics {

// Metric tensor field on the latent space: the pullback of a network, or a
// constant multiple of the identity (used for external embeddings).
class MetricField {
 public:
  static MetricField identity(int dim, double scale = 1.0);
  /// Keeps a reference; `net` must outlive the field.
  static MetricField pullback(const nn::Network& net);

  int dim() const { return dim_; }
  bool is_identity() const { return net_ == nullptr; }
  double scale() const { return scale_; }
  Matrix at(const Vector& z) const;
  /// One tensor per row of `z`.
  std::vector<Matrix> at_rows(const Matrix& z) const;

 private:
  const nn::Network* net_ = nullptr;
  int dim_ = 0;
  double scale_ = 1.0;
};

enum class EvalNeighborSpace { kAmbient, kEmbedded };

struct EvalOptions {
  int k = 8;
  // When set, ambient vectors are decoder pushes f_D(z_j) - f_D(z_h) instead
  // of raw differences x_j - x_h.
  const nn::Network* decoder = nullptr;
  EvalNeighborSpace neighbor_space = EvalNeighborSpace::kAmbient;
  int threads = 1;
};

// Vectors or pairs whose norm falls below this are skipped and counted.
inline constexpr double kDegenerateNorm = 1e-12;

struct PointBreakdown {
  double ipi = 0.0;
  double l_iso = 0.0;
  double l_con = 0.0;
  int ipi_pairs = 0;  // pairs actually used
  int con_pairs = 0;
};

struct EvalReport {
  double ipi = 0.0;
  double l_iso = 0.0;
  double l_con = 0.0;
  std::map<std::string, double> sigma_vs;
  long long total_pairs = 0;
  long long ipi_excluded = 0;  // pairs with a zero ambient vector
  long long con_excluded = 0;  // pairs with any zero norm
  std::string ambient_source;  // "decoder_push" or "ambient_difference"
  std::string neighbor_space;
  int k = 0;
  std::vector<PointBreakdown> per_point;
};

/// All three metrics in one pass. X and Z hold one sample per row.
EvalReport evaluate(const Matrix& X, const Matrix& Z, const MetricField& field,
                    const EvalOptions& options);

double ipi(const Matrix& X, const Matrix& Z, const MetricField& field, int k);
double isometry_preservation(const Matrix& X, const Matrix& Z, const MetricField& field, int k,
                             const nn::Network* decoder = nullptr);
double conformal_preservation(const Matrix& X, const Matrix& Z, const MetricField& field, int k,
                              const nn::Network* decoder = nullptr);

/// |ours - other| / other; other must be positive.
double sigma_reduction(double ours, double other);

nlohmann::json to_json(const EvalReport& report);
/// index,ipi,l_iso,l_con,ipi_pairs,con_pairs
std::string per_point_csv(const EvalReport& report);

}  // namespace iikl::metrics
