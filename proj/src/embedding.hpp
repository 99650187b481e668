#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "points.hpp"

namespace attrscope {

enum class Method { Tsne, Pca };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

struct EmbeddingParams {
  Space space = Space::Fea;
  Method method = Method::Tsne;
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  std::uint64_t seed = 0;
  double exaggeration = 12.0;
  int exaggeration_iterations = 250;
  int momentum_switch = 250;
  // Per-dimension z-scoring of the input vectors; off by default.
  bool standardize = false;

  bool operator==(const EmbeddingParams&) const = default;
  /// Canonical textual key covering every field; used for caching.
  std::string cache_key() const;
};

struct TracePoint {
  int iteration = 0;
  double value = 0.0;
  bool operator==(const TracePoint&) const = default;
};

struct Embedding {
  EmbeddingParams params;
  std::vector<std::string> ids;
  PointSet points;  // ids.size() x 2
  // t-SNE: KL divergence every 50 iterations.
  std::vector<TracePoint> kl_trace;
  // PCA: variance along each of the two components and their share of the
  // total variance.
  std::array<double, 2> explained_variance{0.0, 0.0};
  std::array<double, 2> explained_variance_ratio{0.0, 0.0};
};

// ---------------------------------------------------------------- PCA

struct PcaResult {
  PointSet projected;   // n x 2
  PointSet components;  // 2 x dim, orthonormal rows
  std::array<double, 2> eigenvalues{0.0, 0.0};
  double total_variance = 0.0;
};

/// Sample-covariance PCA onto the top two directions. Each component is
/// oriented so its largest-magnitude loading is positive.
PcaResult pca(const PointSet& data);

Embedding pca_project(const Dataset& dataset, Space space,
                      bool standardize = false);

// ---------------------------------------------------------------- t-SNE

struct Calibration {
  double beta = 0.0;   // precision 1 / (2 sigma^2)
  double sigma = 0.0;
  double entropy_bits = 0.0;
  int steps = 0;
  // Target entropy is below what the row allows (several neighbours tie at
  // the minimum distance); the result is the uniform limit over the ties.
  bool saturated = false;
  std::vector<double> probabilities;  // conditional p(j|i), sums to 1
};

inline constexpr double kCalibrationTolerance = 1e-5;
inline constexpr int kCalibrationMaxSteps = 200;

/// Bisection on the Gaussian precision so the conditional distribution over
/// `squared_distances` (self excluded) has entropy log2(perplexity).
Calibration perplexity_calibration(std::span<const double> squared_distances,
                                   double perplexity);

struct Affinities {
  std::size_t n = 0;
  std::vector<double> p;  // symmetric n x n joint probabilities
  std::vector<Calibration> rows;  // probabilities dropped to save memory
};

/// Pairwise squared Euclidean distances, n x n row-major.
std::vector<double> squared_distances(const PointSet& data);

Affinities joint_probabilities(const PointSet& data, double perplexity);

struct TsneResult {
  PointSet points;
  std::vector<TracePoint> kl_trace;
};

TsneResult tsne(const PointSet& data, const EmbeddingParams& params);

/// Input vectors of the chosen space, optionally standardized.
PointSet space_matrix(const Dataset& dataset, Space space, bool standardize);

Embedding tsne_project(const Dataset& dataset, const EmbeddingParams& params);

/// Dispatches on params.method.
Embedding project(const Dataset& dataset, const EmbeddingParams& params);

}  // namespace attrscope
