#include "embedding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace attrscope {

std::string_view to_string(Method m) {
  return m == Method::Tsne ? "tsne" : "pca";
}

Method parse_method(std::string_view text) {
  if (text == "tsne" || text == "t-sne") return Method::Tsne;
  if (text == "pca") return Method::Pca;
  throw validation_error("invalid_method",
                         "unknown embedding method '" + std::string(text) + "'");
}

std::string EmbeddingParams::cache_key() const {
  std::ostringstream ss;
  ss.precision(17);
  ss << to_string(space) << '|' << to_string(method);
  if (method == Method::Tsne) {
    ss << "|perplexity=" << perplexity << "|iterations=" << iterations
       << "|learning_rate=" << learning_rate << "|seed=" << seed
       << "|exaggeration=" << exaggeration
       << "|exaggeration_iterations=" << exaggeration_iterations
       << "|momentum_switch=" << momentum_switch;
  }
  ss << "|standardize=" << (standardize ? 1 : 0);
  return ss.str();
}

namespace {

using MatrixXdR =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void orient(Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0.0) v = -v;
}

}  // namespace

PcaResult pca(const PointSet& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto d = static_cast<Eigen::Index>(data.dim());
  if (n < 3) {
    throw validation_error("too_few_points", "PCA needs at least 3 points");
  }
  if (d < 1) {
    throw validation_error("degenerate_data", "PCA input has no dimensions");
  }
  bool identical = true;
  for (std::size_t i = 1; i < data.size() && identical; ++i) {
    auto a = data.row(0);
    auto b = data.row(i);
    identical = std::equal(a.begin(), a.end(), b.begin());
  }
  if (identical) {
    throw Error(ErrorKind::Numerical, "degenerate_data",
                "all points are identical; PCA is undefined");
  }

  Eigen::Map<const MatrixXdR> raw(data.data().data(), n, d);
  const Eigen::RowVectorXd mean = raw.colwise().mean();
  const MatrixXdR centered = raw.rowwise() - mean;
  const double denom = static_cast<double>(n - 1);

  Eigen::VectorXd eig(2);
  Eigen::VectorXd v1(d), v2(d);
  double total = 0.0;

  if (d <= n) {
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::Numerical, "eigensolver_failed",
                  "covariance eigendecomposition failed");
    }
    total = cov.trace();
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    eig[0] = vals[d - 1];
    eig[1] = d >= 2 ? vals[d - 2] : 0.0;
    v1 = vecs.col(d - 1);
    if (d >= 2) v2 = vecs.col(d - 2);
  } else {
    // Fewer points than dimensions: work with the n x n Gram matrix, whose
    // non-zero eigenvalues equal those of the covariance.
    const Eigen::MatrixXd gram = (centered * centered.transpose()) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::Numerical, "eigensolver_failed",
                  "Gram eigendecomposition failed");
    }
    total = gram.trace();
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    eig[0] = vals[n - 1];
    eig[1] = vals[n - 2];
    v1 = centered.transpose() * vecs.col(n - 1);
    v1.normalize();
    const double floor = 1e-12 * std::max(eig[0], 0.0);
    if (eig[1] > floor) {
      v2 = centered.transpose() * vecs.col(n - 2);
    } else {
      v2.setZero();
    }
  }

  eig[0] = std::max(eig[0], 0.0);
  eig[1] = std::max(eig[1], 0.0);

  // Re-orthonormalize the second direction; if it vanished (rank-1 data or a
  // one-dimensional input) pick the coordinate axis least aligned with v1.
  if (d >= 2) {
    v2 -= v1.dot(v2) * v1;
    if (v2.norm() < 1e-8) {
      Eigen::Index axis = 0;
      for (Eigen::Index i = 1; i < d; ++i) {
        if (std::abs(v1[i]) < std::abs(v1[axis])) axis = i;
      }
      v2.setZero();
      v2[axis] = 1.0;
      v2 -= v1.dot(v2) * v1;
    }
    v2.normalize();
  } else {
    v2.setZero();
  }
  orient(v1);
  if (d >= 2) orient(v2);

  PcaResult out;
  out.eigenvalues = {eig[0], eig[1]};
  out.total_variance = total;
  out.components = PointSet(2, static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    out.components(0, j) = v1[j];
    out.components(1, j) = v2[j];
  }
  out.projected = PointSet(static_cast<std::size_t>(n), 2);
  const Eigen::VectorXd p1 = centered * v1;
  const Eigen::VectorXd p2 = centered * v2;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.projected(i, 0) = p1[i];
    out.projected(i, 1) = p2[i];
  }
  return out;
}

PointSet space_matrix(const Dataset& dataset, Space space, bool standardize) {
  const std::size_t n = dataset.size();
  const std::size_t dim =
      space == Space::Fea ? dataset.feature_count() : dataset.attribute_count();
  PointSet m(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = dataset.vector_of(i, space);
    std::copy(v.begin(), v.end(), m.row(i).begin());
  }
  if (standardize && n > 1) {
    for (std::size_t d = 0; d < dim; ++d) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += m(i, d);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        var += (m(i, d) - mean) * (m(i, d) - mean);
      }
      const double sd = std::sqrt(var / static_cast<double>(n - 1));
      for (std::size_t i = 0; i < n; ++i) {
        m(i, d) = sd > 0.0 ? (m(i, d) - mean) / sd : 0.0;
      }
    }
  }
  return m;
}

namespace {

Embedding wrap(const Dataset& dataset, const EmbeddingParams& params,
               PointSet points) {
  Embedding e;
  e.params = params;
  e.ids.reserve(dataset.size());
  for (const auto& r : dataset.records()) e.ids.push_back(r.id);
  e.points = std::move(points);
  return e;
}

}  // namespace

Embedding pca_project(const Dataset& dataset, Space space, bool standardize) {
  EmbeddingParams params;
  params.space = space;
  params.method = Method::Pca;
  params.standardize = standardize;
  auto result = pca(space_matrix(dataset, space, standardize));
  auto e = wrap(dataset, params, std::move(result.projected));
  e.explained_variance = result.eigenvalues;
  if (result.total_variance > 0.0) {
    e.explained_variance_ratio = {result.eigenvalues[0] / result.total_variance,
                                  result.eigenvalues[1] / result.total_variance};
  }
  return e;
}

// ---------------------------------------------------------------- t-SNE

Calibration perplexity_calibration(std::span<const double> sq_dist,
                                   double perplexity) {
  const std::size_t m = sq_dist.size();
  if (m == 0) {
    throw validation_error("too_few_points",
                           "perplexity calibration needs neighbours");
  }
  if (!(perplexity > 0.0)) {
    throw validation_error("invalid_perplexity", "perplexity must be positive");
  }
  const double target = std::log2(perplexity);
  const double dmin = *std::min_element(sq_dist.begin(), sq_dist.end());

  Calibration cal;
  cal.probabilities.assign(m, 0.0);

  std::size_t ties = 0;
  for (auto d : sq_dist) ties += (d == dmin) ? 1 : 0;
  if (std::log2(static_cast<double>(ties)) > target + kCalibrationTolerance) {
    for (std::size_t j = 0; j < m; ++j) {
      cal.probabilities[j] = sq_dist[j] == dmin ? 1.0 / ties : 0.0;
    }
    cal.beta = std::numeric_limits<double>::infinity();
    cal.sigma = 0.0;
    cal.entropy_bits = std::log2(static_cast<double>(ties));
    cal.saturated = true;
    return cal;
  }

  double beta = 1.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double entropy = 0.0;
  for (int step = 0; step < kCalibrationMaxSteps; ++step) {
    double sum = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double shifted = sq_dist[j] - dmin;
      const double w = std::exp(-beta * shifted);
      cal.probabilities[j] = w;
      sum += w;
      weighted += shifted * w;
    }
    entropy = (std::log(sum) + beta * weighted / sum) / std::numbers::ln2;
    const double diff = entropy - target;
    if (std::abs(diff) < kCalibrationTolerance) {
      for (auto& p : cal.probabilities) p /= sum;
      cal.beta = beta;
      cal.sigma = std::sqrt(1.0 / (2.0 * beta));
      cal.entropy_bits = entropy;
      cal.steps = step + 1;
      return cal;
    }
    if (diff > 0.0) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
    } else {
      hi = beta;
      beta = std::isinf(lo) ? beta / 2.0 : (beta + lo) / 2.0;
    }
  }
  std::ostringstream ss;
  ss.precision(10);
  ss << "perplexity calibration did not converge in " << kCalibrationMaxSteps
     << " steps: achieved entropy " << entropy << " bits, target " << target;
  throw Error(ErrorKind::Numerical, "calibration_failed", ss.str(),
              std::to_string(entropy));
}

std::vector<double> squared_distances(const PointSet& data) {
  const std::size_t n = data.size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = squared_distance(data.row(i), data.row(j));
      out[i * n + j] = d;
      out[j * n + i] = d;
    }
  }
  return out;
}

Affinities joint_probabilities(const PointSet& data, double perplexity) {
  const std::size_t n = data.size();
  if (!(perplexity >= 1.0) || perplexity >= static_cast<double>(n)) {
    throw validation_error("invalid_perplexity",
                           "perplexity must be at least 1 and below the "
                           "number of points");
  }
  const auto dist = squared_distances(data);
  Affinities aff;
  aff.n = n;
  aff.p.assign(n * n, 0.0);
  aff.rows.reserve(n);
  std::vector<double> row(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0, k = 0; j < n; ++j) {
      if (j != i) row[k++] = dist[i * n + j];
    }
    auto cal = perplexity_calibration(row, perplexity);
    for (std::size_t j = 0, k = 0; j < n; ++j) {
      if (j != i) aff.p[i * n + j] = cal.probabilities[k++];
    }
    cal.probabilities.clear();
    cal.probabilities.shrink_to_fit();
    aff.rows.push_back(std::move(cal));
  }
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (aff.p[i * n + j] + aff.p[j * n + i]) * scale;
      aff.p[i * n + j] = s;
      aff.p[j * n + i] = s;
    }
  }
  return aff;
}

namespace {

void validate(const EmbeddingParams& p, std::size_t n) {
  if (n < 5) {
    throw validation_error("too_few_points", "t-SNE needs at least 5 points");
  }
  if (!(p.perplexity >= 2.0)) {
    throw validation_error("invalid_perplexity", "perplexity must be >= 2");
  }
  if (p.perplexity >= static_cast<double>(n)) {
    throw validation_error("invalid_perplexity",
                           "perplexity must be below the number of points (" +
                               std::to_string(n) + ")");
  }
  if (p.iterations < 1) {
    throw validation_error("invalid_iterations", "iterations must be >= 1");
  }
  if (p.exaggeration != 1.0 && p.iterations < p.exaggeration_iterations) {
    throw validation_error("invalid_iterations",
                           "iterations must cover the exaggeration phase");
  }
  if (!(p.learning_rate > 0.0) || !std::isfinite(p.learning_rate)) {
    throw validation_error("invalid_learning_rate",
                           "learning rate must be positive");
  }
  if (!(p.exaggeration > 0.0) || !std::isfinite(p.exaggeration)) {
    throw validation_error("invalid_exaggeration",
                           "exaggeration must be positive");
  }
}

double kl_divergence(const std::vector<double>& p, const PointSet& y) {
  const std::size_t n = y.size();
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      z += 2.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pij = p[i * n + j];
      if (pij <= 0.0) continue;
      const double q = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j))) / z;
      kl += 2.0 * pij * std::log(pij / q);
    }
  }
  return kl;
}

}  // namespace

TsneResult tsne(const PointSet& data, const EmbeddingParams& params) {
  const std::size_t n = data.size();
  validate(params, n);
  const auto aff = joint_probabilities(data, params.perplexity);
  const auto& p = aff.p;

  Rng rng(params.seed);
  PointSet y(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    y(i, 0) = rng.normal() * 1e-4;
    y(i, 1) = rng.normal() * 1e-4;
  }
  // Identical rows start together so they receive identical forces.
  std::map<std::vector<double>, std::size_t> first_seen;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = data.row(i);
    const auto [it, fresh] =
        first_seen.try_emplace(std::vector<double>(row.begin(), row.end()), i);
    if (!fresh) {
      y(i, 0) = y(it->second, 0);
      y(i, 1) = y(it->second, 1);
    }
  }

  std::vector<double> update(n * 2, 0.0);
  std::vector<double> gains(n * 2, 1.0);
  std::vector<double> grad(n * 2, 0.0);
  std::vector<double> num(n * n, 0.0);
  TsneResult out;

  for (int iter = 0; iter < params.iterations; ++iter) {
    const double exaggeration =
        iter < params.exaggeration_iterations ? params.exaggeration : 1.0;
    const double momentum = iter < params.momentum_switch ? 0.5 : 0.8;

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y(i, 0) - y(j, 0);
        const double dy = y(i, 1) - y(j, 1);
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = q;
        z += 2.0 * q;
      }
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double q = num[i * n + j];
        const double mult = (exaggeration * p[i * n + j] - q / z) * q;
        const double gx = mult * (y(i, 0) - y(j, 0));
        const double gy = mult * (y(i, 1) - y(j, 1));
        grad[2 * i] += gx;
        grad[2 * i + 1] += gy;
        grad[2 * j] -= gx;
        grad[2 * j + 1] -= gy;
      }
    }
    for (std::size_t k = 0; k < 2 * n; ++k) {
      const double g = 4.0 * grad[k];
      if (!std::isfinite(g)) {
        throw Error(ErrorKind::Numerical, "non_finite_gradient",
                    "t-SNE gradient became non-finite at iteration " +
                        std::to_string(iter),
                    std::to_string(iter));
      }
      // Per-coordinate adaptive gains (delta-bar-delta).
      gains[k] = (g > 0.0) != (update[k] > 0.0) ? gains[k] + 0.2
                                                 : gains[k] * 0.8;
      gains[k] = std::max(gains[k], 0.01);
      update[k] = momentum * update[k] - params.learning_rate * gains[k] * g;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y(i, 0) += update[2 * i];
      y(i, 1) += update[2 * i + 1];
      mx += y(i, 0);
      my += y(i, 1);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y(i, 0) -= mx;
      y(i, 1) -= my;
    }
    if ((iter + 1) % 50 == 0 || iter + 1 == params.iterations) {
      out.kl_trace.push_back({iter + 1, kl_divergence(p, y)});
    }
  }
  out.points = std::move(y);
  return out;
}

Embedding tsne_project(const Dataset& dataset, const EmbeddingParams& params) {
  auto data = space_matrix(dataset, params.space, params.standardize);
  auto result = tsne(data, params);
  auto e = wrap(dataset, params, std::move(result.points));
  e.kl_trace = std::move(result.kl_trace);
  return e;
}

Embedding project(const Dataset& dataset, const EmbeddingParams& params) {
  if (params.method == Method::Pca) {
    auto e = pca_project(dataset, params.space, params.standardize);
    e.params = params;
    return e;
  }
  return tsne_project(dataset, params);
}

}  // namespace attrscope
