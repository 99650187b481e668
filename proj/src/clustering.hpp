#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "embedding.hpp"
#include "points.hpp"

namespace attrscope {

inline constexpr int kNoise = -1;
inline constexpr int kKmeansMaxIterations = 300;

enum class ClusterMethod { Kmeans, Dbscan };
enum class CoordinateSource { Embedded2d, Original };

std::string_view to_string(ClusterMethod m);
std::string_view to_string(CoordinateSource s);
ClusterMethod parse_cluster_method(std::string_view text);
CoordinateSource parse_coordinate_source(std::string_view text);

struct ClusterParams {
  ClusterMethod method = ClusterMethod::Kmeans;
  std::size_t k = 2;
  double eps = 0.5;
  std::size_t min_pts = 4;
  std::uint64_t seed = 0;
  Space space = Space::Prd;
  CoordinateSource coordinate_source = CoordinateSource::Embedded2d;
};

struct KmeansResult {
  std::vector<int> labels;
  PointSet centroids;
  double inertia = 0.0;
  int iterations = 0;
  // Inertia after every assignment step; non-increasing.
  std::vector<double> inertia_trace;
};

/// k-means++ seeding followed by Lloyd iterations until the assignment stops
/// changing (or the iteration cap). Ties go to the lowest cluster id.
KmeansResult kmeans(const PointSet& points, std::size_t k, std::uint64_t seed);

/// Closed-ball neighbourhoods that include the point itself. Clusters are
/// numbered in discovery order while scanning points in input order; a
/// border point reachable from several clusters keeps the first.
std::vector<int> dbscan(const PointSet& points, double eps, std::size_t min_pts);

/// Mean silhouette over non-noise points; singleton clusters contribute 0.
/// nullopt with fewer than two clusters.
std::optional<double> silhouette(const PointSet& points,
                                 std::span<const int> labels);

struct DaviesBouldin {
  std::optional<double> value;
  bool degenerate_centroids = false;  // two clusters share a centroid
};

DaviesBouldin davies_bouldin(const PointSet& points,
                             std::span<const int> labels);

struct ClusterResult {
  std::vector<std::string> ids;
  std::vector<int> labels;
  std::size_t k_found = 0;
  std::optional<double> inertia;  // k-means only
  std::optional<double> silhouette;
  DaviesBouldin davies_bouldin;
};

/// Runs the configured clustering on points, attaching validation scores.
ClusterResult cluster_points(const PointSet& points,
                             std::vector<std::string> ids,
                             const ClusterParams& params);

/// Clusters `group` using either the embedding's 2-D coordinates or the
/// original vectors of params.space.
ClusterResult cluster_group(const Dataset& dataset,
                            std::span<const std::string> group,
                            const Embedding* embedding,
                            const ClusterParams& params);

}  // namespace attrscope
