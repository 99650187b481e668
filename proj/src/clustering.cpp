#include "clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "error.hpp"
#include "rng.hpp"

namespace attrscope {

std::string_view to_string(ClusterMethod m) {
  return m == ClusterMethod::Kmeans ? "kmeans" : "dbscan";
}

std::string_view to_string(CoordinateSource s) {
  return s == CoordinateSource::Embedded2d ? "embedded-2d" : "original";
}

ClusterMethod parse_cluster_method(std::string_view text) {
  if (text == "kmeans" || text == "k-means") return ClusterMethod::Kmeans;
  if (text == "dbscan") return ClusterMethod::Dbscan;
  throw validation_error("invalid_method",
                         "unknown cluster method '" + std::string(text) + "'");
}

CoordinateSource parse_coordinate_source(std::string_view text) {
  if (text == "embedded-2d" || text == "embedded") {
    return CoordinateSource::Embedded2d;
  }
  if (text == "original") return CoordinateSource::Original;
  throw validation_error("invalid_coordinate_source",
                         "unknown coordinate source '" + std::string(text) +
                             "'");
}

namespace {

void check_finite(const PointSet& points) {
  for (double v : points.data()) {
    if (!std::isfinite(v)) {
      throw validation_error("non_finite_points",
                             "cluster input contains non-finite coordinates");
    }
  }
}

std::size_t nearest(const PointSet& centroids, std::span<const double> p,
                    double* best_dist) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(centroids.row(c), p);
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  if (best_dist) *best_dist = bd;
  return best;
}

PointSet plus_plus_seeds(const PointSet& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  PointSet centroids(k, points.dim());
  auto copy_row = [&](std::size_t c, std::size_t i) {
    auto src = points.row(i);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
  };
  copy_row(0, rng.below(n));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = squared_distance(points.row(i), centroids.row(0));
  }
  // Greedy variant: several D^2-weighted candidates per step, keeping the one
  // that lowers the potential most.
  const std::size_t trials =
      2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  std::vector<double> cand_d2(n), best_d2(n);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (auto v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      double best_pot = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < trials; ++t) {
        const double r = rng.uniform() * total;
        double acc = 0.0;
        std::size_t cand = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          acc += d2[i];
          if (r < acc && d2[i] > 0.0) {
            cand = i;
            break;
          }
        }
        double pot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          cand_d2[i] = std::min(d2[i], squared_distance(points.row(i), points.row(cand)));
          pot += cand_d2[i];
        }
        if (pot < best_pot) {
          best_pot = pot;
          pick = cand;
          best_d2.swap(cand_d2);
        }
      }
      d2.swap(best_d2);
    } else {
      // every point coincides with a chosen centroid
      pick = rng.below(n);
    }
    copy_row(c, pick);
  }
  return centroids;
}

}  // namespace

KmeansResult kmeans(const PointSet& points, std::size_t k, std::uint64_t seed) {
  const std::size_t n = points.size();
  if (k < 1) throw validation_error("invalid_k", "k must be at least 1");
  if (k > n) {
    throw validation_error("invalid_k", "k (" + std::to_string(k) +
                                            ") exceeds the number of points (" +
                                            std::to_string(n) + ")");
  }
  check_finite(points);
  const std::size_t dim = points.dim();

  Rng rng(seed);
  KmeansResult res;
  res.centroids = plus_plus_seeds(points, k, rng);
  res.labels.assign(n, -1);
  std::vector<double> dist(n, 0.0);

  for (int iter = 0; iter < kKmeansMaxIterations; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<int>(nearest(res.centroids, points.row(i),
                                              &dist[i]));
      if (c != res.labels[i]) {
        res.labels[i] = c;
        changed = true;
      }
      inertia += dist[i];
    }
    res.inertia_trace.push_back(inertia);
    res.inertia = inertia;
    res.iterations = iter + 1;
    if (!changed && iter > 0) break;

    // Update step.
    PointSet sums(k, dim);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(res.labels[i]);
      ++counts[c];
      auto s = sums.row(c);
      auto p = points.row(i);
      for (std::size_t d = 0; d < dim; ++d) s[d] += p[d];
    }
    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      auto dst = res.centroids.row(c);
      if (counts[c] > 0) {
        auto s = sums.row(c);
        for (std::size_t d = 0; d < dim; ++d) {
          dst[d] = s[d] / static_cast<double>(counts[c]);
        }
        continue;
      }
      // Empty cluster: re-seed at the point farthest from its centroid.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      taken[far] = true;
      dist[far] = 0.0;
      auto src = points.row(far);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
  return res;
}

std::vector<int> dbscan(const PointSet& points, double eps,
                        std::size_t min_pts) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw validation_error("invalid_eps", "eps must be positive");
  }
  if (min_pts < 1) {
    throw validation_error("invalid_min_pts", "min_pts must be at least 1");
  }
  check_finite(points);
  const std::size_t n = points.size();
  const double eps2 = eps * eps;

  auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      if (squared_distance(points.row(i), points.row(j)) <= eps2) {
        out.push_back(j);
      }
    }
    return out;
  };

  constexpr int kUnvisited = -2;
  std::vector<int> labels(n, kUnvisited);
  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    auto seeds = neighbours(i);
    if (seeds.size() < min_pts) {
      labels[i] = kNoise;
      continue;
    }
    labels[i] = cluster;
    std::vector<std::size_t> frontier;
    for (auto j : seeds) {
      if (j != i) frontier.push_back(j);
    }
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const auto q = frontier[f];
      if (labels[q] == kNoise) labels[q] = cluster;  // border point
      if (labels[q] != kUnvisited) continue;
      labels[q] = cluster;
      auto qn = neighbours(q);
      if (qn.size() >= min_pts) {
        for (auto r : qn) {
          if (labels[r] == kUnvisited || labels[r] == kNoise) {
            frontier.push_back(r);
          }
        }
      }
    }
    ++cluster;
  }
  return labels;
}

namespace {

// Dense relabelling of non-noise clusters: cluster ids -> 0..m-1 and the
// members of each.
std::vector<std::vector<std::size_t>> members_of(std::span<const int> labels) {
  std::unordered_map<int, std::size_t> slot;
  std::vector<int> order;
  for (int l : labels) {
    if (l == kNoise) continue;
    if (slot.emplace(l, order.size()).second) order.push_back(l);
  }
  // stable ordering by cluster id keeps float sums reproducible
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t s = 0; s < sorted.size(); ++s) slot[sorted[s]] = s;
  std::vector<std::vector<std::size_t>> members(sorted.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kNoise) continue;
    members[slot[labels[i]]].push_back(i);
  }
  return members;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace

std::optional<double> silhouette(const PointSet& points,
                                 std::span<const int> labels) {
  if (labels.size() != points.size()) {
    throw validation_error("length_mismatch", "labels and points differ");
  }
  const auto members = members_of(labels);
  if (members.size() < 2) return std::nullopt;
  std::vector<int> slot_of(points.size(), -1);
  for (std::size_t c = 0; c < members.size(); ++c) {
    for (auto i : members[c]) slot_of[i] = static_cast<int>(c);
  }

  double total = 0.0;
  std::size_t counted = 0;
  std::vector<double> sums(members.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (slot_of[i] < 0) continue;
    ++counted;
    const auto own = static_cast<std::size_t>(slot_of[i]);
    if (members[own].size() == 1) continue;  // singleton contributes 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t c = 0; c < members.size(); ++c) {
      for (auto j : members[c]) sums[c] += distance(points.row(i), points.row(j));
    }
    const double a =
        sums[own] / static_cast<double>(members[own].size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < members.size(); ++c) {
      if (c == own) continue;
      b = std::min(b, sums[c] / static_cast<double>(members[c].size()));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(counted);
}

DaviesBouldin davies_bouldin(const PointSet& points,
                             std::span<const int> labels) {
  if (labels.size() != points.size()) {
    throw validation_error("length_mismatch", "labels and points differ");
  }
  DaviesBouldin out;
  const auto members = members_of(labels);
  const std::size_t m = members.size();
  if (m < 2) return out;
  const std::size_t dim = points.dim();

  PointSet centroids(m, dim);
  std::vector<double> scatter(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    auto ctr = centroids.row(c);
    for (auto i : members[c]) {
      auto p = points.row(i);
      for (std::size_t d = 0; d < dim; ++d) ctr[d] += p[d];
    }
    for (std::size_t d = 0; d < dim; ++d) {
      ctr[d] /= static_cast<double>(members[c].size());
    }
    for (auto i : members[c]) scatter[c] += distance(points.row(i), ctr);
    scatter[c] /= static_cast<double>(members[c].size());
  }

  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const double d = distance(centroids.row(i), centroids.row(j));
      if (d == 0.0) {
        out.degenerate_centroids = true;
        return out;
      }
      worst = std::max(worst, (scatter[i] + scatter[j]) / d);
    }
    total += worst;
  }
  out.value = total / static_cast<double>(m);
  return out;
}

ClusterResult cluster_points(const PointSet& points,
                             std::vector<std::string> ids,
                             const ClusterParams& params) {
  if (ids.size() != points.size()) {
    throw validation_error("length_mismatch", "ids and points differ");
  }
  if (points.empty()) {
    throw validation_error("empty_group", "group is empty");
  }
  ClusterResult res;
  res.ids = std::move(ids);
  if (params.method == ClusterMethod::Kmeans) {
    auto km = kmeans(points, params.k, params.seed);
    res.labels = std::move(km.labels);
    res.inertia = km.inertia;
  } else {
    res.labels = dbscan(points, params.eps, params.min_pts);
  }
  res.k_found = members_of(res.labels).size();
  res.silhouette = silhouette(points, res.labels);
  res.davies_bouldin = davies_bouldin(points, res.labels);
  return res;
}

ClusterResult cluster_group(const Dataset& dataset,
                            std::span<const std::string> group,
                            const Embedding* embedding,
                            const ClusterParams& params) {
  const auto indices = dataset.resolve(group);
  if (params.coordinate_source == CoordinateSource::Original) {
    const auto all = space_matrix(dataset, params.space, false);
    return cluster_points(all.subset(indices),
                          {group.begin(), group.end()}, params);
  }
  if (embedding == nullptr) {
    throw Error(ErrorKind::NotReady, "embedding_not_ready",
                "no embedding available for clustering");
  }
  if (embedding->params.space != params.space) {
    throw validation_error("space_mismatch",
                           "embedding space does not match cluster space");
  }
  std::unordered_map<std::string_view, std::size_t> pos;
  for (std::size_t i = 0; i < embedding->ids.size(); ++i) {
    pos.emplace(embedding->ids[i], i);
  }
  std::vector<std::size_t> rows;
  std::string missing;
  for (const auto& id : group) {
    auto it = pos.find(id);
    if (it == pos.end()) {
      if (!missing.empty()) missing += ',';
      missing += id;
      continue;
    }
    rows.push_back(it->second);
  }
  if (!missing.empty()) {
    throw validation_error("group_embedding_mismatch",
                           "ids not present in the embedding: " + missing,
                           missing);
  }
  return cluster_points(embedding->points.subset(rows),
                        {group.begin(), group.end()}, params);
}

}  // namespace attrscope
