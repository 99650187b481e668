#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace oracle {

using attrscope::JointCounts;
using attrscope::PointSet;

InfoTheory information(const JointCounts& c) {
  std::vector<int> xs, ys;
  auto add = [&](std::size_t count, int x, int y) {
    for (std::size_t i = 0; i < count; ++i) {
      xs.push_back(x);
      ys.push_back(y);
    }
  };
  add(c.n11, 1, 1);
  add(c.n10, 1, 0);
  add(c.n01, 0, 1);
  add(c.n00, 0, 0);
  const double n = static_cast<double>(xs.size());

  double pxy[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < xs.size(); ++i) pxy[xs[i]][ys[i]] += 1.0 / n;
  double px[2], py[2];
  for (int v = 0; v < 2; ++v) {
    px[v] = pxy[v][0] + pxy[v][1];
    py[v] = pxy[0][v] + pxy[1][v];
  }

  InfoTheory out;
  for (int v = 0; v < 2; ++v) {
    if (px[v] > 0) out.hx -= px[v] * std::log2(px[v]);
    if (py[v] > 0) out.hy -= py[v] * std::log2(py[v]);
  }
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      if (pxy[x][y] <= 0) continue;
      out.mi += pxy[x][y] * std::log2(pxy[x][y] / (px[x] * py[y]));
      out.hx_given_y -= pxy[x][y] * std::log2(pxy[x][y] / py[y]);
    }
  }

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx > 0 && syy > 0) out.pearson = sxy / std::sqrt(sxx * syy);
  return out;
}

std::vector<double> jacobi_eigen(std::vector<double> a, std::size_t n,
                                 std::vector<double>* vectors) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += A(i, i) * A(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
    }
    if (off <= 1e-30 * diag || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (A(p, q) == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return A(x, x) > A(y, y); });
  std::vector<double> values;
  for (auto i : order) values.push_back(A(i, i));
  if (vectors) {
    vectors->assign(n * n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t r = 0; r < n; ++r) {
        (*vectors)[r * n + c] = v[r * n + order[c]];
      }
    }
  }
  return values;
}

namespace {

std::vector<double> centred(const PointSet& data) {
  const std::size_t n = data.size(), d = data.dim();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += data(i, j);
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  std::vector<double> x(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[i * d + j] = data(i, j) - mean[j];
  }
  return x;
}

}  // namespace

std::vector<double> covariance(const PointSet& data) {
  const std::size_t n = data.size(), d = data.dim();
  const auto x = centred(data);
  std::vector<double> c(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        c[a * d + b] += x[i * d + a] * x[i * d + b];
      }
    }
  }
  for (auto& v : c) v /= static_cast<double>(n - 1);
  return c;
}

std::vector<double> top_variances(const PointSet& data) {
  const std::size_t n = data.size(), d = data.dim();
  std::vector<double> values;
  if (d <= n) {
    values = jacobi_eigen(covariance(data), d);
  } else {
    // X X^T / (n-1) shares its nonzero spectrum with X^T X / (n-1).
    const auto x = centred(data);
    std::vector<double> g(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += x[i * d + k] * x[j * d + k];
        g[i * n + j] = s / static_cast<double>(n - 1);
      }
    }
    values = jacobi_eigen(std::move(g), n);
  }
  values.resize(2);
  return values;
}

double inertia(const PointSet& points, const std::vector<int>& labels) {
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  double total = 0.0;
  for (const auto& [label, idx] : members) {
    std::vector<double> c(points.dim(), 0.0);
    for (auto i : idx) {
      for (std::size_t d = 0; d < points.dim(); ++d) c[d] += points(i, d);
    }
    for (auto& v : c) v /= static_cast<double>(idx.size());
    for (auto i : idx) {
      for (std::size_t d = 0; d < points.dim(); ++d) {
        total += (points(i, d) - c[d]) * (points(i, d) - c[d]);
      }
    }
  }
  return total;
}

double exhaustive_kmeans_optimum(const PointSet& points, std::size_t k) {
  const std::size_t n = points.size();
  std::vector<int> labels(n, 0);
  double best = std::numeric_limits<double>::infinity();
  // Restricted growth strings enumerate each partition once.
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int used) {
    if (i == n) {
      if (used == static_cast<int>(k)) best = std::min(best, inertia(points, labels));
      return;
    }
    if (static_cast<int>(n - i) < static_cast<int>(k) - used) return;
    for (int c = 0; c <= used && c < static_cast<int>(k); ++c) {
      labels[i] = c;
      rec(i + 1, std::max(used, c + 1));
    }
  };
  rec(0, 0);
  return best;
}

std::vector<int> dbscan(const PointSet& points, double eps,
                        std::size_t min_pts) {
  const std::size_t n = points.size();
  auto close = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t d = 0; d < points.dim(); ++d) {
      s += (points(i, d) - points(j, d)) * (points(i, d) - points(j, d));
    }
    return std::sqrt(s) <= eps;
  };
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) count += close(i, j);
    core[i] = count >= min_pts;
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = root(parent[i]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (core[i] && core[j] && close(i, j)) {
        const auto a = root(i), b = root(j);
        parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  // Roots are the lowest index of their component after the min-union.
  std::map<std::size_t, int> id_of_root;
  std::vector<int> labels(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const auto r = root(i);
    auto it = id_of_root.find(r);
    if (it == id_of_root.end()) {
      it = id_of_root.emplace(r, static_cast<int>(id_of_root.size())).first;
    }
    labels[i] = it->second;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    int best = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && close(i, j) && (best < 0 || labels[j] < best)) best = labels[j];
    }
    labels[i] = best;
  }
  return labels;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    auto [it1, new1] = ab.emplace(a[i], b[i]);
    auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

namespace {

double dist(const PointSet& p, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t d = 0; d < p.dim(); ++d) {
    s += (p(i, d) - p(j, d)) * (p(i, d) - p(j, d));
  }
  return std::sqrt(s);
}

}  // namespace

std::optional<double> silhouette(const PointSet& points,
                                 const std::vector<int>& labels) {
  std::set<int> clusters;
  for (int l : labels) {
    if (l >= 0) clusters.insert(l);
  }
  if (clusters.size() < 2) return std::nullopt;
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    ++counted;
    std::map<int, std::pair<double, std::size_t>> acc;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (j == i || labels[j] < 0) continue;
      acc[labels[j]].first += dist(points, i, j);
      acc[labels[j]].second += 1;
    }
    if (!acc.count(labels[i])) continue;  // alone in its cluster: s = 0
    const double a = acc[labels[i]].first / acc[labels[i]].second;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [l, sum] : acc) {
      if (l != labels[i]) b = std::min(b, sum.first / sum.second);
    }
    const double m = std::max(a, b);
    total += m > 0 ? (b - a) / m : 0.0;
  }
  return total / counted;
}

std::optional<double> davies_bouldin(const PointSet& points,
                                     const std::vector<int>& labels) {
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) members[labels[i]].push_back(i);
  }
  if (members.size() < 2) return std::nullopt;
  std::vector<std::vector<double>> centroid;
  std::vector<double> scatter;
  for (const auto& [l, idx] : members) {
    std::vector<double> c(points.dim(), 0.0);
    for (auto i : idx) {
      for (std::size_t d = 0; d < points.dim(); ++d) c[d] += points(i, d);
    }
    for (auto& v : c) v /= idx.size();
    double s = 0.0;
    for (auto i : idx) {
      double q = 0.0;
      for (std::size_t d = 0; d < points.dim(); ++d) {
        q += (points(i, d) - c[d]) * (points(i, d) - c[d]);
      }
      s += std::sqrt(q);
    }
    centroid.push_back(c);
    scatter.push_back(s / idx.size());
  }
  double total = 0.0;
  for (std::size_t i = 0; i < centroid.size(); ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < centroid.size(); ++j) {
      if (i == j) continue;
      double q = 0.0;
      for (std::size_t d = 0; d < points.dim(); ++d) {
        q += (centroid[i][d] - centroid[j][d]) * (centroid[i][d] - centroid[j][d]);
      }
      worst = std::max(worst, (scatter[i] + scatter[j]) / std::sqrt(q));
    }
    total += worst;
  }
  return total / centroid.size();
}

bool inside_polygon(const std::vector<std::pair<double, double>>& poly,
                    double x, double y) {
  const std::size_t n = poly.size();
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x1, y1] = poly[i];
    const auto [x2, y2] = poly[(i + 1) % n];
    const double cross = (x2 - x1) * (y - y1) - (x - x1) * (y2 - y1);
    if (cross == 0.0 && std::min(x1, x2) <= x && x <= std::max(x1, x2) &&
        std::min(y1, y2) <= y && y <= std::max(y1, y2)) {
      return true;
    }
    if (y1 <= y) {
      if (y2 > y && cross > 0) ++winding;
    } else if (y2 <= y && cross < 0) {
      --winding;
    }
  }
  return winding != 0;
}

}  // namespace oracle
