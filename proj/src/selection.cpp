#include "selection.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "metrics.hpp"

namespace attrscope {

LassoPolygon::LassoPolygon(std::vector<Point2> vertices)
    : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw validation_error("invalid_polygon",
                           "lasso polygon needs at least 3 vertices");
  }
  for (const auto& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw validation_error("invalid_polygon",
                             "lasso polygon has non-finite vertices");
    }
  }
}

namespace {

bool on_segment(Point2 p, Point2 a, Point2 b) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  if (cross != 0.0) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
         p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool LassoPolygon::contains(Point2 p) const {
  const std::size_t n = vertices_.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto a = vertices_[i];
    const auto b = vertices_[j];
    if (on_segment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::vector<std::string> select_in_polygon(const Embedding& embedding,
                                           const LassoPolygon& polygon) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < embedding.ids.size(); ++i) {
    if (polygon.contains({embedding.points(i, 0), embedding.points(i, 1)})) {
      out.push_back(embedding.ids[i]);
    }
  }
  return out;
}

std::string_view to_string(FlowerState s) {
  switch (s) {
    case FlowerState::TP: return "TP";
    case FlowerState::TN: return "TN";
    case FlowerState::FP: return "FP";
    case FlowerState::FN: return "FN";
  }
  return "?";
}

FlowerState flower_state(std::uint8_t act, std::uint8_t decision) {
  if (act > 1 || decision > 1) {
    throw validation_error("invalid_bit", "flower state bits must be 0 or 1");
  }
  if (act) return decision ? FlowerState::TP : FlowerState::FN;
  return decision ? FlowerState::FP : FlowerState::TN;
}

ImageDetail image_detail(const Dataset& dataset, std::size_t index) {
  const auto& r = dataset.record(index);
  ImageDetail d;
  d.id = r.id;
  d.act = r.act;
  d.prd = r.prd;
  d.decisions = decide(r.prd);
  d.flower.reserve(r.act.size());
  for (std::size_t a = 0; a < r.act.size(); ++a) {
    d.flower.push_back(flower_state(r.act[a], d.decisions[a]));
  }
  d.error_rate = error_rate(r);
  d.thumbnail = r.thumbnail;
  return d;
}

std::map<std::size_t, std::vector<std::string>> gallery_buckets(
    const Dataset& dataset, std::span<const std::size_t> group,
    IndicatorSpace space) {
  std::map<std::size_t, std::vector<std::string>> buckets;
  for (auto idx : group) {
    const auto& r = dataset.record(idx);
    std::size_t count = 0;
    for (std::size_t a = 0; a < dataset.attribute_count(); ++a) {
      count += indicator(r, a, space);
    }
    buckets[count].push_back(r.id);
  }
  return buckets;
}

}  // namespace attrscope
