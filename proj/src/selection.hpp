#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "embedding.hpp"

namespace attrscope {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Closed polygon given by at least three vertices.
class LassoPolygon {
 public:
  explicit LassoPolygon(std::vector<Point2> vertices);
  std::span<const Point2> vertices() const noexcept { return vertices_; }

  /// Even-odd rule; points on an edge or vertex count as inside.
  bool contains(Point2 p) const;

 private:
  std::vector<Point2> vertices_;
};

/// Ids of embedding points inside the polygon, in embedding order.
std::vector<std::string> select_in_polygon(const Embedding& embedding,
                                           const LassoPolygon& polygon);

enum class FlowerState { TP, TN, FP, FN };

std::string_view to_string(FlowerState s);

/// (1,1) TP solid petal; (1,0) FN blank petal; (0,0) TN missing petal;
/// (0,1) FP solid petal with a black border.
FlowerState flower_state(std::uint8_t act, std::uint8_t decision);

struct ImageDetail {
  std::string id;
  std::vector<std::uint8_t> act;
  std::vector<double> prd;
  std::vector<std::uint8_t> decisions;
  std::vector<FlowerState> flower;
  double error_rate = 0.0;
  std::optional<std::string> thumbnail;
};

ImageDetail image_detail(const Dataset& dataset, std::size_t index);

/// Group ids bucketed by positive-attribute count in the chosen space;
/// buckets ascending, members in group order.
std::map<std::size_t, std::vector<std::string>> gallery_buckets(
    const Dataset& dataset, std::span<const std::size_t> group,
    IndicatorSpace space);

}  // namespace attrscope
