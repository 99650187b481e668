#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace attrscope {

/// Row-major n x dim matrix of coordinates.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t rows, std::size_t dim)
      : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}
  PointSet(std::size_t rows, std::size_t dim, std::vector<double> data)
      : rows_(rows), dim_(dim), data_(std::move(data)) {}

  std::size_t size() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  double operator()(std::size_t i, std::size_t d) const {
    return data_[i * dim_ + d];
  }
  double& operator()(std::size_t i, std::size_t d) { return data_[i * dim_ + d]; }

  const std::vector<double>& data() const noexcept { return data_; }

  /// Rows picked by index, in the given order.
  PointSet subset(std::span<const std::size_t> indices) const {
    PointSet out(indices.size(), dim_);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      auto src = row(indices[k]);
      auto dst = out.row(k);
      for (std::size_t d = 0; d < dim_; ++d) dst[d] = src[d];
    }
    return out;
  }

  bool operator==(const PointSet&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

}  // namespace attrscope
