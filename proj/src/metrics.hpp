#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dataset.hpp"

namespace attrscope {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// nullopt marks a score whose denominator is zero.
struct Scores {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

struct AttributeMetrics {
  std::size_t attribute = 0;
  std::size_t positives = 0;  // ACT-positive images in the group
  ConfusionCounts counts;
  Scores scores;
};

struct GroupMetricsTable {
  std::vector<AttributeMetrics> rows;
};

enum class Correctness : std::uint8_t { Incorrect = 0, Correct = 1 };

struct CorrectnessPattern {
  std::vector<std::size_t> attributes;
  std::vector<Correctness> pattern;  // parallel to `attributes`
  std::size_t count = 0;
  std::vector<std::size_t> images;   // record indices, in dataset order

  std::size_t correct_flags() const;
};

ConfusionCounts confusion(const Dataset& dataset,
                          std::span<const std::size_t> group,
                          std::size_t attribute);

Scores scores(const ConfusionCounts& counts);

/// Rows ordered by in-group ACT-positive count descending, ties by catalog
/// order.
GroupMetricsTable group_metrics_table(const Dataset& dataset,
                                      std::span<const std::size_t> group);

/// Normalized Hamming distance between ACT and the 0.5 decisions.
double error_rate(const ImageRecord& record);

/// Patterns over the universe of images carrying every attribute in
/// `selected`, sorted by number of correct flags ascending (ties broken by
/// the pattern read as a bit string, incorrect before correct).
std::vector<CorrectnessPattern> attribute_set_patterns(
    const Dataset& dataset, std::span<const std::size_t> selected);

}  // namespace attrscope
