#include "metrics.hpp"

#include <algorithm>
#include <map>

#include "error.hpp"

namespace attrscope {

namespace {

void check_attribute(const Dataset& dataset, std::size_t attribute) {
  if (attribute >= dataset.attribute_count()) {
    throw validation_error("attribute_out_of_range",
                           "attribute index " + std::to_string(attribute) +
                               " out of range");
  }
}

}  // namespace

std::size_t CorrectnessPattern::correct_flags() const {
  return static_cast<std::size_t>(
      std::count(pattern.begin(), pattern.end(), Correctness::Correct));
}

ConfusionCounts confusion(const Dataset& dataset,
                          std::span<const std::size_t> group,
                          std::size_t attribute) {
  if (group.empty()) {
    throw validation_error("empty_group", "group is empty");
  }
  check_attribute(dataset, attribute);
  ConfusionCounts c;
  for (auto idx : group) {
    const auto& r = dataset.record(idx);
    const bool actual = indicator(r, attribute, IndicatorSpace::Act) != 0;
    const bool predicted =
        indicator(r, attribute, IndicatorSpace::PrdDecision) != 0;
    if (actual && predicted) ++c.tp;
    else if (!actual && !predicted) ++c.tn;
    else if (!actual && predicted) ++c.fp;
    else ++c.fn;
  }
  return c;
}

Scores scores(const ConfusionCounts& c) {
  Scores s;
  const auto total = c.total();
  if (total > 0) {
    s.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
  }
  if (c.tp + c.fp > 0) {
    s.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn > 0) {
    s.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (s.precision && s.recall && *s.precision + *s.recall > 0.0) {
    s.f1 = 2.0 * *s.precision * *s.recall / (*s.precision + *s.recall);
  }
  return s;
}

GroupMetricsTable group_metrics_table(const Dataset& dataset,
                                      std::span<const std::size_t> group) {
  if (group.empty()) {
    throw validation_error("empty_group", "group is empty");
  }
  GroupMetricsTable table;
  table.rows.reserve(dataset.attribute_count());
  for (std::size_t a = 0; a < dataset.attribute_count(); ++a) {
    AttributeMetrics m;
    m.attribute = a;
    m.counts = confusion(dataset, group, a);
    m.positives = m.counts.tp + m.counts.fn;
    m.scores = scores(m.counts);
    table.rows.push_back(m);
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const AttributeMetrics& l, const AttributeMetrics& r) {
                     return l.positives > r.positives;
                   });
  return table;
}

double error_rate(const ImageRecord& record) {
  if (record.act.empty()) return 0.0;
  const auto decisions = decide(record.prd);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < record.act.size(); ++i) {
    if (record.act[i] != decisions[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(record.act.size());
}

std::vector<CorrectnessPattern> attribute_set_patterns(
    const Dataset& dataset, std::span<const std::size_t> selected) {
  if (selected.empty()) {
    throw validation_error("empty_selection",
                           "attribute selection must not be empty");
  }
  if (selected.size() > dataset.attribute_count()) {
    throw validation_error("invalid_selection",
                           "more attributes selected than exist");
  }
  for (std::size_t i = 0; i < selected.size(); ++i) {
    check_attribute(dataset, selected[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (selected[i] == selected[j]) {
        throw validation_error("invalid_selection",
                               "attribute selected twice");
      }
    }
  }

  std::map<std::vector<Correctness>, CorrectnessPattern> by_pattern;
  for (std::size_t idx = 0; idx < dataset.size(); ++idx) {
    const auto& r = dataset.record(idx);
    bool in_universe = true;
    for (auto a : selected) {
      if (r.act[a] != 1) {
        in_universe = false;
        break;
      }
    }
    if (!in_universe) continue;
    std::vector<Correctness> pattern;
    pattern.reserve(selected.size());
    for (auto a : selected) {
      const auto decision = indicator(r, a, IndicatorSpace::PrdDecision);
      pattern.push_back(decision == r.act[a] ? Correctness::Correct
                                             : Correctness::Incorrect);
    }
    auto& entry = by_pattern[pattern];
    if (entry.count == 0) {
      entry.attributes.assign(selected.begin(), selected.end());
      entry.pattern = pattern;
    }
    ++entry.count;
    entry.images.push_back(idx);
  }

  std::vector<CorrectnessPattern> out;
  out.reserve(by_pattern.size());
  for (auto& [_, p] : by_pattern) out.push_back(std::move(p));
  // std::map already ordered lexicographically (incorrect < correct).
  std::stable_sort(out.begin(), out.end(),
                   [](const CorrectnessPattern& l, const CorrectnessPattern& r) {
                     return l.correct_flags() < r.correct_flags();
                   });
  return out;
}

}  // namespace attrscope
