#include "dataset.hpp"

#include <cmath>
#include <unordered_set>

#include "error.hpp"

namespace attrscope {

std::string_view to_string(Space s) {
  switch (s) {
    case Space::Act: return "ACT";
    case Space::Fea: return "FEA";
    case Space::Prd: return "PRD";
  }
  return "?";
}

std::string_view to_string(IndicatorSpace s) {
  return s == IndicatorSpace::Act ? "ACT" : "PRD";
}

namespace {

std::string upper(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

}  // namespace

Space parse_space(std::string_view text) {
  const auto u = upper(text);
  if (u == "ACT") return Space::Act;
  if (u == "FEA") return Space::Fea;
  if (u == "PRD") return Space::Prd;
  throw validation_error("invalid_space",
                         "unknown space '" + std::string(text) + "'");
}

IndicatorSpace parse_indicator_space(std::string_view text) {
  const auto u = upper(text);
  if (u == "ACT") return IndicatorSpace::Act;
  if (u == "PRD" || u == "PRD-DECISION") return IndicatorSpace::PrdDecision;
  throw validation_error("invalid_space",
                         "unknown indicator space '" + std::string(text) + "'");
}

AttributeCatalog::AttributeCatalog(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.empty()) {
    throw validation_error("empty_catalog", "attribute catalog is empty");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& n : names_) {
    if (n.empty()) {
      throw validation_error("empty_attribute_name",
                             "attribute names must be non-empty");
    }
    if (!seen.insert(n).second) {
      throw validation_error("duplicate_attribute",
                             "duplicate attribute name '" + n + "'", n);
    }
  }
}

std::optional<std::size_t> AttributeCatalog::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

Dataset::Dataset(std::string name, AttributeCatalog catalog,
                 std::vector<ImageRecord> records)
    : name_(std::move(name)),
      catalog_(std::move(catalog)),
      records_(std::move(records)) {
  const std::size_t a = catalog_.size();
  feature_count_ = records_.empty() ? 0 : records_.front().fea.size();
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.id.empty()) {
      throw validation_error("empty_image_id", "image id must be non-empty");
    }
    if (!index_.emplace(r.id, i).second) {
      throw validation_error("duplicate_image_id",
                             "duplicate image id '" + r.id + "'", r.id);
    }
    if (r.act.size() != a || r.prd.size() != a) {
      throw validation_error("dimension_mismatch",
                             "image '" + r.id + "' has wrong attribute count",
                             r.id);
    }
    if (r.fea.size() != feature_count_) {
      throw validation_error("dimension_mismatch",
                             "image '" + r.id + "' has wrong feature count",
                             r.id);
    }
    for (auto v : r.act) {
      if (v > 1) {
        throw validation_error("invalid_act",
                               "ACT value outside {0,1} for '" + r.id + "'",
                               r.id);
      }
    }
    for (auto v : r.prd) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw validation_error("invalid_prd",
                               "PRD value outside [0,1] for '" + r.id + "'",
                               r.id);
      }
    }
    for (auto v : r.fea) {
      if (!std::isfinite(v)) {
        throw validation_error("invalid_fea",
                               "non-finite FEA value for '" + r.id + "'", r.id);
      }
    }
  }
}

std::optional<std::size_t> Dataset::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Dataset::resolve(
    std::span<const std::string> ids) const {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto idx = find(id);
    if (!idx) {
      throw not_found_error("unknown_image", "unknown image id '" + id + "'",
                            id);
    }
    out.push_back(*idx);
  }
  return out;
}

std::vector<std::size_t> Dataset::all() const {
  std::vector<std::size_t> out(records_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

std::vector<double> Dataset::vector_of(std::size_t index, Space space) const {
  const auto& r = records_.at(index);
  switch (space) {
    case Space::Act: return {r.act.begin(), r.act.end()};
    case Space::Prd: return r.prd;
    case Space::Fea: return r.fea;
  }
  return {};
}

std::vector<std::uint8_t> decide(std::span<const double> prd, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw validation_error("invalid_threshold",
                           "decision threshold must lie in (0,1)");
  }
  std::vector<std::uint8_t> out(prd.size());
  for (std::size_t i = 0; i < prd.size(); ++i) {
    out[i] = prd[i] >= threshold ? 1 : 0;
  }
  return out;
}

std::uint8_t indicator(const ImageRecord& record, std::size_t attribute,
                       IndicatorSpace space) {
  if (space == IndicatorSpace::Act) return record.act[attribute];
  return record.prd[attribute] >= kDefaultThreshold ? 1 : 0;
}

std::vector<std::uint8_t> attribute_indicator(const Dataset& dataset,
                                              std::span<const std::size_t> group,
                                              std::size_t attribute,
                                              IndicatorSpace space) {
  if (attribute >= dataset.attribute_count()) {
    throw validation_error("attribute_out_of_range",
                           "attribute index " + std::to_string(attribute) +
                               " out of range");
  }
  std::vector<std::uint8_t> out;
  out.reserve(group.size());
  for (auto idx : group) {
    out.push_back(indicator(dataset.record(idx), attribute, space));
  }
  return out;
}

std::vector<std::uint8_t> attribute_indicator(const Dataset& dataset,
                                              std::span<const std::string> ids,
                                              std::size_t attribute,
                                              IndicatorSpace space) {
  const auto group = dataset.resolve(ids);
  return attribute_indicator(dataset, group, attribute, space);
}

}  // namespace attrscope
