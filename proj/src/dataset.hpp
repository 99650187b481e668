#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace attrscope {

inline constexpr double kDefaultThreshold = 0.5;

// The three per-image vector spaces.
enum class Space { Act, Fea, Prd };

// Binary views over an attribute: ground truth, or the thresholded prediction.
enum class IndicatorSpace { Act, PrdDecision };

std::string_view to_string(Space s);
std::string_view to_string(IndicatorSpace s);
Space parse_space(std::string_view text);
IndicatorSpace parse_indicator_space(std::string_view text);

/// Ordered, unique attribute names. Position in the catalog is the vector
/// index used by every space.
class AttributeCatalog {
 public:
  AttributeCatalog() = default;
  explicit AttributeCatalog(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;

  bool operator==(const AttributeCatalog&) const = default;

 private:
  std::vector<std::string> names_;
};

struct ImageRecord {
  std::string id;
  std::vector<std::uint8_t> act;  // 0/1 per attribute
  std::vector<double> prd;        // probability per attribute
  std::vector<double> fea;        // deep-feature activations
  std::optional<std::string> thumbnail;

  bool operator==(const ImageRecord&) const = default;
};

/// Immutable catalog + records. The constructor validates every invariant
/// (dimensions, value domains, unique ids); nothing mutates it afterwards.
class Dataset {
 public:
  Dataset(std::string name, AttributeCatalog catalog,
          std::vector<ImageRecord> records);

  const std::string& name() const noexcept { return name_; }
  const AttributeCatalog& catalog() const noexcept { return catalog_; }
  std::span<const ImageRecord> records() const noexcept { return records_; }
  const ImageRecord& record(std::size_t index) const {
    return records_.at(index);
  }
  std::size_t size() const noexcept { return records_.size(); }
  std::size_t attribute_count() const noexcept { return catalog_.size(); }
  std::size_t feature_count() const noexcept { return feature_count_; }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Maps ids to record indices, throwing a not-found error naming the first
  /// unknown id.
  std::vector<std::size_t> resolve(std::span<const std::string> ids) const;
  /// Every record index, in load order.
  std::vector<std::size_t> all() const;

  /// Vector of the given space for one record, widened to double.
  std::vector<double> vector_of(std::size_t index, Space space) const;

  bool operator==(const Dataset& other) const {
    return name_ == other.name_ && catalog_ == other.catalog_ &&
           records_ == other.records_;
  }

 private:
  std::string name_;
  AttributeCatalog catalog_;
  std::vector<ImageRecord> records_;
  std::size_t feature_count_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Element i is 1 iff prd[i] >= threshold.
std::vector<std::uint8_t> decide(std::span<const double> prd,
                                 double threshold = kDefaultThreshold);

std::uint8_t indicator(const ImageRecord& record, std::size_t attribute,
                       IndicatorSpace space);

/// One indicator per group member, in group order.
std::vector<std::uint8_t> attribute_indicator(const Dataset& dataset,
                                              std::span<const std::size_t> group,
                                              std::size_t attribute,
                                              IndicatorSpace space);
std::vector<std::uint8_t> attribute_indicator(const Dataset& dataset,
                                              std::span<const std::string> ids,
                                              std::size_t attribute,
                                              IndicatorSpace space);

}  // namespace attrscope
