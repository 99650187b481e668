#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace attrscope {

struct Group {
  std::string id;
  std::string name;
  std::string color;  // "#rrggbb"
  std::vector<std::string> image_ids;

  bool operator==(const Group&) const = default;
};

nlohmann::json group_json(const Group& g);

/// Server-side groups. When a snapshot path is set every mutation rewrites
/// it, and construction reloads it.
class GroupStore {
 public:
  explicit GroupStore(std::optional<std::filesystem::path> snapshot = {});

  /// Ids are deduplicated keeping first occurrence; callers validate that
  /// they exist in the dataset.
  Group create(std::string name, std::string color,
               std::vector<std::string> image_ids);
  std::optional<Group> get(const std::string& id) const;
  std::vector<Group> list() const;
  bool erase(const std::string& id);
  void clear();

 private:
  void persist() const;  // requires mutex_ held

  mutable std::mutex mutex_;
  std::vector<Group> groups_;
  std::size_t next_id_ = 1;
  std::optional<std::filesystem::path> snapshot_;
};

}  // namespace attrscope
