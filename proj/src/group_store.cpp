#include "group_store.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "error.hpp"

namespace attrscope {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#2ca02c", "#d62728", "#9467bd",
    "#ff7f0e", "#17becf", "#e377c2", "#8c564b"};

bool is_hex_color(const std::string& c) {
  if (c.size() != 7 || c[0] != '#') return false;
  return std::all_of(c.begin() + 1, c.end(), [](char ch) {
    return (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f') ||
           (ch >= 'A' && ch <= 'F');
  });
}

}  // namespace

nlohmann::json group_json(const Group& g) {
  return {{"id", g.id},
          {"name", g.name},
          {"color", g.color},
          {"image_ids", g.image_ids}};
}

GroupStore::GroupStore(std::optional<fs::path> snapshot)
    : snapshot_(std::move(snapshot)) {
  if (!snapshot_ || !fs::exists(*snapshot_)) return;
  std::ifstream in(*snapshot_);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto j = nlohmann::json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return;
  next_id_ = j.value("next_id", std::size_t{1});
  for (const auto& g : j.value("groups", nlohmann::json::array())) {
    groups_.push_back({g.at("id").get<std::string>(),
                       g.at("name").get<std::string>(),
                       g.at("color").get<std::string>(),
                       g.at("image_ids").get<std::vector<std::string>>()});
  }
}

Group GroupStore::create(std::string name, std::string color,
                         std::vector<std::string> image_ids) {
  std::vector<std::string> unique;
  std::unordered_set<std::string> seen;
  for (auto& id : image_ids) {
    if (seen.insert(id).second) unique.push_back(std::move(id));
  }
  if (unique.empty()) {
    throw validation_error("empty_selection", "a group needs at least one image");
  }
  std::lock_guard lock(mutex_);
  if (color.empty()) {
    color = kPalette[(next_id_ - 1) % kPalette.size()];
  } else if (!is_hex_color(color)) {
    throw validation_error("invalid_color",
                           "color must be a hex string like #1f77b4", color);
  }
  Group g{"g" + std::to_string(next_id_++), std::move(name), std::move(color),
          std::move(unique)};
  if (g.name.empty()) g.name = g.id;
  groups_.push_back(g);
  persist();
  return g;
}

std::optional<Group> GroupStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  for (const auto& g : groups_) {
    if (g.id == id) return g;
  }
  return std::nullopt;
}

std::vector<Group> GroupStore::list() const {
  std::lock_guard lock(mutex_);
  return groups_;
}

bool GroupStore::erase(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = std::find_if(groups_.begin(), groups_.end(),
                         [&](const Group& g) { return g.id == id; });
  if (it == groups_.end()) return false;
  groups_.erase(it);
  persist();
  return true;
}

void GroupStore::clear() {
  std::lock_guard lock(mutex_);
  groups_.clear();
  next_id_ = 1;
  persist();
}

void GroupStore::persist() const {
  if (!snapshot_) return;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& g : groups_) arr.push_back(group_json(g));
  const nlohmann::json j = {{"next_id", next_id_}, {"groups", arr}};
  fs::create_directories(snapshot_->parent_path());
  const auto tmp = fs::path(snapshot_->string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::Io, "write_failed",
                  "cannot write group snapshot '" + tmp.string() + "'");
    }
    out << j.dump() << "\n";
  }
  fs::rename(tmp, *snapshot_);
}

}  // namespace attrscope
