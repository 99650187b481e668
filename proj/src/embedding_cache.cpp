#include "embedding_cache.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "codec.hpp"
#include "error.hpp"

namespace attrscope {

namespace fs = std::filesystem;

std::string_view to_string(EmbeddingStatus s) {
  switch (s) {
    case EmbeddingStatus::Absent: return "absent";
    case EmbeddingStatus::Computing: return "computing";
    case EmbeddingStatus::Ready: return "ready";
    case EmbeddingStatus::Failed: return "failed";
  }
  return "?";
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string dataset_fingerprint(const Dataset& dataset) {
  std::string blob = dataset.name();
  char buf[32];
  for (const auto& r : dataset.records()) {
    blob += '\n';
    blob += r.id;
    for (auto v : r.act) blob += v ? '1' : '0';
    for (auto v : r.prd) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
      blob.append(buf, p);
      blob += ';';
    }
    for (auto v : r.fea) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
      blob.append(buf, p);
      blob += ';';
    }
  }
  return fnv1a_hex(blob);
}

EmbeddingCache::EmbeddingCache(std::optional<fs::path> dir)
    : dir_(std::move(dir)) {}

EmbeddingCache::~EmbeddingCache() {
  std::lock_guard lock(mutex_);
  for (auto& [_, f] : entries_) {
    if (f.valid()) f.wait();
  }
}

void EmbeddingCache::reset(std::string fingerprint) {
  std::map<std::string, std::shared_future<Ptr>> old;
  {
    std::lock_guard lock(mutex_);
    old.swap(entries_);
    fingerprint_ = std::move(fingerprint);
  }
  for (auto& [_, f] : old) {
    if (f.valid()) f.wait();
  }
}

std::optional<fs::path> EmbeddingCache::disk_path(
    const EmbeddingParams& params) const {
  if (!dir_) return std::nullopt;
  return *dir_ / "embeddings" /
         (fnv1a_hex(fingerprint_ + "#" + params.cache_key()) + ".json");
}

std::shared_future<EmbeddingCache::Ptr> EmbeddingCache::start(
    std::shared_ptr<const Dataset> dataset, const EmbeddingParams& params) {
  // requires mutex_ held
  const auto key = params.cache_key();
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second;

  auto path = disk_path(params);
  auto task = [this, dataset = std::move(dataset), params, path]() -> Ptr {
    if (path && fs::exists(*path)) {
      std::ifstream in(*path);
      std::stringstream ss;
      ss << in.rdbuf();
      auto j = Json::parse(ss.str(), nullptr, false);
      if (!j.is_discarded()) {
        return std::make_shared<const Embedding>(embedding_from_json(j));
      }
    }
    ++computations_;
    auto e = std::make_shared<const Embedding>(project(*dataset, params));
    if (path) {
      fs::create_directories(path->parent_path());
      const auto tmp = fs::path(path->string() + ".tmp");
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << canonical(embedding_json(*e)) << "\n";
      }
      fs::rename(tmp, *path);
    }
    return e;
  };
  auto fut = std::async(std::launch::async, std::move(task)).share();
  entries_.emplace(key, fut);
  return fut;
}

EmbeddingStatus EmbeddingCache::request(std::shared_ptr<const Dataset> dataset,
                                        const EmbeddingParams& params) {
  std::shared_future<Ptr> fut;
  {
    std::lock_guard lock(mutex_);
    fut = start(std::move(dataset), params);
  }
  if (fut.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
    return EmbeddingStatus::Computing;
  }
  try {
    fut.get();
    return EmbeddingStatus::Ready;
  } catch (...) {
    return EmbeddingStatus::Failed;
  }
}

EmbeddingCache::Ptr EmbeddingCache::wait(std::shared_ptr<const Dataset> dataset,
                                         const EmbeddingParams& params) {
  std::shared_future<Ptr> fut;
  {
    std::lock_guard lock(mutex_);
    fut = start(std::move(dataset), params);
  }
  try {
    return fut.get();
  } catch (...) {
    // Forget the failure so a later request can retry.
    std::lock_guard lock(mutex_);
    auto it = entries_.find(params.cache_key());
    if (it != entries_.end() && it->second.wait_for(std::chrono::seconds(0)) ==
                                    std::future_status::ready) {
      entries_.erase(it);
    }
    throw;
  }
}

EmbeddingStatus EmbeddingCache::status(const EmbeddingParams& params) const {
  std::shared_future<Ptr> fut;
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(params.cache_key());
    if (it == entries_.end()) return EmbeddingStatus::Absent;
    fut = it->second;
  }
  if (fut.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
    return EmbeddingStatus::Computing;
  }
  try {
    fut.get();
    return EmbeddingStatus::Ready;
  } catch (...) {
    return EmbeddingStatus::Failed;
  }
}

EmbeddingCache::Ptr EmbeddingCache::find(const EmbeddingParams& params) const {
  std::shared_future<Ptr> fut;
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(params.cache_key());
    if (it == entries_.end()) return nullptr;
    fut = it->second;
  }
  if (fut.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
    return nullptr;
  }
  return fut.get();
}

}  // namespace attrscope
