#pragma once

#include <atomic>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "dataset.hpp"
#include "embedding.hpp"

namespace attrscope {

enum class EmbeddingStatus { Absent, Computing, Ready, Failed };

std::string_view to_string(EmbeddingStatus s);

/// Embeddings keyed by their full parameter tuple. Concurrent requests for the
/// same key share one computation. With a cache directory, finished
/// embeddings are also written to and read back from disk.
class EmbeddingCache {
 public:
  using Ptr = std::shared_ptr<const Embedding>;

  explicit EmbeddingCache(std::optional<std::filesystem::path> dir = {});
  ~EmbeddingCache();

  EmbeddingCache(const EmbeddingCache&) = delete;
  EmbeddingCache& operator=(const EmbeddingCache&) = delete;

  /// Starts the computation if nobody has yet and returns the current state.
  EmbeddingStatus request(std::shared_ptr<const Dataset> dataset,
                          const EmbeddingParams& params);

  /// Blocks until the embedding is available, computing it if needed.
  /// Rethrows the computation's error.
  Ptr wait(std::shared_ptr<const Dataset> dataset,
           const EmbeddingParams& params);

  EmbeddingStatus status(const EmbeddingParams& params) const;

  /// Ready embedding or nullptr. Rethrows a failed computation's error.
  Ptr find(const EmbeddingParams& params) const;

  /// Number of projections actually computed (cache and disk hits excluded).
  std::size_t computations() const noexcept { return computations_.load(); }

  /// Drops every entry (used when a new dataset is loaded).
  void reset(std::string dataset_fingerprint);

 private:
  std::shared_future<Ptr> start(std::shared_ptr<const Dataset> dataset,
                                const EmbeddingParams& params);
  std::optional<std::filesystem::path> disk_path(
      const EmbeddingParams& params) const;

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_future<Ptr>> entries_;
  std::optional<std::filesystem::path> dir_;
  std::string fingerprint_;
  std::atomic<std::size_t> computations_{0};
};

/// Stable 64-bit FNV-1a hash rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// Identifies a dataset's content for cache keys.
std::string dataset_fingerprint(const Dataset& dataset);

}  // namespace attrscope
