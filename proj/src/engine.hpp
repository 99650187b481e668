#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "dataset.hpp"
#include "embedding_cache.hpp"
#include "group_store.hpp"
#include "ingest.hpp"
#include "json.hpp"

namespace attrscope {

struct EngineOptions {
  std::uint64_t seed = 0;  // default seed for requests that omit one
  std::optional<std::filesystem::path> cache_dir;
};

struct Request {
  std::string method;  // GET, POST, DELETE
  std::string path;    // e.g. /api/groups/g1/metrics
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Splits "path?a=1&b=2" into path and decoded query parameters.
Request make_request(std::string method, const std::string& target,
                     std::string body = {});

/// Owns the loaded dataset, the group store and the embedding cache, and
/// answers API requests. Each endpoint is a thin adapter over the analytics
/// modules; the HTTP server and the CLI both go through handle().
class Engine {
 public:
  explicit Engine(EngineOptions options = {});

  const EngineOptions& options() const noexcept { return options_; }

  /// Loads a manifest and makes it the active dataset. Returns the summary.
  nlohmann::json load(const std::filesystem::path& manifest);
  /// Installs an in-memory dataset (tests, tools).
  nlohmann::json install(Dataset dataset,
                         std::optional<DatasetManifest> manifest = {});

  std::shared_ptr<const Dataset> dataset() const;
  GroupStore& groups() { return *groups_; }
  EmbeddingCache& embeddings() { return *embeddings_; }

  /// Never throws: every failure is mapped to an error response.
  Response handle(const Request& request);

 private:
  Response dispatch(const Request& request);

  Response load_endpoint(const Request& r);
  Response embedding_endpoint(const Request& r, bool status_only);
  Response image_endpoint(const Request& r, const std::string& id,
                          const std::string& what);
  Response create_group(const Request& r);
  Response group_endpoint(const Request& r, const std::string& id,
                          const std::string& what);
  Response cluster_endpoint(const Request& r, const std::string& id);
  Response matrix_endpoint(const Request& r);
  Response table_endpoint(const Request& r);
  Response attribute_set_endpoint(const Request& r);

  std::vector<std::size_t> resolve_group(const Dataset& d,
                                         const std::string& group_id) const;
  EmbeddingParams embedding_params(const std::map<std::string, std::string>& q,
                                   Space default_space) const;

  EngineOptions options_;
  mutable std::mutex mutex_;
  std::shared_ptr<const Dataset> dataset_;
  std::optional<DatasetManifest> manifest_;
  std::unique_ptr<GroupStore> groups_;
  std::unique_ptr<EmbeddingCache> embeddings_;
};

}  // namespace attrscope
