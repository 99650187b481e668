#include "attrscope/attrscope.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "clustering.hpp"
#include "codec.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "http_server.hpp"

struct attrscope_engine {
  explicit attrscope_engine(attrscope::EngineOptions options)
      : engine(std::move(options)) {}

  attrscope::Engine engine;
  std::mutex server_mutex;
  attrscope::HttpServer* server = nullptr;
};

namespace {

struct LastError {
  attrscope_status status = ATTRSCOPE_OK;
  std::string slug;
  std::string message;
};

thread_local LastError last_error;

attrscope_status set_error(attrscope_status status, std::string slug,
                           std::string message) {
  last_error = {status, std::move(slug), std::move(message)};
  return status;
}

attrscope_status status_of(attrscope::ErrorKind kind) {
  using attrscope::ErrorKind;
  switch (kind) {
    case ErrorKind::Validation: return ATTRSCOPE_ERR_VALIDATION;
    case ErrorKind::NotFound: return ATTRSCOPE_ERR_NOT_FOUND;
    case ErrorKind::NotReady: return ATTRSCOPE_ERR_NOT_READY;
    case ErrorKind::Numerical: return ATTRSCOPE_ERR_NUMERICAL;
    case ErrorKind::Io: return ATTRSCOPE_ERR_IO;
    case ErrorKind::Internal: return ATTRSCOPE_ERR_INTERNAL;
  }
  return ATTRSCOPE_ERR_INTERNAL;
}

char* dup(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename F>
attrscope_status guarded(F&& body) {
  try {
    body();
    last_error = {};
    return ATTRSCOPE_OK;
  } catch (const attrscope::Error& e) {
    return set_error(status_of(e.kind()), e.code(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(ATTRSCOPE_ERR_VALIDATION, "invalid_json", e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ATTRSCOPE_ERR_INTERNAL, "out_of_memory", "out of memory");
  } catch (const std::exception& e) {
    return set_error(ATTRSCOPE_ERR_INTERNAL, "internal", e.what());
  }
}

attrscope_status invalid_argument(const char* what) {
  return set_error(ATTRSCOPE_ERR_INVALID_ARGUMENT, "invalid_argument", what);
}

}  // namespace

extern "C" {

const char* attrscope_version(void) { return "1.0.0"; }

attrscope_status attrscope_engine_create(const char* cache_dir, uint64_t seed,
                                         attrscope_engine** out) {
  if (!out) return invalid_argument("out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    attrscope::EngineOptions opts;
    opts.seed = seed;
    if (cache_dir && *cache_dir) opts.cache_dir = cache_dir;
    *out = new attrscope_engine(std::move(opts));
  });
}

void attrscope_engine_destroy(attrscope_engine* engine) {
  if (!engine) return;
  attrscope_stop(engine);
  delete engine;
}

attrscope_status attrscope_load_manifest(attrscope_engine* engine,
                                         const char* manifest_path,
                                         char** summary_json) {
  if (!engine || !manifest_path) {
    return invalid_argument("engine and manifest_path are required");
  }
  return guarded([&] {
    const auto summary = engine->engine.load(manifest_path);
    if (summary_json) *summary_json = dup(attrscope::canonical(summary));
  });
}

attrscope_status attrscope_request(attrscope_engine* engine, const char* method,
                                   const char* target, const char* body,
                                   int* http_status, char** response_json) {
  if (!engine || !method || !target || !http_status || !response_json) {
    return invalid_argument("engine, method, target and outputs are required");
  }
  return guarded([&] {
    const auto response = engine->engine.handle(
        attrscope::make_request(method, target, body ? body : ""));
    *http_status = response.status;
    *response_json = dup(response.body);
  });
}

attrscope_status attrscope_embed(attrscope_engine* engine,
                                 const char* params_json, char** csv,
                                 char** sidecar_json) {
  if (!engine) return invalid_argument("engine must not be NULL");
  return guarded([&] {
    attrscope::EmbeddingParams defaults;
    defaults.seed = engine->engine.options().seed;
    auto j = params_json && *params_json ? attrscope::Json::parse(params_json)
                                         : attrscope::Json::object();
    const auto params = attrscope::embedding_params_from_json(j, defaults);
    auto dataset = engine->engine.dataset();
    const auto e = engine->engine.embeddings().wait(dataset, params);
    if (csv) *csv = dup(attrscope::embedding_csv(*e));
    if (sidecar_json) {
      auto side = attrscope::embedding_json(*e);
      side.erase("points");
      side["dataset"] = dataset->name();
      side["records"] = e->ids.size();
      *sidecar_json = dup(attrscope::canonical(side));
    }
  });
}

attrscope_status attrscope_cluster_csv(const char* embedding_csv,
                                       const char* group_ids,
                                       const char* params_json,
                                       char** labels_csv, char** scores_json) {
  if (!embedding_csv) return invalid_argument("embedding_csv must not be NULL");
  return guarded([&] {
    std::vector<std::string> ids;
    attrscope::PointSet points;
    attrscope::parse_embedding_csv(embedding_csv, ids, points);

    std::vector<std::size_t> rows;
    std::vector<std::string> chosen;
    if (group_ids && *group_ids) {
      std::unordered_map<std::string, std::size_t> pos;
      for (std::size_t i = 0; i < ids.size(); ++i) pos.emplace(ids[i], i);
      std::istringstream in(group_ids);
      std::string line;
      std::string missing;
      std::unordered_set<std::string> seen;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || !seen.insert(line).second) continue;
        auto it = pos.find(line);
        if (it == pos.end()) {
          if (!missing.empty()) missing += ',';
          missing += line;
          continue;
        }
        rows.push_back(it->second);
        chosen.push_back(line);
      }
      if (!missing.empty()) {
        throw attrscope::validation_error(
            "group_embedding_mismatch",
            "ids not present in the embedding: " + missing, missing);
      }
    } else {
      for (std::size_t i = 0; i < ids.size(); ++i) rows.push_back(i);
      chosen = ids;
    }
    auto j = params_json && *params_json ? attrscope::Json::parse(params_json)
                                         : attrscope::Json::object();
    const auto params = attrscope::cluster_params_from_json(j, {});
    if (params.method == attrscope::ClusterMethod::Kmeans &&
        params.k > chosen.size()) {
      throw attrscope::validation_error("invalid_k",
                                        "k exceeds the number of points");
    }
    const auto result =
        attrscope::cluster_points(points.subset(rows), chosen, params);
    if (labels_csv) *labels_csv = dup(attrscope::labels_csv(result));
    if (scores_json) {
      auto scores = attrscope::cluster_result_json(result, params);
      scores.erase("ids");
      scores.erase("labels");
      *scores_json = dup(attrscope::canonical(scores));
    }
  });
}

attrscope_status attrscope_serve(attrscope_engine* engine, const char* host,
                                 int port, volatile int* bound_port) {
  if (!engine) return invalid_argument("engine must not be NULL");
  attrscope::HttpServer server(engine->engine);
  {
    std::lock_guard lock(engine->server_mutex);
    if (engine->server) {
      return set_error(ATTRSCOPE_ERR_VALIDATION, "already_serving",
                       "engine is already serving");
    }
    engine->server = &server;
  }
  const int port_used = server.bind(host ? host : "127.0.0.1", port);
  if (port_used < 0) {
    std::lock_guard lock(engine->server_mutex);
    engine->server = nullptr;
    return set_error(ATTRSCOPE_ERR_IO, "bind_failed",
                     "cannot bind port " + std::to_string(port));
  }
  if (bound_port) *bound_port = port_used;
  const bool ok = server.serve();
  {
    std::lock_guard lock(engine->server_mutex);
    engine->server = nullptr;
  }
  if (!ok) return set_error(ATTRSCOPE_ERR_IO, "serve_failed", "server stopped");
  last_error = {};
  return ATTRSCOPE_OK;
}

attrscope_status attrscope_stop(attrscope_engine* engine) {
  if (!engine) return invalid_argument("engine must not be NULL");
  std::lock_guard lock(engine->server_mutex);
  if (engine->server) engine->server->stop();
  return ATTRSCOPE_OK;
}

attrscope_status attrscope_last_error_code(void) { return last_error.status; }

const char* attrscope_last_error_slug(void) { return last_error.slug.c_str(); }

const char* attrscope_last_error_message(void) {
  return last_error.message.c_str();
}

void attrscope_string_free(char* str) { std::free(str); }

}  // extern "C"
