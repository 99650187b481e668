// attrscope command-line front end. Everything goes through the C API; the
// headless subcommands issue the same requests the HTTP server answers, so
// their JSON output is byte-identical to the API responses.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "attrscope/attrscope.h"
#include "json.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

struct Owned {
  char* ptr = nullptr;
  ~Owned() { attrscope_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

int fail() {
  std::cerr << "error [" << attrscope_last_error_slug()
            << "]: " << attrscope_last_error_message() << "\n";
  return 1;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

class Session {
 public:
  Session(const std::string& cache_dir, std::uint64_t seed) {
    if (attrscope_engine_create(cache_dir.empty() ? nullptr : cache_dir.c_str(),
                                seed, &engine_) != ATTRSCOPE_OK) {
      throw std::runtime_error(attrscope_last_error_message());
    }
  }
  ~Session() { attrscope_engine_destroy(engine_); }
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  attrscope_engine* get() const { return engine_; }

  bool load(const std::string& manifest) {
    return attrscope_load_manifest(engine_, manifest.c_str(), nullptr) ==
           ATTRSCOPE_OK;
  }

  // Returns the HTTP status; the body goes to `out`.
  int request(const std::string& method, const std::string& target,
              const std::string& body, std::string& out) {
    int status = 0;
    Owned resp;
    if (attrscope_request(engine_, method.c_str(), target.c_str(),
                          body.empty() ? nullptr : body.c_str(), &status,
                          &resp.ptr) != ATTRSCOPE_OK) {
      throw std::runtime_error(attrscope_last_error_message());
    }
    out = resp.str();
    return status;
  }

  // Creates a group from an id-list file and returns its id, or "all".
  std::string group_from_file(const std::string& path) {
    if (path.empty()) return "all";
    std::istringstream in(read_text(path));
    nlohmann::json ids = nlohmann::json::array();
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) ids.push_back(line);
    }
    std::string out;
    const nlohmann::json body = {{"name", path}, {"image_ids", ids}};
    if (request("POST", "/api/groups", body.dump(), out) != 201) {
      throw std::runtime_error(out);
    }
    return nlohmann::json::parse(out).at("id").get<std::string>();
  }

 private:
  attrscope_engine* engine_ = nullptr;
};

int emit(int status, const std::string& body) {
  std::cout << body << "\n";
  if (status >= 400) {
    std::cerr << "request failed with status " << status << "\n";
    return 1;
  }
  return 0;
}

std::string encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == ',') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attrscope: multi-attribute classifier diagnostics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", attrscope_version());

  std::string manifest;
  std::string cache_dir = env_or("ATTRSCOPE_CACHE_DIR", "");
  std::uint64_t seed = 0;

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the HTTP JSON API");
  int port = std::atoi(env_or("ATTRSCOPE_PORT", "8080").c_str());
  std::string host = "127.0.0.1";
  serve->add_option("--manifest", manifest, "Dataset manifest.json to preload");
  serve->add_option("--port", port, "Port (env ATTRSCOPE_PORT)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--seed", seed, "Default seed for embeddings and k-means");
  serve->add_option("--cache-dir", cache_dir,
                    "Embedding cache and group snapshots (env ATTRSCOPE_CACHE_DIR)");

  // embed
  auto* embed = app.add_subcommand("embed", "Project one space to 2-D");
  std::string space = "FEA", method = "tsne", out_path, sidecar_path;
  double perplexity = 30.0, learning_rate = 200.0, exaggeration = 12.0;
  int iterations = 1000;
  bool standardize = false;
  embed->add_option("--manifest", manifest)->required();
  embed->add_option("--space", space, "ACT, FEA or PRD");
  embed->add_option("--method", method, "tsne or pca");
  embed->add_option("--perplexity", perplexity);
  embed->add_option("--iterations", iterations);
  embed->add_option("--learning-rate", learning_rate);
  embed->add_option("--exaggeration", exaggeration);
  embed->add_option("--seed", seed);
  embed->add_flag("--standardize", standardize, "z-score input dimensions");
  embed->add_option("--out", out_path, "CSV output (default stdout)");
  embed->add_option("--sidecar", sidecar_path,
                    "JSON sidecar (default <out>.json)");
  embed->add_option("--cache-dir", cache_dir);

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Cluster embedded points");
  std::string embedding_path, group_path, cluster_method = "kmeans",
                                          labels_path, scores_path;
  int k = 2, min_pts = 4;
  double eps = 0.5;
  cluster->add_option("--embedding", embedding_path, "image_id,x,y CSV")
      ->required();
  cluster->add_option("--group", group_path, "File with one image id per line");
  cluster->add_option("--method", cluster_method, "kmeans or dbscan");
  cluster->add_option("--k", k);
  cluster->add_option("--eps", eps);
  cluster->add_option("--min-pts", min_pts);
  cluster->add_option("--seed", seed);
  cluster->add_option("--out", labels_path, "Labels CSV (default stdout)");
  cluster->add_option("--scores", scores_path, "Scores JSON (default stdout)");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Per-attribute metrics table");
  std::string metrics_group;
  metrics->add_option("--manifest", manifest)->required();
  metrics->add_option("--group", metrics_group,
                      "File with one image id per line (default: all images)");

  // coexist
  auto* coexist = app.add_subcommand("coexist", "Attribute co-existence");
  coexist->require_subcommand(1);
  coexist->add_option("--manifest", manifest)->required();
  std::string coexist_group;
  coexist->add_option("--group", coexist_group,
                      "File with one image id per line (default: all images)");
  auto* matrix = coexist->add_subcommand("matrix", "Pairwise matrix");
  std::string measure = "correlation", layout = "ACT";
  matrix->add_option("--measure", measure,
                     "correlation, mutual_information or conditional_entropy");
  matrix->add_option("--layout", layout, "ACT, PRD or cross");
  auto* table = coexist->add_subcommand("table", "k-attribute combinations");
  int table_k = 3, limit = 0;
  std::string rank_by = "number";
  table->add_option("--k", table_k);
  table->add_option("--rank-by", rank_by, "number or corNum");
  table->add_option("--limit", limit, "0 = no limit");
  auto* attrset = coexist->add_subcommand("attribute-set",
                                          "Correctness patterns of a set");
  std::string attrs;
  attrset->add_option("--attrs", attrs, "Comma-separated indices or names")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      Session s(cache_dir, seed);
      if (!manifest.empty() && !s.load(manifest)) return fail();
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::thread watcher([&] {
        while (!g_interrupted) {
          std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
        attrscope_stop(s.get());
      });
      volatile int bound = 0;
      std::cerr << "serving on " << host << ":" << port << "\n";
      const auto st = attrscope_serve(s.get(), host.c_str(), port, &bound);
      g_interrupted = true;
      watcher.join();
      return st == ATTRSCOPE_OK ? 0 : fail();
    }

    if (*embed) {
      Session s(cache_dir, seed);
      if (!s.load(manifest)) return fail();
      const nlohmann::json params = {{"space", space},
                                     {"method", method},
                                     {"perplexity", perplexity},
                                     {"iterations", iterations},
                                     {"learning_rate", learning_rate},
                                     {"exaggeration", exaggeration},
                                     {"seed", seed},
                                     {"standardize", standardize}};
      Owned csv, sidecar;
      if (attrscope_embed(s.get(), params.dump().c_str(), &csv.ptr,
                          &sidecar.ptr) != ATTRSCOPE_OK) {
        return fail();
      }
      write_text(out_path, csv.str());
      if (sidecar_path.empty() && !out_path.empty() && out_path != "-") {
        sidecar_path = out_path + ".json";
      }
      if (!sidecar_path.empty()) write_text(sidecar_path, sidecar.str() + "\n");
      return 0;
    }

    if (*cluster) {
      nlohmann::json params = {{"method", cluster_method}};
      if (cluster_method == "dbscan") {
        params["eps"] = eps;
        params["min_pts"] = min_pts;
      } else {
        params["k"] = k;
        params["seed"] = seed;
      }
      const auto csv_text = read_text(embedding_path);
      const auto ids_text = group_path.empty() ? std::string{} : read_text(group_path);
      Owned labels, scores;
      if (attrscope_cluster_csv(csv_text.c_str(),
                                ids_text.empty() ? nullptr : ids_text.c_str(),
                                params.dump().c_str(), &labels.ptr,
                                &scores.ptr) != ATTRSCOPE_OK) {
        return fail();
      }
      write_text(labels_path, labels.str());
      write_text(scores_path, scores.str() + "\n");
      return 0;
    }

    if (*metrics) {
      Session s(cache_dir, seed);
      if (!s.load(manifest)) return fail();
      const auto gid = s.group_from_file(metrics_group);
      std::string out;
      return emit(s.request("GET", "/api/groups/" + gid + "/metrics", "", out), out);
    }

    if (*coexist) {
      Session s(cache_dir, seed);
      if (!s.load(manifest)) return fail();
      const auto gid = s.group_from_file(coexist_group);
      std::string out;
      if (*matrix) {
        return emit(s.request("GET",
                              "/api/coexistence/matrix?measure=" + encode(measure) +
                                  "&layout=" + encode(layout) + "&group=" + gid,
                              "", out),
                    out);
      }
      if (*table) {
        return emit(s.request("GET",
                              "/api/coexistence/table?k=" + std::to_string(table_k) +
                                  "&rankBy=" + encode(rank_by) +
                                  "&limit=" + std::to_string(limit) +
                                  "&group=" + gid,
                              "", out),
                    out);
      }
      if (*attrset) {
        return emit(s.request("GET", "/api/attribute-set?attrs=" + encode(attrs), "",
                              out),
                    out);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
