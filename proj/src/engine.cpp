#include "engine.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "clustering.hpp"
#include "codec.hpp"
#include "coexistence.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "selection.hpp"

namespace attrscope {

namespace fs = std::filesystem;

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string url_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() &&
               hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) pos = s.size();
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

Response json_response(int status, const Json& j) {
  return {status, "application/json", canonical(j)};
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return 400;
    case ErrorKind::NotFound: return 404;
    case ErrorKind::NotReady: return 409;
    case ErrorKind::Numerical: return 500;
    case ErrorKind::Io: return 500;
    case ErrorKind::Internal: return 500;
  }
  return 500;
}

template <typename T>
T query_number(const std::map<std::string, std::string>& q,
               const std::string& key, T fallback) {
  auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return fallback;
  T value{};
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw validation_error("invalid_query",
                           "query parameter '" + key + "' is not a number",
                           key);
  }
  return value;
}

std::string query_string(const std::map<std::string, std::string>& q,
                         const std::string& key, std::string fallback) {
  auto it = q.find(key);
  return it == q.end() || it->second.empty() ? fallback : it->second;
}

bool query_flag(const std::map<std::string, std::string>& q,
                const std::string& key) {
  auto it = q.find(key);
  if (it == q.end()) return false;
  return it->second == "1" || it->second == "true" || it->second.empty();
}

Json parse_body(const Request& r) {
  if (r.body.empty()) return Json::object();
  auto j = Json::parse(r.body, nullptr, false);
  if (j.is_discarded()) {
    throw validation_error("invalid_json", "request body is not valid JSON");
  }
  return j;
}

}  // namespace

Request make_request(std::string method, const std::string& target,
                     std::string body) {
  Request r;
  r.method = std::move(method);
  r.body = std::move(body);
  const auto q = target.find('?');
  r.path = target.substr(0, q);
  if (q != std::string::npos) {
    for (const auto& part : split(std::string_view(target).substr(q + 1), '&')) {
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string::npos) {
        r.query[url_decode(part)] = "";
      } else {
        r.query[url_decode(part.substr(0, eq))] = url_decode(part.substr(eq + 1));
      }
    }
  }
  return r;
}

Engine::Engine(EngineOptions options)
    : options_(std::move(options)),
      groups_(std::make_unique<GroupStore>()),
      embeddings_(std::make_unique<EmbeddingCache>(options_.cache_dir)) {}

nlohmann::json Engine::load(const fs::path& manifest_path) {
  auto manifest = load_manifest(manifest_path);
  auto dataset = load_dataset(manifest);
  return install(std::move(dataset), std::move(manifest));
}

nlohmann::json Engine::install(Dataset dataset,
                               std::optional<DatasetManifest> manifest) {
  auto shared = std::make_shared<const Dataset>(std::move(dataset));
  const auto fingerprint = dataset_fingerprint(*shared);
  std::optional<fs::path> snapshot;
  if (options_.cache_dir) {
    snapshot = *options_.cache_dir / ("groups-" + fingerprint + ".json");
  }
  embeddings_->reset(fingerprint);
  std::lock_guard lock(mutex_);
  dataset_ = shared;
  manifest_ = std::move(manifest);
  groups_ = std::make_unique<GroupStore>(snapshot);
  return dataset_summary_json(*shared);
}

std::shared_ptr<const Dataset> Engine::dataset() const {
  std::lock_guard lock(mutex_);
  if (!dataset_) {
    throw validation_error("no_dataset", "no dataset loaded");
  }
  return dataset_;
}

Response Engine::handle(const Request& request) {
  try {
    return dispatch(request);
  } catch (const Error& e) {
    return json_response(status_for(e.kind()),
                         error_json(e.code(), e.what(), e.detail()));
  } catch (const Json::exception& e) {
    return json_response(400, error_json("invalid_json", e.what(), ""));
  } catch (const std::exception& e) {
    return json_response(500, error_json("internal", e.what(), ""));
  }
}

Response Engine::dispatch(const Request& r) {
  const auto parts = split(r.path, '/');
  // parts[0] is empty for a leading slash
  if (parts.size() < 3 || !parts[0].empty() || parts[1] != "api") {
    throw not_found_error("unknown_endpoint", "no such endpoint: " + r.path);
  }
  const auto& root = parts[2];
  const auto n = parts.size();

  if (root == "dataset" && n == 4 && parts[3] == "load" && r.method == "POST") {
    return load_endpoint(r);
  }
  if (root == "dataset" && n == 3 && r.method == "GET") {
    return json_response(200, dataset_summary_json(*dataset()));
  }
  if (root == "embedding" && r.method == "GET") {
    if (n == 3) return embedding_endpoint(r, false);
    if (n == 4 && parts[3] == "status") return embedding_endpoint(r, true);
  }
  if (root == "images" && n == 5 && r.method == "GET") {
    return image_endpoint(r, parts[3], parts[4]);
  }
  if (root == "groups") {
    if (n == 3 && r.method == "POST") return create_group(r);
    if (n == 3 && r.method == "GET") {
      Json arr = Json::array();
      for (const auto& g : groups().list()) arr.push_back(group_json(g));
      return json_response(200, {{"groups", arr}});
    }
    if (n == 4) return group_endpoint(r, parts[3], "");
    if (n == 5 && parts[4] == "cluster" && r.method == "POST") {
      return cluster_endpoint(r, parts[3]);
    }
    if (n == 5 && r.method == "GET") return group_endpoint(r, parts[3], parts[4]);
  }
  if (root == "coexistence" && n == 4 && r.method == "GET") {
    if (parts[3] == "matrix") return matrix_endpoint(r);
    if (parts[3] == "table") return table_endpoint(r);
  }
  if (root == "attribute-set" && n == 3 && r.method == "GET") {
    return attribute_set_endpoint(r);
  }
  throw not_found_error("unknown_endpoint",
                        "no such endpoint: " + r.method + " " + r.path);
}

Response Engine::load_endpoint(const Request& r) {
  const auto body = parse_body(r);
  std::string path;
  if (body.contains("manifest") && body["manifest"].is_string()) {
    path = body["manifest"].get<std::string>();
  } else if (body.contains("path") && body["path"].is_string()) {
    path = body["path"].get<std::string>();
  } else {
    throw validation_error("invalid_request",
                           "body must carry a 'manifest' path");
  }
  return json_response(200, load(path));
}

EmbeddingParams Engine::embedding_params(
    const std::map<std::string, std::string>& q, Space default_space) const {
  EmbeddingParams p;
  p.seed = options_.seed;
  p.space = default_space;
  if (auto it = q.find("space"); it != q.end()) p.space = parse_space(it->second);
  if (auto it = q.find("method"); it != q.end()) {
    p.method = parse_method(it->second);
  }
  p.perplexity = query_number(q, "perplexity", p.perplexity);
  p.iterations = query_number(q, "iterations", p.iterations);
  p.learning_rate = query_number(q, "learning_rate", p.learning_rate);
  p.seed = query_number(q, "seed", p.seed);
  p.exaggeration = query_number(q, "exaggeration", p.exaggeration);
  p.exaggeration_iterations =
      query_number(q, "exaggeration_iterations", p.exaggeration_iterations);
  p.momentum_switch = query_number(q, "momentum_switch", p.momentum_switch);
  p.standardize = query_flag(q, "standardize");
  return p;
}

Response Engine::embedding_endpoint(const Request& r, bool status_only) {
  auto ds = dataset();
  const auto params = embedding_params(r.query, Space::Fea);
  auto& cache = embeddings();
  if (status_only) {
    return json_response(200, {{"status", std::string(to_string(cache.status(params)))},
                               {"params", embedding_params_json(params)}});
  }
  if (query_flag(r.query, "wait")) {
    auto e = cache.wait(ds, params);
    return json_response(200, embedding_json(*e));
  }
  const auto st = cache.request(ds, params);
  if (st == EmbeddingStatus::Computing) {
    return json_response(202, {{"status", "computing"},
                               {"params", embedding_params_json(params)}});
  }
  // Ready or failed: wait() returns the value or rethrows the failure.
  auto e = cache.wait(ds, params);
  return json_response(200, embedding_json(*e));
}

Response Engine::image_endpoint(const Request&, const std::string& id,
                                const std::string& what) {
  auto ds = dataset();
  const auto idx = ds->find(id);
  if (!idx) {
    throw not_found_error("unknown_image", "unknown image id '" + id + "'", id);
  }
  if (what == "detail") {
    return json_response(200, image_detail_json(*ds, image_detail(*ds, *idx)));
  }
  if (what == "thumbnail") {
    std::optional<fs::path> dir;
    {
      std::lock_guard lock(mutex_);
      if (manifest_) dir = manifest_->images_dir;
    }
    const auto& thumb = ds->record(*idx).thumbnail;
    if (!dir || !thumb) {
      throw not_found_error("no_thumbnail", "no thumbnail for '" + id + "'", id);
    }
    std::ifstream in(*dir / *thumb, std::ios::binary);
    if (!in) {
      throw not_found_error("no_thumbnail", "thumbnail file missing for '" + id + "'",
                            id);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const bool png = thumb->size() > 4 && thumb->ends_with(".png");
    return {200, png ? "image/png" : "image/jpeg", ss.str()};
  }
  throw not_found_error("unknown_endpoint", "no such image resource: " + what);
}

Response Engine::create_group(const Request& r) {
  auto ds = dataset();
  const auto body = parse_body(r);
  const auto name = body.value("name", std::string{});
  const auto color = body.value("color", std::string{});
  std::vector<std::string> ids;
  if (body.contains("image_ids")) {
    ids = body["image_ids"].get<std::vector<std::string>>();
    ds->resolve(ids);  // throws on unknown ids
  } else if (body.contains("polygon")) {
    std::vector<Point2> vertices;
    for (const auto& v : body["polygon"]) {
      if (v.is_array() && v.size() == 2) {
        vertices.push_back({v[0].get<double>(), v[1].get<double>()});
      } else if (v.is_object()) {
        vertices.push_back({v.at("x").get<double>(), v.at("y").get<double>()});
      } else {
        throw validation_error("invalid_polygon",
                               "polygon vertices must be [x,y] or {x,y}");
      }
    }
    const LassoPolygon polygon(std::move(vertices));
    EmbeddingParams params;
    params.seed = options_.seed;
    if (body.contains("embedding")) {
      params = embedding_params_from_json(body["embedding"], params);
    }
    auto e = embeddings().find(params);
    if (!e) {
      throw Error(ErrorKind::NotReady, "embedding_not_ready",
                  "embedding " + params.cache_key() + " is not computed");
    }
    ids = select_in_polygon(*e, polygon);
  } else {
    throw validation_error("invalid_request",
                           "group needs 'image_ids' or 'polygon'");
  }
  const auto g = groups().create(name, color, std::move(ids));
  return json_response(201, group_json(g));
}

std::vector<std::size_t> Engine::resolve_group(const Dataset& d,
                                               const std::string& id) const {
  if (id.empty() || id == "all") return d.all();
  std::optional<Group> g;
  {
    std::lock_guard lock(mutex_);
    g = groups_->get(id);
  }
  if (!g) throw not_found_error("unknown_group", "unknown group '" + id + "'", id);
  return d.resolve(g->image_ids);
}

Response Engine::group_endpoint(const Request& r, const std::string& id,
                                const std::string& what) {
  if (what.empty()) {
    if (r.method == "DELETE") {
      if (!groups().erase(id)) {
        throw not_found_error("unknown_group", "unknown group '" + id + "'", id);
      }
      return json_response(200, {{"deleted", id}});
    }
    if (r.method == "GET") {
      auto g = groups().get(id);
      if (!g) throw not_found_error("unknown_group", "unknown group '" + id + "'", id);
      return json_response(200, group_json(*g));
    }
    throw not_found_error("unknown_endpoint", "unsupported method " + r.method);
  }
  auto ds = dataset();
  if (what == "metrics") {
    const auto members = resolve_group(*ds, id);
    return json_response(
        200, metrics_table_json(*ds, group_metrics_table(*ds, members), id));
  }
  if (what == "gallery") {
    const auto members = resolve_group(*ds, id);
    const auto space = parse_indicator_space(query_string(r.query, "space", "ACT"));
    return json_response(200,
                         gallery_json(gallery_buckets(*ds, members, space), space, id));
  }
  throw not_found_error("unknown_endpoint", "no such group resource: " + what);
}

Response Engine::cluster_endpoint(const Request& r, const std::string& id) {
  auto ds = dataset();
  const auto body = parse_body(r);
  ClusterParams defaults;
  defaults.seed = options_.seed;
  const auto params = cluster_params_from_json(body, defaults);
  auto g = groups().get(id);
  if (!g) throw not_found_error("unknown_group", "unknown group '" + id + "'", id);
  if (params.method == ClusterMethod::Kmeans && params.k > g->image_ids.size()) {
    throw validation_error("invalid_k",
                           "k (" + std::to_string(params.k) +
                               ") exceeds group size (" +
                               std::to_string(g->image_ids.size()) + ")");
  }
  std::shared_ptr<const Embedding> embedding;
  if (params.coordinate_source == CoordinateSource::Embedded2d) {
    EmbeddingParams ep;
    ep.seed = options_.seed;
    if (body.contains("embedding")) {
      ep = embedding_params_from_json(body["embedding"], ep);
    }
    ep.space = params.space;
    embedding = embeddings().find(ep);
    if (!embedding) {
      embeddings().request(ds, ep);
      throw Error(ErrorKind::NotReady, "embedding_not_ready",
                  "embedding " + ep.cache_key() + " is still computing");
    }
  }
  const auto result = cluster_group(*ds, g->image_ids, embedding.get(), params);
  auto j = cluster_result_json(result, params);
  j["group"] = id;
  return json_response(200, j);
}

Response Engine::matrix_endpoint(const Request& r) {
  auto ds = dataset();
  const auto measure = parse_measure(query_string(r.query, "measure", "correlation"));
  const auto layout = parse_layout(query_string(r.query, "layout", "ACT"));
  const auto group_id = query_string(r.query, "group", "all");
  const auto members = resolve_group(*ds, group_id);
  return json_response(200, pairwise_matrix_json(
                                *ds, pairwise_matrix(*ds, members, measure, layout),
                                group_id));
}

Response Engine::table_endpoint(const Request& r) {
  auto ds = dataset();
  const auto k = query_number<std::size_t>(r.query, "k", 2);
  const auto rank_by = parse_rank_by(query_string(r.query, "rankBy", "number"));
  const auto limit = query_number<std::size_t>(r.query, "limit", 0);
  const auto group_id = query_string(r.query, "group", "all");
  const auto members = resolve_group(*ds, group_id);
  return json_response(
      200, coexistence_table_json(
               *ds, coexistence_table(*ds, members, k, rank_by, limit), k,
               rank_by, group_id));
}

Response Engine::attribute_set_endpoint(const Request& r) {
  auto ds = dataset();
  const auto text = query_string(r.query, "attrs", "");
  if (text.empty()) {
    throw validation_error("empty_selection", "attrs must list attribute indices");
  }
  std::vector<std::size_t> selected;
  for (const auto& part : split(text, ',')) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec == std::errc() && ptr == part.data() + part.size() && !part.empty()) {
      selected.push_back(v);
      continue;
    }
    // accept attribute names as well
    auto idx = ds->catalog().find(part);
    if (!idx) {
      throw validation_error("unknown_attribute", "unknown attribute '" + part + "'",
                             part);
    }
    selected.push_back(*idx);
  }
  return json_response(
      200, patterns_json(*ds, selected, attribute_set_patterns(*ds, selected)));
}

}  // namespace attrscope
