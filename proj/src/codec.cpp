#include "codec.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace attrscope {

std::string canonical(const Json& j) { return j.dump(); }

namespace {

Json opt(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json names_of(const Dataset& dataset, std::span<const std::size_t> indices) {
  Json out = Json::array();
  for (auto i : indices) out.push_back(dataset.catalog().name(i));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
T field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const Json::exception&) {
    throw validation_error("invalid_field",
                           std::string("field '") + key + "' has wrong type",
                           key);
  }
}

}  // namespace

Json dataset_summary_json(const Dataset& dataset) {
  return {{"name", dataset.name()},
          {"A", dataset.attribute_count()},
          {"F", dataset.feature_count()},
          {"records", dataset.size()},
          {"attributes", dataset.catalog().names()}};
}

Json metrics_table_json(const Dataset& dataset, const GroupMetricsTable& table,
                        const std::string& group_id) {
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"attribute", r.attribute},
                    {"name", dataset.catalog().name(r.attribute)},
                    {"positives", r.positives},
                    {"tp", r.counts.tp},
                    {"tn", r.counts.tn},
                    {"fp", r.counts.fp},
                    {"fn", r.counts.fn},
                    {"accuracy", opt(r.scores.accuracy)},
                    {"precision", opt(r.scores.precision)},
                    {"recall", opt(r.scores.recall)},
                    {"f1", opt(r.scores.f1)}});
  }
  return {{"group", group_id}, {"rows", rows}};
}

Json pairwise_matrix_json(const Dataset& dataset, const PairwiseMatrix& m,
                          const std::string& group_id) {
  Json values = Json::array();
  for (std::size_t i = 0; i < m.size; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.size; ++j) row.push_back(opt(m.at(i, j)));
    values.push_back(std::move(row));
  }
  return {{"measure", std::string(to_string(m.measure))},
          {"layout", std::string(to_string(m.layout))},
          {"group", group_id},
          {"attributes", dataset.catalog().names()},
          {"values", values}};
}

Json coexistence_table_json(const Dataset& dataset,
                            const std::vector<CoexistenceRow>& rows,
                            std::size_t k, RankBy rank_by,
                            const std::string& group_id) {
  Json out_rows = Json::array();
  for (const auto& r : rows) {
    out_rows.push_back({{"combination", r.combination},
                        {"names", names_of(dataset, r.combination)},
                        {"number", r.number},
                        {"corNum", r.cor_num}});
  }
  return {{"k", k},
          {"rankBy", std::string(to_string(rank_by))},
          {"group", group_id},
          {"rows", out_rows}};
}

Json patterns_json(const Dataset& dataset, std::span<const std::size_t> selected,
                   const std::vector<CorrectnessPattern>& patterns) {
  Json rows = Json::array();
  std::size_t universe = 0;
  for (const auto& p : patterns) {
    Json flags = Json::array();
    for (auto c : p.pattern) flags.push_back(c == Correctness::Correct);
    Json ids = Json::array();
    for (auto idx : p.images) ids.push_back(dataset.record(idx).id);
    rows.push_back({{"correct", flags},
                    {"correct_count", p.correct_flags()},
                    {"count", p.count},
                    {"image_ids", ids}});
    universe += p.count;
  }
  return {{"attributes", Json(std::vector<std::size_t>(selected.begin(),
                                                       selected.end()))},
          {"names", names_of(dataset, selected)},
          {"universe", universe},
          {"rows", rows}};
}

Json cluster_result_json(const ClusterResult& r, const ClusterParams& params) {
  Json p = {{"method", std::string(to_string(params.method))},
            {"space", std::string(to_string(params.space))},
            {"coordinate_source",
             std::string(to_string(params.coordinate_source))}};
  if (params.method == ClusterMethod::Kmeans) {
    p["k"] = params.k;
    p["seed"] = params.seed;
  } else {
    p["eps"] = params.eps;
    p["min_pts"] = params.min_pts;
  }
  return {{"params", p},
          {"ids", r.ids},
          {"labels", r.labels},
          {"k_found", r.k_found},
          {"inertia", opt(r.inertia)},
          {"silhouette", opt(r.silhouette)},
          {"davies_bouldin", opt(r.davies_bouldin.value)},
          {"degenerate_centroids", r.davies_bouldin.degenerate_centroids}};
}

Json embedding_params_json(const EmbeddingParams& p) {
  Json j = {{"space", std::string(to_string(p.space))},
            {"method", std::string(to_string(p.method))},
            {"standardize", p.standardize}};
  if (p.method == Method::Tsne) {
    j["perplexity"] = p.perplexity;
    j["iterations"] = p.iterations;
    j["learning_rate"] = p.learning_rate;
    j["seed"] = p.seed;
    j["exaggeration"] = p.exaggeration;
    j["exaggeration_iterations"] = p.exaggeration_iterations;
    j["momentum_switch"] = p.momentum_switch;
  }
  return j;
}

Json embedding_json(const Embedding& e) {
  Json points = Json::array();
  for (std::size_t i = 0; i < e.ids.size(); ++i) {
    points.push_back({{"id", e.ids[i]},
                      {"x", e.points(i, 0)},
                      {"y", e.points(i, 1)}});
  }
  Json trace = Json::array();
  if (e.params.method == Method::Tsne) {
    for (const auto& t : e.kl_trace) {
      trace.push_back({{"iteration", t.iteration}, {"kl", t.value}});
    }
  } else {
    trace.push_back({{"explained_variance", e.explained_variance},
                     {"explained_variance_ratio", e.explained_variance_ratio}});
  }
  return {{"params", embedding_params_json(e.params)},
          {"points", points},
          {"objective_trace", trace}};
}

Embedding embedding_from_json(const Json& j) {
  Embedding e;
  e.params = embedding_params_from_json(j.at("params"), {});
  const auto& pts = j.at("points");
  e.points = PointSet(pts.size(), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    e.ids.push_back(pts[i].at("id").get<std::string>());
    e.points(i, 0) = pts[i].at("x").get<double>();
    e.points(i, 1) = pts[i].at("y").get<double>();
  }
  for (const auto& t : j.at("objective_trace")) {
    if (t.contains("kl")) {
      e.kl_trace.push_back({t.at("iteration").get<int>(), t.at("kl").get<double>()});
    } else {
      e.explained_variance = t.at("explained_variance").get<std::array<double, 2>>();
      e.explained_variance_ratio =
          t.at("explained_variance_ratio").get<std::array<double, 2>>();
    }
  }
  return e;
}

Json image_detail_json(const Dataset& dataset, const ImageDetail& d) {
  Json flower = Json::array();
  for (auto s : d.flower) flower.push_back(std::string(to_string(s)));
  return {{"id", d.id},
          {"attributes", dataset.catalog().names()},
          {"act", d.act},
          {"prd", d.prd},
          {"decisions", d.decisions},
          {"flower", flower},
          {"error_rate", d.error_rate},
          {"thumbnail", d.thumbnail ? Json(*d.thumbnail) : Json(nullptr)}};
}

Json gallery_json(const std::map<std::size_t, std::vector<std::string>>& b,
                  IndicatorSpace space, const std::string& group_id) {
  Json buckets = Json::array();
  for (const auto& [count, ids] : b) {
    buckets.push_back({{"count", count}, {"image_ids", ids}});
  }
  return {{"group", group_id},
          {"space", std::string(to_string(space))},
          {"buckets", buckets}};
}

Json error_json(const std::string& code, const std::string& message,
                const std::string& detail) {
  return {{"code", code}, {"message", message}, {"detail", detail}};
}

EmbeddingParams embedding_params_from_json(const Json& j,
                                           EmbeddingParams p) {
  if (!j.is_object()) {
    throw validation_error("invalid_params", "embedding params must be an object");
  }
  if (j.contains("space")) p.space = parse_space(field<std::string>(j, "space", ""));
  if (j.contains("method")) {
    p.method = parse_method(field<std::string>(j, "method", ""));
  }
  p.perplexity = field(j, "perplexity", p.perplexity);
  p.iterations = field(j, "iterations", p.iterations);
  p.learning_rate = field(j, "learning_rate", p.learning_rate);
  p.seed = field(j, "seed", p.seed);
  p.exaggeration = field(j, "exaggeration", p.exaggeration);
  p.exaggeration_iterations =
      field(j, "exaggeration_iterations", p.exaggeration_iterations);
  p.momentum_switch = field(j, "momentum_switch", p.momentum_switch);
  p.standardize = field(j, "standardize", p.standardize);
  return p;
}

ClusterParams cluster_params_from_json(const Json& j, ClusterParams p) {
  if (!j.is_object()) {
    throw validation_error("invalid_params", "cluster params must be an object");
  }
  if (j.contains("method")) {
    p.method = parse_cluster_method(field<std::string>(j, "method", ""));
  }
  if (j.contains("k")) {
    const auto k = field<long long>(j, "k", 0);
    if (k < 1) throw validation_error("invalid_k", "k must be at least 1");
    p.k = static_cast<std::size_t>(k);
  }
  p.eps = field(j, "eps", p.eps);
  if (j.contains("min_pts")) {
    const auto m = field<long long>(j, "min_pts", 0);
    if (m < 1) {
      throw validation_error("invalid_min_pts", "min_pts must be at least 1");
    }
    p.min_pts = static_cast<std::size_t>(m);
  }
  p.seed = field(j, "seed", p.seed);
  if (j.contains("space")) p.space = parse_space(field<std::string>(j, "space", ""));
  if (j.contains("coordinate_source")) {
    p.coordinate_source = parse_coordinate_source(
        field<std::string>(j, "coordinate_source", ""));
  }
  return p;
}

std::string embedding_csv(const Embedding& e) {
  std::string out = "image_id,x,y\n";
  for (std::size_t i = 0; i < e.ids.size(); ++i) {
    out += e.ids[i] + "," + format_double(e.points(i, 0)) + "," +
           format_double(e.points(i, 1)) + "\n";
  }
  return out;
}

void parse_embedding_csv(const std::string& text, std::vector<std::string>& ids,
                         PointSet& points) {
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::vector<double> coords;
  ids.clear();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "image_id,x,y") {
        throw validation_error("csv_header",
                               "embedding CSV header must be 'image_id,x,y'");
      }
      header = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw validation_error("csv_shape", "bad embedding row '" + line + "'");
    }
    auto parse = [&](std::string_view s) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw validation_error("csv_value",
                               "bad coordinate in row '" + line + "'");
      }
      return v;
    };
    const std::string_view view(line);
    ids.push_back(line.substr(0, c1));
    coords.push_back(parse(view.substr(c1 + 1, c2 - c1 - 1)));
    coords.push_back(parse(view.substr(c2 + 1)));
  }
  if (!header) throw validation_error("csv_empty", "embedding CSV is empty");
  points = PointSet(ids.size(), 2, std::move(coords));
}

std::string labels_csv(const ClusterResult& r) {
  std::string out = "image_id,label\n";
  for (std::size_t i = 0; i < r.ids.size(); ++i) {
    out += r.ids[i] + "," + std::to_string(r.labels[i]) + "\n";
  }
  return out;
}

}  // namespace attrscope
