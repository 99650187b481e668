#pragma once

// JSON encodings of every engine result. Output goes through canonical()
// which sorts keys and prints doubles in shortest round-trip form, so equal
// results always serialize to equal bytes. Undefined scores become null.

#include <map>
#include <string>
#include <vector>

#include "clustering.hpp"
#include "coexistence.hpp"
#include "dataset.hpp"
#include "embedding.hpp"
#include "json.hpp"
#include "metrics.hpp"
#include "selection.hpp"

namespace attrscope {

using Json = nlohmann::json;

std::string canonical(const Json& j);

Json dataset_summary_json(const Dataset& dataset);
Json metrics_table_json(const Dataset& dataset, const GroupMetricsTable& table,
                        const std::string& group_id);
Json pairwise_matrix_json(const Dataset& dataset, const PairwiseMatrix& m,
                          const std::string& group_id);
Json coexistence_table_json(const Dataset& dataset,
                            const std::vector<CoexistenceRow>& rows,
                            std::size_t k, RankBy rank_by,
                            const std::string& group_id);
Json patterns_json(const Dataset& dataset, std::span<const std::size_t> selected,
                   const std::vector<CorrectnessPattern>& patterns);
Json cluster_result_json(const ClusterResult& r, const ClusterParams& params);
Json embedding_params_json(const EmbeddingParams& p);
Json embedding_json(const Embedding& e);
Json image_detail_json(const Dataset& dataset, const ImageDetail& d);
Json gallery_json(const std::map<std::size_t, std::vector<std::string>>& b,
                  IndicatorSpace space, const std::string& group_id);
Json error_json(const std::string& code, const std::string& message,
                const std::string& detail);

/// Reverse of embedding_json; used by the on-disk cache.
Embedding embedding_from_json(const Json& j);

/// Parses an embedding params object; absent fields keep `defaults`.
EmbeddingParams embedding_params_from_json(const Json& j,
                                           EmbeddingParams defaults);
ClusterParams cluster_params_from_json(const Json& j, ClusterParams defaults);

/// `image_id,x,y` with a header row.
std::string embedding_csv(const Embedding& e);
/// Parses `image_id,x,y` (header required) into ids and an n x 2 point set.
void parse_embedding_csv(const std::string& text, std::vector<std::string>& ids,
                         PointSet& points);
/// `image_id,label` with a header row.
std::string labels_csv(const ClusterResult& r);

}  // namespace attrscope
