#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rcbir/evaluation.hpp"
#include "rcbir/indexing.hpp"
#include "rcbir/retrieval.hpp"
#include "rcbir/segmentation.hpp"

namespace rcbir {

using Json = nlohmann::json;

[[nodiscard]] Json to_json(const BoundingBox& bbox);
[[nodiscard]] Json to_json(const TextureFeatures& f);
/// {t_iterative, t_otsu, t_star, iterations}
[[nodiscard]] Json to_json(const ThresholdReport& report);
/// {mode, query_key, candidates_examined, results: [{image_id, class_label, distance, bbox, cell}]}
[[nodiscard]] Json to_json(const QueryResult& result);
[[nodiscard]] Json to_json(const IndexEntry& entry);
[[nodiscard]] Json to_json(const ImageIndex& index);
[[nodiscard]] Json to_json(const EvalReport& report);

/// image_id,energy,entropy,contrast
[[nodiscard]] std::string features_csv_header();
[[nodiscard]] std::string features_csv_row(const std::string& image_id, const TextureFeatures& f);

/// Per mode: a class x k precision table with an average row. Then one
/// recall@20 table with a column per mode.
[[nodiscard]] std::string eval_csv(const std::vector<EvalReport>& reports);

/// Average precision against k, one polyline per mode.
[[nodiscard]] std::string precision_svg(const std::vector<EvalReport>& reports);

/// Percentages rounded to two decimals without trailing zeros.
[[nodiscard]] std::string format_percent(double value);

}  // namespace rcbir
