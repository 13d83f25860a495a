#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "causalfair/causal_model.hpp"
#include "causalfair/classifier.hpp"
#include "causalfair/dataset.hpp"
#include "causalfair/schema.hpp"

namespace causalfair {

// Model documents:
//   {"attributes": [{"name", "domain", "role"}...],
//    "edges": [[parent, child]...],
//    "cpts": [{"child", "parents": [...], "rows": [{"given": [...], "probs": [...]}...]}...]}
// A parent combination absent from "rows" is kept as a missing row so that
// validate() can report it. A schema document carries "attributes" only.
nlohmann::json schema_to_json(const Schema& schema);
std::shared_ptr<const Schema> schema_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const CausalModel& model);
CausalModel model_from_json(const nlohmann::json& j);

// Classifier documents carry a "kind" tag: tabular, tree, random_flip.
ClassifierPtr classifier_from_json(const nlohmann::json& j);

// CSV with a header naming every attribute once, in any order. Values must
// match domain names verbatim. Output columns follow schema order.
Dataset dataset_from_csv(std::string_view text, std::shared_ptr<const Schema> schema);
std::string dataset_to_csv(const Dataset& data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);
nlohmann::json read_json(const std::filesystem::path& path);

CausalModel load_model(const std::filesystem::path& path);
// Accepts either a model document or a bare schema document.
std::shared_ptr<const Schema> load_schema(const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path, std::shared_ptr<const Schema> schema);
ClassifierPtr load_classifier(const std::filesystem::path& path);

// Stable, human-diffable JSON text (two-space indent, trailing newline).
std::string dump_json(const nlohmann::json& j);

}  // namespace causalfair
