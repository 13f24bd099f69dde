#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "raqa/datagen.hpp"
#include "raqa/eval.hpp"
#include "raqa/types.hpp"

namespace raqa {

// JSON bindings for every serialized record type; files are one UTF-8
// JSON object per line.

void to_json(nlohmann::json& j, const QaExample& e);
void from_json(const nlohmann::json& j, QaExample& e);

void to_json(nlohmann::json& j, const EvidenceSnippet& s);
void from_json(const nlohmann::json& j, EvidenceSnippet& s);

void to_json(nlohmann::json& j, const DecompositionTrace& t);
void from_json(const nlohmann::json& j, DecompositionTrace& t);

void to_json(nlohmann::json& j, const GateDecision& g);
void from_json(const nlohmann::json& j, GateDecision& g);

void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);

void to_json(nlohmann::json& j, const TrainingExample& e);
void from_json(const nlohmann::json& j, TrainingExample& e);

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

template <typename T>
std::vector<T> read_jsonl_as(const std::filesystem::path& path) {
    std::vector<T> out;
    for (const auto& row : read_jsonl(path)) {
        out.push_back(row.get<T>());
    }
    return out;
}

template <typename T>
void write_jsonl_from(const std::filesystem::path& path, const std::vector<T>& rows) {
    std::vector<nlohmann::json> js;
    js.reserve(rows.size());
    for (const auto& r : rows) {
        js.push_back(nlohmann::json(r));
    }
    write_jsonl(path, js);
}

}  // namespace raqa
