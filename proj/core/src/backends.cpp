#include "raqa/backends.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "raqa/hash.hpp"

namespace raqa {

EntailmentLabel label_for(const EntailmentScore& score, double threshold) {
    if (score.p_entail >= threshold) return EntailmentLabel::Entailed;
    return score.p_contradict > score.p_neutral ? EntailmentLabel::Contradicted
                                                : EntailmentLabel::Neutral;
}

std::string truncate_at_stop(const std::string& text,
                             const std::vector<std::string>& stop_markers) {
    std::size_t cut = std::string::npos;
    for (const std::string& marker : stop_markers) {
        if (marker.empty()) continue;
        const std::size_t pos = text.find(marker);
        if (pos != std::string::npos && pos < cut) cut = pos;
    }
    return cut == std::string::npos ? text : text.substr(0, cut);
}

std::string decoding_key(const Decoding& decoding) {
    if (decoding.greedy) return "greedy";
    std::ostringstream os;
    os << "t" << decoding.temperature;
    return os.str();
}

ScriptedGenerationBackend ScriptedGenerationBackend::from_file(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open transcript file: " + path.string());

    ScriptedGenerationBackend backend;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("transcript line " + std::to_string(line_no) + ": " + e.what());
        }
        const std::string text = j.at("text").get<std::string>();
        if (j.contains("prompt_contains")) {
            backend.rules_.emplace_back(j.at("prompt_contains").get<std::string>(), text);
        } else {
            Key key;
            key.prompt_hash = std::stoull(j.at("prompt_hash").get<std::string>(), nullptr, 16);
            key.decoding = j.value("decoding", "greedy");
            key.sample_index = j.value("sample_index", 0);
            backend.entries_[key] = text;
        }
    }
    return backend;
}

void ScriptedGenerationBackend::add(const std::string& prompt, const Decoding& decoding,
                                    int sample_index, const std::string& text) {
    entries_[{fnv1a64(prompt), decoding_key(decoding), sample_index}] = text;
}

void ScriptedGenerationBackend::add_rule(const std::string& prompt_contains,
                                         const std::string& text) {
    rules_.emplace_back(prompt_contains, text);
}

std::string ScriptedGenerationBackend::generate(const GenerationRequest& request) {
    const Key key{fnv1a64(request.prompt), decoding_key(request.decoding),
                  request.sample_index};
    if (auto it = entries_.find(key); it != entries_.end()) {
        return truncate_at_stop(it->second, request.stop_markers);
    }
    for (const auto& [needle, text] : rules_) {
        if (request.prompt.find(needle) != std::string::npos) {
            return truncate_at_stop(text, request.stop_markers);
        }
    }
    throw ProtocolError("no transcript entry for prompt (hash " +
                        std::to_string(key.prompt_hash) + ", " + key.decoding + ", sample " +
                        std::to_string(key.sample_index) + ")");
}

ScriptedEntailmentBackend ScriptedEntailmentBackend::from_file(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open entailment table: " + path.string());

    ScriptedEntailmentBackend backend;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        EntailmentScore score{j.at("p_entail").get<double>(), j.value("p_neutral", 0.0),
                              j.value("p_contradict", 0.0)};
        if (j.contains("hypothesis")) {
            backend.set(j.at("hypothesis").get<std::string>(), score);
        } else {
            backend.set_default(score);
        }
    }
    return backend;
}

void ScriptedEntailmentBackend::set(const std::string& hypothesis, EntailmentScore score) {
    table_[hypothesis] = score;
}

EntailmentScore ScriptedEntailmentBackend::entail(const EntailmentRequest& request) {
    if (request.premise.empty() || request.hypothesis.empty()) {
        throw ProtocolError("entailment request with empty premise or hypothesis");
    }
    if (auto it = table_.find(request.hypothesis); it != table_.end()) return it->second;
    if (default_) return *default_;
    throw ProtocolError("no entailment table entry for hypothesis: " + request.hypothesis);
}

}  // namespace raqa
