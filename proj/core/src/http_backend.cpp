#include "raqa/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace raqa {

namespace {

httplib::Headers auth_headers(const HttpBackendConfig& config) {
    httplib::Headers headers;
    if (!config.api_key_env.empty()) {
        const char* key = std::getenv(config.api_key_env.c_str());
        if (!key) {
            throw TransportError("API key env var not set: " + config.api_key_env);
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    return headers;
}

nlohmann::json post_json(const HttpBackendConfig& config, const std::string& path,
                         const nlohmann::json& body) {
    std::string last_error;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
        }
        httplib::Client client(config.base_url);
        client.set_read_timeout(config.timeout_seconds, 0);
        client.set_connection_timeout(config.timeout_seconds, 0);

        auto res = client.Post(path, auth_headers(config), body.dump(), "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;  // transport failure, retry
        }
        if (res->status != 200) {
            throw ProtocolError("POST " + path + " returned status " +
                                std::to_string(res->status));
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw ProtocolError("POST " + path + ": malformed response body: " + e.what());
        }
    }
    throw TransportError("POST " + config.base_url + path + " failed: " + last_error);
}

}  // namespace

HttpGenerationBackend::HttpGenerationBackend(HttpBackendConfig config)
    : config_(std::move(config)) {}

std::string HttpGenerationBackend::generate(const GenerationRequest& request) {
    nlohmann::json body{{"prompt", request.prompt},
                        {"stop", request.stop_markers},
                        {"max_tokens", request.max_tokens}};
    if (request.decoding.greedy) {
        body["greedy"] = true;
    } else {
        body["temperature"] = request.decoding.temperature;
    }
    const nlohmann::json res = post_json(config_, "/generate", body);
    if (!res.contains("text") || !res["text"].is_string()) {
        throw ProtocolError("/generate response is missing 'text'");
    }
    return truncate_at_stop(res["text"].get<std::string>(), request.stop_markers);
}

HttpEntailmentBackend::HttpEntailmentBackend(HttpBackendConfig config)
    : config_(std::move(config)) {}

EntailmentScore HttpEntailmentBackend::entail(const EntailmentRequest& request) {
    if (request.premise.empty() || request.hypothesis.empty()) {
        throw ProtocolError("entailment request with empty premise or hypothesis");
    }
    const nlohmann::json body{{"premise", request.premise},
                              {"hypothesis", request.hypothesis}};
    const nlohmann::json res = post_json(config_, "/entail", body);
    try {
        return {res.at("p_entail").get<double>(), res.value("p_neutral", 0.0),
                res.value("p_contradict", 0.0)};
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("/entail response malformed: ") + e.what());
    }
}

HttpSearchClient::HttpSearchClient(HttpBackendConfig config) : config_(std::move(config)) {}

std::vector<SearchResult> HttpSearchClient::search(const std::string& query, int top_k) {
    const nlohmann::json body{{"query", query}, {"top_k", top_k}};
    const nlohmann::json res = post_json(config_, "/search", body);
    if (!res.contains("results") || !res["results"].is_array()) {
        throw ProtocolError("/search response is missing 'results'");
    }
    std::vector<SearchResult> out;
    for (const auto& r : res["results"]) {
        try {
            out.push_back({r.at("rank").get<int>(), r.value("title", ""),
                           r.at("text").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw ProtocolError(std::string("/search result malformed: ") + e.what());
        }
    }
    return out;
}

}  // namespace raqa
