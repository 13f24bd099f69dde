#pragma once

#include <string>
#include <vector>

#include "raqa/backends.hpp"

namespace raqa {

/// Wire contract shared by the HTTP clients below.
///   POST /generate {prompt, greedy|temperature, stop, max_tokens} -> {text}
///   POST /entail   {premise, hypothesis} -> {p_entail, p_neutral, p_contradict}
///   POST /search   {query, top_k} -> {results: [{rank, title, text}]}
/// If api_key_env is non-empty, its value is read from the environment and
/// sent as "Authorization: Bearer <key>".
struct HttpBackendConfig {
    std::string base_url;       // e.g. http://localhost:8080
    std::string api_key_env;    // name of the env var holding the key
    int max_retries = 2;        // transport retries (requests are idempotent)
    int timeout_seconds = 60;
};

class HttpGenerationBackend : public GenerationBackend {
public:
    explicit HttpGenerationBackend(HttpBackendConfig config);
    std::string generate(const GenerationRequest& request) override;

private:
    HttpBackendConfig config_;
};

class HttpEntailmentBackend : public EntailmentBackend {
public:
    explicit HttpEntailmentBackend(HttpBackendConfig config);
    EntailmentScore entail(const EntailmentRequest& request) override;

private:
    HttpBackendConfig config_;
};

struct SearchResult {
    int rank = 1;
    std::string title;
    std::string text;
};

/// Client for the index-build step; results are snapshotted into a
/// RetrievalIndex file, never queried live from the pipeline.
class HttpSearchClient {
public:
    explicit HttpSearchClient(HttpBackendConfig config);
    std::vector<SearchResult> search(const std::string& query, int top_k = 10);

private:
    HttpBackendConfig config_;
};

}  // namespace raqa
