#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "raqa/types.hpp"

namespace raqa {

/// Backend unreachable / request failed in transit. Retryable.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Backend answered, but the response does not match the wire contract.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Decoding {
    bool greedy = true;
    double temperature = 0.0;  // > 0 when sampled

    static Decoding greedy_mode() { return {true, 0.0}; }
    static Decoding sampled(double t) { return {false, t}; }
};

struct GenerationRequest {
    std::string prompt;
    Decoding decoding;
    std::vector<std::string> stop_markers;
    int max_tokens = 256;
    int sample_index = 0;  // distinguishes repeated sampled draws
};

struct EntailmentRequest {
    std::string premise;
    std::string hypothesis;
};

enum class EntailmentLabel { Entailed, Neutral, Contradicted };

struct EntailmentScore {
    double p_entail = 0.0;
    double p_neutral = 0.0;
    double p_contradict = 0.0;
};

/// Label against the gate threshold: entailed iff p_entail >= threshold.
EntailmentLabel label_for(const EntailmentScore& score, double threshold);

/// Truncate a continuation at the first occurrence of any stop marker.
std::string truncate_at_stop(const std::string& text,
                             const std::vector<std::string>& stop_markers);

class GenerationBackend {
public:
    virtual ~GenerationBackend() = default;
    virtual std::string generate(const GenerationRequest& request) = 0;
};

class EntailmentBackend {
public:
    virtual ~EntailmentBackend() = default;
    virtual EntailmentScore entail(const EntailmentRequest& request) = 0;
};

/// Replay backend. Continuations are keyed by (prompt hash, decoding,
/// sample index); a secondary rule list matches on prompt substrings for
/// fixtures where precomputing hashes is impractical. Read-only after
/// load, so safe for concurrent generate() calls.
class ScriptedGenerationBackend : public GenerationBackend {
public:
    ScriptedGenerationBackend() = default;

    /// Transcript file: one JSON object per line, either
    /// {"prompt_hash": "<hex>", "decoding": "greedy"|"t<temp>",
    ///  "sample_index": n, "text": ...} or {"prompt_contains": s, "text": ...}.
    static ScriptedGenerationBackend from_file(const std::filesystem::path& path);

    void add(const std::string& prompt, const Decoding& decoding, int sample_index,
             const std::string& text);
    void add_rule(const std::string& prompt_contains, const std::string& text);

    std::string generate(const GenerationRequest& request) override;

private:
    struct Key {
        std::uint64_t prompt_hash;
        std::string decoding;
        int sample_index;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, std::string> entries_;
    std::vector<std::pair<std::string, std::string>> rules_;
};

/// Deterministic NLI double: scores keyed by hypothesis, with an optional
/// default for unlisted hypotheses.
class ScriptedEntailmentBackend : public EntailmentBackend {
public:
    ScriptedEntailmentBackend() = default;

    /// Table file: one JSON object per line,
    /// {"hypothesis": s, "p_entail": x, "p_neutral": y, "p_contradict": z}.
    static ScriptedEntailmentBackend from_file(const std::filesystem::path& path);

    void set(const std::string& hypothesis, EntailmentScore score);
    void set_default(EntailmentScore score) { default_ = score; }

    EntailmentScore entail(const EntailmentRequest& request) override;

private:
    std::map<std::string, EntailmentScore> table_;
    std::optional<EntailmentScore> default_;
};

std::string decoding_key(const Decoding& decoding);

}  // namespace raqa
