#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "raqa/types.hpp"

namespace raqa {

/// Query not present in the index; retrieval never silently returns an
/// empty context.
class CacheMissError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class NoiseMode { AlwaysTop1, AlwaysLowRank, AlwaysRandom, UniformMix };

NoiseMode noise_mode_from_string(const std::string& name);
std::string to_string(NoiseMode mode);

struct NoisePolicy {
    NoiseMode mode = NoiseMode::AlwaysTop1;
    std::uint64_t seed = 0;
};

/// Always* modes are constant; UniformMix draws each tier with
/// probability 1/3, independently per call.
NoiseTier draw_tier(const NoisePolicy& policy, std::mt19937_64& rng);

enum class Corpus { Web, Local };

/// Web queries are scoped to Wikipedia ("en.wikipedia.org {question}",
/// whitespace-normalized); local corpora take the question unchanged.
std::string format_query(const std::string& question, Corpus corpus);

/// Snapshot of ranked retrieval results, read-only after load.
/// Ranked lists are kept sorted ascending by rank; the rank-1 snippet of
/// every query doubles as the pool for the Random tier.
class RetrievalIndex {
public:
    RetrievalIndex() = default;

    static RetrievalIndex load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Add one ranked result list for a query (re-sorted by rank).
    void add(const std::string& query, std::vector<EvidenceSnippet> ranked);

    bool contains(const std::string& query) const;
    std::size_t query_count() const { return by_query_.size(); }

    /// Top1 -> the rank-1 snippet; LowRank -> the lowest-ranked stored
    /// snippet (errors when only one hit exists); Random -> a uniform draw
    /// from the rank-1 pool excluding snippets retrieved for this query.
    /// The chosen tier is recorded on the returned snippet.
    EvidenceSnippet retrieve(const std::string& query, NoiseTier tier,
                             std::mt19937_64& rng) const;

    /// Mean rank of each query's lowest-ranked result, for index reports.
    double average_low_rank() const;
    /// Queries with a single hit, for which LowRank is unavailable.
    std::vector<std::string> single_hit_queries() const;

private:
    std::map<std::string, std::vector<EvidenceSnippet>> by_query_;
    std::vector<EvidenceSnippet> top1_pool_;
};

}  // namespace raqa
