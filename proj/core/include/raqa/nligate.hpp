#pragma once

#include <string>
#include <vector>

#include "raqa/backends.hpp"
#include "raqa/types.hpp"

namespace raqa {

inline constexpr double kDefaultEntailmentThreshold = 0.5;

enum class Verdict { Accept, BackOff };

struct GateCheck {
    std::string hypothesis;
    std::string premise;
    EntailmentScore score;
};

struct GateDecision {
    std::vector<GateCheck> checks;
    Verdict verdict = Verdict::BackOff;
    std::string backoff_reason;  // set when verdict == BackOff
    DecompositionTrace ralm_trace;
    DecompositionTrace fallback_trace;

    /// Decision statistic for the entailment-probability buckets.
    double min_p_entail() const;
};

/// "Q: {question} A: {answer}" — literal template, no punctuation repair.
std::string build_hypothesis(const std::string& question, const std::string& answer);

enum class PremiseScope { PerStep, All };

/// Snippet texts in retrieval order; PerStep uses only the first snippet,
/// All newline-joins the whole bundle. Errors on an empty bundle.
std::string build_premise(const ContextBundle& contexts, PremiseScope scope);

/// One check per intermediate (follow-up, answer) pair plus one for the
/// (original question, final answer); Accept iff every check reaches the
/// threshold. Single-hop traces use the single retrieved snippet as
/// premise, multi-hop traces the full bundle for every check.
GateDecision evaluate(const DecompositionTrace& trace, const ContextBundle& contexts,
                      EntailmentBackend& backend,
                      double threshold = kDefaultEntailmentThreshold);

/// Input row for the entailment-probability buckets: the decision
/// statistic paired with the with-/without-retrieval scores of the run.
struct BucketInput {
    double min_p_entail = 0.0;
    double with_retrieval_score = 0.0;
    double without_retrieval_score = 0.0;
};

struct BucketRow {
    std::size_t count = 0;
    double share = 0.0;       // fraction of all decisions
    double mean_delta = 0.0;  // mean (with - without) accuracy
};

/// Buckets at < 1/3, [1/3, 2/3], > 2/3.
struct BucketTable {
    BucketRow low, medium, high;
    std::size_t total = 0;
};

BucketTable bucket_entailment(const std::vector<BucketInput>& decisions);

}  // namespace raqa
