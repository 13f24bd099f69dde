#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "raqa/backends.hpp"
#include "raqa/nligate.hpp"
#include "raqa/retrieval.hpp"
#include "raqa/selfask.hpp"
#include "raqa/types.hpp"

namespace raqa {

/// One decomposition step is a (follow-up, intermediate answer) pair or
/// the final answer; generation stops after kMaxGenerationSteps of them.
inline constexpr int kMaxGenerationSteps = 5;

struct StepEvent {
    std::string example_id;
    int step = 0;
    std::uint64_t prompt_hash = 0;
    std::optional<NoiseTier> tier;
    long long latency_ms = 0;
};

struct ControllerConfig {
    std::uint64_t seed = 0;
    int max_tokens = 256;
    double gate_threshold = kDefaultEntailmentThreshold;
    std::function<void(const StepEvent&)> on_step;  // optional event sink
};

/// Run the interleaved decomposition loop for one example: retrieve for
/// the original question, then alternate generation and retrieval for each
/// follow-up until the final answer or the step limit. Backend transport
/// errors propagate; intermediate-question cache misses mark the trace
/// failed with a diagnostic instead.
DecompositionTrace answer_question(const QaExample& example, const PromptVariant& variant,
                                   const NoisePolicy& policy, bool use_retrieval,
                                   GenerationBackend& backend, const RetrievalIndex* index,
                                   const ControllerConfig& config = {});

struct BackoffResult {
    DecompositionTrace chosen;
    GateDecision gate;
};

/// Generate once with retrieval and once without (the SA-NR prompt), gate
/// the retrieved trace through NLI, and return the retrieved trace only on
/// Accept. A failed retrieved trace bypasses the gate and backs off
/// directly. Always returns a trace.
BackoffResult answer_with_nli_backoff(const QaExample& example,
                                      const PromptVariant& ralm_variant,
                                      const PromptVariant& nr_variant,
                                      const NoisePolicy& policy,
                                      GenerationBackend& gen_backend,
                                      EntailmentBackend& entail_backend,
                                      const RetrievalIndex& index,
                                      const ControllerConfig& config = {});

}  // namespace raqa
