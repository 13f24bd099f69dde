#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "raqa/backends.hpp"
#include "raqa/retrieval.hpp"
#include "raqa/selfask.hpp"
#include "raqa/types.hpp"

namespace raqa {

/// One fine-tuning pair: the rendered context+prefix and the next
/// Self-Ask line(s) the model should produce.
struct TrainingExample {
    std::string question_id;
    int step_index = 0;
    std::string input_text;
    std::string target_text;
    std::vector<NoiseTier> tiers_used;
};

struct GenerationBudget {
    int max_questions_single_hop = 1000;
    int max_questions_multi_hop = 500;
    int samples_per_question = 5;  // 1 greedy + 4 sampled
};

enum class MultiHopMode { GoldIntermediate, SelfConsistency };

struct DatagenStats {
    std::size_t questions_considered = 0;
    std::size_t filtered_unanswerable = 0;
    std::size_t filtered_disagreement = 0;
    std::size_t skipped_cache_miss = 0;
    std::size_t questions_kept = 0;
    std::size_t examples_emitted = 0;

    double acceptance_rate() const {
        return questions_considered == 0
                   ? 0.0
                   : static_cast<double>(questions_kept) / questions_considered;
    }
};

/// True iff the no-retrieval greedy answer matches gold under the
/// dataset's metric-match rule (EM with aliases for EM datasets).
bool verify_answerable(const QaExample& example, const PromptVariant& nr_variant,
                       GenerationBackend& backend);

/// Single-hop corpus: one example per answerable question, context tier
/// drawn uniformly from the three tiers, target = the gold answer line.
/// Cache misses are skipped and counted. Capped at the single-hop budget.
std::vector<TrainingExample> gen_single_hop(const std::vector<QaExample>& examples,
                                            const PromptVariant& nr_variant,
                                            GenerationBackend& backend,
                                            const RetrievalIndex& index,
                                            std::uint64_t seed,
                                            const GenerationBudget& budget = {},
                                            DatagenStats* stats = nullptr);

/// Multi-hop corpus: per question, 1 greedy + 4 temperature-0.7
/// decompositions via the SA-NR prompt. GoldIntermediate keeps the greedy
/// decomposition when its final answer matches gold and its intermediate
/// answers contain the gold intermediates; SelfConsistency keeps it when
/// all samples reach the gold answer. Kept decompositions are split into
/// per-step examples with tiers drawn independently per step.
std::vector<TrainingExample> gen_multi_hop(const std::vector<QaExample>& examples,
                                           const PromptVariant& nr_variant,
                                           GenerationBackend& backend,
                                           const RetrievalIndex& index,
                                           std::uint64_t seed, MultiHopMode mode,
                                           const GenerationBudget& budget = {},
                                           DatagenStats* stats = nullptr);

/// Split a non-failed trace into per-step (input, target) pairs. Targets
/// are, in order, each follow-up line, each intermediate-answer line, and
/// the final-answer line; each input is the context lines visible at that
/// point plus the question and the previously generated lines. The bundle
/// must be empty (no retrieval) or hold 1 + steps snippets (one for the
/// original question, one per follow-up, in retrieval order).
std::vector<std::pair<std::string, std::string>> split_steps(
    const DecompositionTrace& trace, const ContextBundle& contexts);

}  // namespace raqa
