#include "raqa/datagen.hpp"

#include <algorithm>

#include "raqa/controller.hpp"
#include "raqa/eval.hpp"
#include "raqa/hash.hpp"

namespace raqa {

namespace {

const NoisePolicy kUniformPolicy{NoiseMode::UniformMix, 0};

/// The dataset's metric-match rule: EM (with aliases) and order-of-magnitude
/// demand a full score; token-F1 datasets accept a majority token overlap.
bool answer_matches(const std::string& answer, const QaExample& example) {
    RunRecord record;
    record.dataset = example.dataset;
    record.trace.question = example.question;
    record.trace.final_answer = answer;
    const double score = score_run(record, example);
    return metric_for(example.dataset) == Metric::TokenF1 ? score >= 0.5 : score == 1.0;
}

bool contains_gold_intermediates(const DecompositionTrace& trace, const QaExample& example) {
    for (const std::string& gold : example.intermediate_answers) {
        const std::string needle = normalize_answer(gold);
        const bool found = std::any_of(
            trace.steps.begin(), trace.steps.end(), [&](const DecompStep& step) {
                return normalize_answer(step.intermediate_answer).find(needle) !=
                       std::string::npos;
            });
        if (!found) return false;
    }
    return true;
}

std::string final_answer_line(const std::string& answer) {
    return std::string(kFinalMarker) + " " + answer;
}

}  // namespace

bool verify_answerable(const QaExample& example, const PromptVariant& nr_variant,
                       GenerationBackend& backend) {
    const DecompositionTrace trace =
        answer_question(example, nr_variant, kUniformPolicy, false, backend, nullptr);
    if (trace.failed || !trace.final_answer) return false;
    return answer_matches(*trace.final_answer, example);
}

std::vector<TrainingExample> gen_single_hop(const std::vector<QaExample>& examples,
                                            const PromptVariant& nr_variant,
                                            GenerationBackend& backend,
                                            const RetrievalIndex& index,
                                            std::uint64_t seed,
                                            const GenerationBudget& budget,
                                            DatagenStats* stats) {
    DatagenStats local;
    DatagenStats& s = stats ? *stats : local;

    std::vector<TrainingExample> out;
    for (const QaExample& example : examples) {
        if (s.questions_kept >= static_cast<std::size_t>(budget.max_questions_single_hop)) {
            break;
        }
        ++s.questions_considered;
        if (!verify_answerable(example, nr_variant, backend)) {
            ++s.filtered_unanswerable;
            continue;
        }

        auto rng = derive_rng(seed, example.id, 0);
        const NoiseTier tier = draw_tier(kUniformPolicy, rng);
        EvidenceSnippet snippet;
        try {
            snippet = index.retrieve(example.question, tier, rng);
        } catch (const CacheMissError&) {
            ++s.skipped_cache_miss;
            continue;
        }

        ContextBundle bundle;
        bundle.append(snippet);
        TrainingExample te;
        te.question_id = example.id;
        te.step_index = 0;
        te.input_text = render_context_lines(bundle) + "\n" + std::string(kQuestionMarker) +
                        " " + example.question + "\n" + std::string(kNoFollowUpMarker) + "\n";
        te.target_text = final_answer_line(example.gold_answers.front());
        te.tiers_used = {tier};
        out.push_back(std::move(te));
        ++s.questions_kept;
        ++s.examples_emitted;
    }

    std::sort(out.begin(), out.end(), [](const TrainingExample& a, const TrainingExample& b) {
        return std::tie(a.question_id, a.step_index) < std::tie(b.question_id, b.step_index);
    });
    return out;
}

std::vector<std::pair<std::string, std::string>> split_steps(
    const DecompositionTrace& trace, const ContextBundle& contexts) {
    if (trace.failed || !trace.final_answer) {
        throw InputError("cannot split a failed trace");
    }
    const std::size_t n = trace.steps.size();
    if (!contexts.empty() && contexts.size() != n + 1) {
        throw InputError("context bundle must be empty or hold one snippet per query");
    }

    auto prefix_for = [&](std::size_t visible, const std::string& generated) {
        std::string input;
        if (!contexts.empty()) {
            ContextBundle view;
            view.snippets.assign(contexts.snippets.begin(),
                                 contexts.snippets.begin() + static_cast<long>(visible));
            input += render_context_lines(view) + "\n";
        }
        input += std::string(kQuestionMarker) + " " + trace.question + "\n";
        input += generated;
        return input;
    };

    std::vector<std::pair<std::string, std::string>> pairs;
    if (n == 0) {
        const std::string generated = std::string(kNoFollowUpMarker) + "\n";
        pairs.emplace_back(prefix_for(contexts.empty() ? 0 : 1, generated),
                           final_answer_line(*trace.final_answer));
        return pairs;
    }

    std::string generated = std::string(kYesFollowUpMarker) + "\n";
    for (std::size_t i = 0; i < n; ++i) {
        // The snippet for follow-up i is retrieved after the follow-up is
        // generated, so it becomes visible only for the answer target.
        const std::size_t visible_fu = contexts.empty() ? 0 : i + 1;
        const std::string fu_line = std::string(kFollowUpMarker) + " " + trace.steps[i].follow_up;
        pairs.emplace_back(prefix_for(visible_fu, generated), fu_line);
        generated += fu_line + "\n";

        const std::size_t visible_ia = contexts.empty() ? 0 : i + 2;
        const std::string ia_line =
            std::string(kIntermediateMarker) + " " + trace.steps[i].intermediate_answer;
        pairs.emplace_back(prefix_for(visible_ia, generated), ia_line);
        generated += ia_line + "\n";
    }
    pairs.emplace_back(prefix_for(contexts.empty() ? 0 : n + 1, generated),
                       final_answer_line(*trace.final_answer));
    return pairs;
}

std::vector<TrainingExample> gen_multi_hop(const std::vector<QaExample>& examples,
                                           const PromptVariant& nr_variant,
                                           GenerationBackend& backend,
                                           const RetrievalIndex& index,
                                           std::uint64_t seed, MultiHopMode mode,
                                           const GenerationBudget& budget,
                                           DatagenStats* stats) {
    DatagenStats local;
    DatagenStats& s = stats ? *stats : local;

    std::vector<TrainingExample> out;
    for (const QaExample& example : examples) {
        if (s.questions_kept >= static_cast<std::size_t>(budget.max_questions_multi_hop)) {
            break;
        }
        ++s.questions_considered;
        if (mode == MultiHopMode::GoldIntermediate && example.intermediate_answers.empty()) {
            throw InputError("gold-intermediate mode requires intermediate_answers on " +
                             example.id);
        }

        const std::string prompt =
            render_prompt(nr_variant, {}, example.question, DecompositionTrace{});
        std::vector<DecompositionTrace> samples;
        for (int i = 0; i < budget.samples_per_question; ++i) {
            GenerationRequest request;
            request.prompt = prompt;
            request.decoding = i == 0 ? Decoding::greedy_mode() : Decoding::sampled(0.7);
            request.stop_markers = {"\n#"};
            request.max_tokens = 1024;
            request.sample_index = i;
            samples.push_back(parse_trace(backend.generate(request)));
        }
        const DecompositionTrace& greedy = samples.front();

        bool keep = false;
        if (mode == MultiHopMode::SelfConsistency) {
            // Unparseable samples count as disagreeing.
            keep = std::all_of(samples.begin(), samples.end(), [&](const auto& t) {
                return !t.failed && t.final_answer && answer_matches(*t.final_answer, example);
            });
        } else {
            keep = !greedy.failed && greedy.final_answer &&
                   answer_matches(*greedy.final_answer, example) &&
                   contains_gold_intermediates(greedy, example);
        }
        if (!keep) {
            ++s.filtered_disagreement;
            continue;
        }

        DecompositionTrace kept = greedy;
        kept.question = example.question;

        ContextBundle bundle;
        std::vector<NoiseTier> tiers;
        bool miss = false;
        for (std::size_t k = 0; k <= kept.steps.size(); ++k) {
            const std::string& query =
                k == 0 ? example.question : kept.steps[k - 1].follow_up;
            auto rng = derive_rng(seed, example.id, k);
            const NoiseTier tier = draw_tier(kUniformPolicy, rng);
            try {
                bundle.append(index.retrieve(query, tier, rng));
            } catch (const CacheMissError&) {
                miss = true;
                break;
            }
            tiers.push_back(tier);
        }
        if (miss) {
            ++s.skipped_cache_miss;
            continue;
        }

        int step_index = 0;
        for (auto& [input, target] : split_steps(kept, bundle)) {
            TrainingExample te;
            te.question_id = example.id;
            te.step_index = step_index++;
            te.input_text = std::move(input);
            te.target_text = std::move(target);
            te.tiers_used = tiers;
            out.push_back(std::move(te));
            ++s.examples_emitted;
        }
        ++s.questions_kept;
    }

    std::sort(out.begin(), out.end(), [](const TrainingExample& a, const TrainingExample& b) {
        return std::tie(a.question_id, a.step_index) < std::tie(b.question_id, b.step_index);
    });
    return out;
}

}  // namespace raqa
