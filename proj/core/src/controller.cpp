#include "raqa/controller.hpp"

#include <chrono>
#include <sstream>

#include "raqa/hash.hpp"

namespace raqa {

namespace {

// Generation is split in two phases per decomposition step so evidence for
// a follow-up can be retrieved before its intermediate answer is produced:
// phase A yields the next follow-up (or the final answer) and stops before
// any intermediate answer; phase B yields the intermediate answer and stops
// before the next follow-up.
const std::vector<std::string> kStopsFollowUpPhase = {"\nIntermediate answer:", "\n#"};
const std::vector<std::string> kStopsAnswerPhase = {"\nFollow up:", "\nSo the final answer is:",
                                                    "\n#"};

struct Segment {
    StepKind kind;
    std::string payload;
};

std::vector<Segment> parse_segments(const std::string& text) {
    std::vector<Segment> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const ParsedStep step = parse_step(line);
        out.push_back({step.kind, step.payload});
    }
    return out;
}

}  // namespace

DecompositionTrace answer_question(const QaExample& example, const PromptVariant& variant,
                                   const NoisePolicy& policy, bool use_retrieval,
                                   GenerationBackend& backend, const RetrievalIndex* index,
                                   const ControllerConfig& config) {
    DecompositionTrace trace;
    trace.question = example.question;
    trace.used_retrieval = use_retrieval;

    std::string raw;
    auto fail = [&](const std::string& reason) {
        trace.failed = true;
        trace.failure_reason = reason;
        trace.final_answer.reset();
        trace.raw_text = raw;
        return trace;
    };

    std::uint64_t retrieval_idx = 0;
    auto retrieve_for = [&](const std::string& query) {
        auto rng = derive_rng(policy.seed, example.id, retrieval_idx);
        const NoiseTier tier = draw_tier(policy, rng);
        ++retrieval_idx;
        EvidenceSnippet snippet = index->retrieve(query, tier, rng);
        trace.contexts.append(snippet);
        return snippet.tier;
    };

    // The retriever is called for the original question up front. A miss is
    // recorded as a failed trace, like misses on intermediate questions.
    if (use_retrieval) {
        try {
            retrieve_for(example.question);
        } catch (const CacheMissError& e) {
            return fail(std::string("cache miss: ") + e.what());
        }
    }

    auto generate = [&](const std::string& prompt, const std::vector<std::string>& stops,
                        int step, std::optional<NoiseTier> tier) {
        const auto t0 = std::chrono::steady_clock::now();
        GenerationRequest request{prompt, Decoding::greedy_mode(), stops, config.max_tokens, 0};
        std::string text = backend.generate(request);
        if (config.on_step) {
            const auto t1 = std::chrono::steady_clock::now();
            config.on_step({example.id, step, fnv1a64(prompt), tier,
                            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                                .count()});
        }
        raw += text;
        if (!raw.empty() && raw.back() != '\n') raw += "\n";
        return text;
    };

    const ContextBundle empty_bundle;
    for (int slot = 0; slot < kMaxGenerationSteps; ++slot) {
        const ContextBundle& visible = use_retrieval ? trace.contexts : empty_bundle;
        const std::string prompt_a = render_prompt(variant, visible, example.question, trace);
        const std::string cont_a = generate(prompt_a, kStopsFollowUpPhase, slot, std::nullopt);

        std::optional<std::string> follow_up;
        std::optional<std::string> final_answer;
        for (const Segment& seg : parse_segments(cont_a)) {
            if (seg.kind == StepKind::FollowUp) {
                follow_up = seg.payload;
                break;
            }
            if (seg.kind == StepKind::FinalAnswer) {
                final_answer = seg.payload;
                break;
            }
            if (seg.kind == StepKind::IntermediateAnswer) {
                return fail("intermediate answer without a follow-up");
            }
            if (seg.kind == StepKind::Unparseable) {
                return fail("unparseable segment: " + seg.payload);
            }
            // Yes./No. preamble lines carry no payload; keep scanning.
        }

        if (final_answer) {
            trace.final_answer = *final_answer;
            trace.failed = false;
            trace.raw_text = serialize_trace(trace);
            return trace;
        }
        if (!follow_up) return fail("no structural marker in generation");

        std::optional<NoiseTier> tier;
        if (use_retrieval) {
            try {
                tier = retrieve_for(*follow_up);
            } catch (const CacheMissError& e) {
                // Recorded, not raised: noise conditions stay uniform.
                return fail(std::string("cache miss: ") + e.what());
            }
        }

        const ContextBundle& visible_b = use_retrieval ? trace.contexts : empty_bundle;
        const std::string prompt_b =
            render_prompt(variant, visible_b, example.question, trace, *follow_up);
        const std::string cont_b = generate(prompt_b, kStopsAnswerPhase, slot, tier);

        std::optional<std::string> intermediate;
        for (const Segment& seg : parse_segments(cont_b)) {
            if (seg.kind == StepKind::IntermediateAnswer) {
                intermediate = seg.payload;
                break;
            }
            if (seg.kind == StepKind::FollowUp) {
                return fail("two follow-ups without an intermediate answer");
            }
            if (seg.kind == StepKind::FinalAnswer) {
                return fail("final answer while a follow-up is unanswered");
            }
            if (seg.kind == StepKind::Unparseable) {
                return fail("unparseable segment: " + seg.payload);
            }
        }
        if (!intermediate) return fail("no intermediate answer produced");
        trace.steps.push_back({*follow_up, *intermediate});
    }

    return fail("no final answer within " + std::to_string(kMaxGenerationSteps) +
                " generation steps");
}

BackoffResult answer_with_nli_backoff(const QaExample& example,
                                      const PromptVariant& ralm_variant,
                                      const PromptVariant& nr_variant,
                                      const NoisePolicy& policy,
                                      GenerationBackend& gen_backend,
                                      EntailmentBackend& entail_backend,
                                      const RetrievalIndex& index,
                                      const ControllerConfig& config) {
    DecompositionTrace ralm =
        answer_question(example, ralm_variant, policy, true, gen_backend, &index, config);
    DecompositionTrace fallback =
        answer_question(example, nr_variant, policy, false, gen_backend, nullptr, config);

    GateDecision gate;
    if (ralm.failed) {
        gate.verdict = Verdict::BackOff;
        gate.backoff_reason = "failure: " + ralm.failure_reason;
    } else {
        gate = evaluate(ralm, ralm.contexts, entail_backend, config.gate_threshold);
    }
    gate.ralm_trace = ralm;
    gate.fallback_trace = fallback;

    BackoffResult result;
    result.chosen = gate.verdict == Verdict::Accept ? ralm : fallback;
    result.gate = std::move(gate);
    return result;
}

}  // namespace raqa
