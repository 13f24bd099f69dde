#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "raqa/eval.hpp"
#include "raqa/hash.hpp"
#include "raqa/selfask.hpp"

namespace {

const std::string kTraceText =
    "Are follow up questions needed here: Yes.\n"
    "Follow up: When was the first manned spaceflight?\n"
    "Intermediate answer: 12 April 1961\n"
    "Follow up: Who flew on that mission?\n"
    "Intermediate answer: Yuri Gagarin\n"
    "So the final answer is: Yuri Gagarin";

void BM_NormalizeAnswer(benchmark::State& state) {
    const std::string text = "The Quick, Brown Fox -- Jumped Over a Lazy Dog!";
    for (auto _ : state) {
        benchmark::DoNotOptimize(raqa::normalize_answer(text));
    }
}
BENCHMARK(BM_NormalizeAnswer);

void BM_TokenF1(benchmark::State& state) {
    const std::string pred = "the quick brown fox jumped over the lazy dog";
    const std::vector<std::string> golds = {"a quick brown fox leaps over a sleepy dog",
                                            "the fast brown fox"};
    for (auto _ : state) {
        benchmark::DoNotOptimize(raqa::token_f1(pred, golds));
    }
}
BENCHMARK(BM_TokenF1);

void BM_ParseTrace(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(raqa::parse_trace(kTraceText));
    }
}
BENCHMARK(BM_ParseTrace);

void BM_SerializeTrace(benchmark::State& state) {
    const raqa::DecompositionTrace trace = raqa::parse_trace(kTraceText);
    for (auto _ : state) {
        benchmark::DoNotOptimize(raqa::serialize_trace(trace));
    }
}
BENCHMARK(BM_SerializeTrace);

void BM_RenderPrompt(benchmark::State& state) {
    raqa::PromptVariant variant;
    variant.kind = raqa::VariantKind::SaR1;
    variant.instruction = "Answer with follow up questions and intermediate answers.";
    for (int i = 0; i < 6; ++i) {
        raqa::Exemplar ex;
        ex.contexts.append({"q", 1, "Title", "Some evidence text for the exemplar.",
                            raqa::NoiseTier::Top1, ""});
        ex.decomposition = raqa::parse_trace(kTraceText);
        ex.decomposition.question = "exemplar question " + std::to_string(i) + "?";
        variant.exemplars.push_back(ex);
    }
    raqa::ContextBundle contexts;
    contexts.append({"q", 1, "Title", "Inference-time evidence.", raqa::NoiseTier::Top1, ""});
    const raqa::DecompositionTrace partial = raqa::parse_trace(kTraceText);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            raqa::render_prompt(variant, contexts, "inference question?", partial));
    }
}
BENCHMARK(BM_RenderPrompt);

void BM_Fnv1a64(benchmark::State& state) {
    const std::string prompt(4096, 'x');
    for (auto _ : state) {
        benchmark::DoNotOptimize(raqa::fnv1a64(prompt));
    }
}
BENCHMARK(BM_Fnv1a64);

}  // namespace

BENCHMARK_MAIN();
