#include "raqa/nligate.hpp"

#include <algorithm>

namespace raqa {

double GateDecision::min_p_entail() const {
    double min_p = 1.0;
    for (const GateCheck& check : checks) min_p = std::min(min_p, check.score.p_entail);
    return checks.empty() ? 0.0 : min_p;
}

std::string build_hypothesis(const std::string& question, const std::string& answer) {
    if (question.empty() || answer.empty()) {
        throw InputError("hypothesis requires a non-empty question and answer");
    }
    return "Q: " + question + " A: " + answer;
}

std::string build_premise(const ContextBundle& contexts, PremiseScope scope) {
    if (contexts.empty()) throw InputError("cannot build a premise from an empty bundle");
    if (scope == PremiseScope::PerStep) return contexts.snippets.front().text;
    std::string out;
    for (const EvidenceSnippet& s : contexts.snippets) {
        if (!out.empty()) out += "\n";
        out += s.text;
    }
    return out;
}

GateDecision evaluate(const DecompositionTrace& trace, const ContextBundle& contexts,
                      EntailmentBackend& backend, double threshold) {
    if (trace.failed || !trace.final_answer) {
        throw InputError("cannot gate a failed trace");
    }

    // Single-hop: one check against the single retrieved snippet.
    // Multi-hop: the full bundle is the premise for every check.
    const bool multi_hop = !trace.steps.empty();
    const std::string premise =
        build_premise(contexts, multi_hop ? PremiseScope::All : PremiseScope::PerStep);

    GateDecision decision;
    for (const DecompStep& step : trace.steps) {
        GateCheck check;
        check.hypothesis = build_hypothesis(step.follow_up, step.intermediate_answer);
        check.premise = premise;
        check.score = backend.entail({premise, check.hypothesis});
        decision.checks.push_back(std::move(check));
    }
    GateCheck final_check;
    final_check.hypothesis = build_hypothesis(trace.question, *trace.final_answer);
    final_check.premise = premise;
    final_check.score = backend.entail({premise, final_check.hypothesis});
    decision.checks.push_back(std::move(final_check));

    const bool all_entailed = std::all_of(
        decision.checks.begin(), decision.checks.end(),
        [&](const GateCheck& c) { return c.score.p_entail >= threshold; });
    if (all_entailed) {
        decision.verdict = Verdict::Accept;
    } else {
        decision.verdict = Verdict::BackOff;
        decision.backoff_reason = "not entailed";
    }
    return decision;
}

BucketTable bucket_entailment(const std::vector<BucketInput>& decisions) {
    BucketTable table;
    table.total = decisions.size();
    if (decisions.empty()) return table;

    auto add = [](BucketRow& row, const BucketInput& d) {
        ++row.count;
        row.mean_delta += d.with_retrieval_score - d.without_retrieval_score;
    };
    for (const BucketInput& d : decisions) {
        if (d.min_p_entail < 1.0 / 3.0) {
            add(table.low, d);
        } else if (d.min_p_entail <= 2.0 / 3.0) {
            add(table.medium, d);
        } else {
            add(table.high, d);
        }
    }
    for (BucketRow* row : {&table.low, &table.medium, &table.high}) {
        if (row->count > 0) row->mean_delta /= static_cast<double>(row->count);
        row->share = static_cast<double>(row->count) / static_cast<double>(table.total);
    }
    return table;
}

}  // namespace raqa
