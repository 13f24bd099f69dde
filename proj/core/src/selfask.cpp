#include "raqa/selfask.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace raqa {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

ParsedStep parse_step(std::string_view text) {
    const std::string_view t = trim(text);
    if (t.empty()) return {StepKind::Unparseable, ""};
    if (t == kNoFollowUpMarker) return {StepKind::NoFollowUpNeeded, ""};
    if (t == kYesFollowUpMarker) return {StepKind::FollowUpsNeeded, ""};
    if (starts_with(t, kFollowUpMarker)) {
        return {StepKind::FollowUp, std::string(trim(t.substr(kFollowUpMarker.size())))};
    }
    if (starts_with(t, kIntermediateMarker)) {
        return {StepKind::IntermediateAnswer,
                std::string(trim(t.substr(kIntermediateMarker.size())))};
    }
    if (starts_with(t, kFinalMarker)) {
        return {StepKind::FinalAnswer, std::string(trim(t.substr(kFinalMarker.size())))};
    }
    return {StepKind::Unparseable, std::string(t)};
}

DecompositionTrace parse_trace(const std::string& text) {
    DecompositionTrace trace;
    trace.raw_text = text;

    std::optional<std::string> pending;
    bool saw_marker = false;
    auto fail = [&](const std::string& reason) {
        trace.failed = true;
        trace.failure_reason = reason;
        trace.final_answer.reset();
        return trace;
    };

    for (const std::string& raw : split_lines(text)) {
        if (trim(raw).empty()) continue;
        const ParsedStep step = parse_step(raw);
        switch (step.kind) {
            case StepKind::NoFollowUpNeeded:
            case StepKind::FollowUpsNeeded:
                saw_marker = true;
                break;
            case StepKind::FollowUp:
                saw_marker = true;
                if (pending) return fail("two follow-ups without an intermediate answer");
                pending = step.payload;
                break;
            case StepKind::IntermediateAnswer:
                saw_marker = true;
                if (!pending) return fail("intermediate answer without a follow-up");
                trace.steps.push_back({*pending, step.payload});
                pending.reset();
                break;
            case StepKind::FinalAnswer:
                saw_marker = true;
                if (pending) return fail("final answer with an unanswered follow-up");
                trace.final_answer = step.payload;
                return trace;
            case StepKind::Unparseable:
                return fail("unparseable segment: " + step.payload);
        }
    }
    if (!saw_marker) return fail("no Self-Ask markers found");
    return fail("no final answer");
}

std::string serialize_trace(const DecompositionTrace& trace) {
    if (trace.steps.empty() && !trace.final_answer) return "";

    std::string out;
    if (trace.steps.empty()) {
        out += std::string(kNoFollowUpMarker);
    } else {
        out += std::string(kYesFollowUpMarker);
        for (const DecompStep& step : trace.steps) {
            out += "\n";
            out += std::string(kFollowUpMarker) + " " + step.follow_up;
            out += "\n";
            out += std::string(kIntermediateMarker) + " " + step.intermediate_answer;
        }
    }
    if (trace.final_answer) {
        out += "\n";
        out += std::string(kFinalMarker) + " " + *trace.final_answer;
    }
    return out;
}

VariantKind variant_from_string(const std::string& name) {
    if (name == "sa-nr") return VariantKind::SaNr;
    if (name == "sa-r1" || name == "sa-r@1") return VariantKind::SaR1;
    if (name == "sa-r10" || name == "sa-r@10") return VariantKind::SaR10;
    if (name == "sa-rmix") return VariantKind::SaRMix;
    throw InputError("unknown prompt variant: " + name);
}

std::string to_string(VariantKind kind) {
    switch (kind) {
        case VariantKind::SaNr: return "sa-nr";
        case VariantKind::SaR1: return "sa-r1";
        case VariantKind::SaR10: return "sa-r10";
        case VariantKind::SaRMix: return "sa-rmix";
    }
    return "sa-nr";
}

namespace {

bool is_context_line(std::string_view line) {
    if (!starts_with(line, kContextMarker)) return false;
    std::size_t i = kContextMarker.size();
    if (i >= line.size() || !std::isdigit(static_cast<unsigned char>(line[i]))) return false;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    return i < line.size() && line[i] == ':';
}

EvidenceSnippet parse_context_line(std::string_view line, VariantKind kind) {
    const std::size_t colon = line.find(':');
    std::string_view payload = trim(line.substr(colon + 1));
    EvidenceSnippet s;
    const std::size_t sep = payload.find(": ");
    if (sep != std::string_view::npos) {
        s.title = std::string(payload.substr(0, sep));
        s.text = std::string(trim(payload.substr(sep + 2)));
    } else {
        s.text = std::string(payload);
    }
    if (kind == VariantKind::SaR10) {
        s.tier = NoiseTier::LowRank;
        s.rank = 10;
    } else {
        s.tier = NoiseTier::Top1;
        s.rank = 1;
    }
    s.source = "exemplar";
    return s;
}

Exemplar parse_exemplar_block(const std::vector<std::string>& lines, VariantKind kind,
                              const std::filesystem::path& path) {
    Exemplar ex;
    std::size_t i = 0;
    while (i < lines.size() && is_context_line(trim(lines[i]))) {
        ex.contexts.append(parse_context_line(trim(lines[i]), kind));
        ++i;
    }
    if (i >= lines.size() || !starts_with(trim(lines[i]), kQuestionMarker)) {
        throw InputError("exemplar block without a Question line in " + path.string());
    }
    const std::string question(trim(trim(lines[i]).substr(kQuestionMarker.size())));
    ++i;

    std::string body;
    for (; i < lines.size(); ++i) {
        if (!body.empty()) body += "\n";
        body += lines[i];
    }
    ex.decomposition = parse_trace(body);
    ex.decomposition.question = question;
    for (EvidenceSnippet& s : ex.contexts.snippets) s.query = question;
    if (ex.decomposition.failed) {
        throw InputError("exemplar decomposition does not parse in " + path.string() + ": " +
                         ex.decomposition.failure_reason);
    }
    if (kind == VariantKind::SaNr && !ex.contexts.empty()) {
        throw InputError("SA-NR exemplar carries context lines in " + path.string());
    }
    if (kind != VariantKind::SaNr && ex.contexts.empty()) {
        throw InputError("retrieval-variant exemplar without context lines in " + path.string());
    }
    return ex;
}

}  // namespace

PromptVariant load_prompt_file(const std::filesystem::path& path, VariantKind kind) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open prompt file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();

    std::vector<std::vector<std::string>> blocks(1);
    for (const std::string& line : split_lines(buffer.str())) {
        if (trim(line) == "#") {
            blocks.emplace_back();
        } else {
            blocks.back().push_back(line);
        }
    }

    auto block_text = [](const std::vector<std::string>& b) {
        std::string t;
        for (const auto& l : b) {
            if (!t.empty()) t += "\n";
            t += l;
        }
        return std::string(trim(t));
    };

    PromptVariant variant;
    variant.kind = kind;
    variant.instruction = block_text(blocks[0]);
    if (variant.instruction.empty()) {
        throw InputError("prompt file has an empty instruction block: " + path.string());
    }
    for (std::size_t b = 1; b < blocks.size(); ++b) {
        const std::string text = block_text(blocks[b]);
        if (text.empty()) continue;
        // Trailing "Question:" placeholder marks the inference slot.
        if (trim(text) == kQuestionMarker || starts_with(text, kQuestionMarker)) {
            const auto rest = trim(std::string_view(text).substr(kQuestionMarker.size()));
            if (rest.empty()) continue;
        }
        variant.exemplars.push_back(parse_exemplar_block(blocks[b], kind, path));
    }
    if (variant.exemplars.empty()) {
        throw InputError("prompt file contains no exemplars: " + path.string());
    }
    return variant;
}

PromptVariant make_rmix(const PromptVariant& r1, const PromptVariant& r10) {
    if (r1.exemplars.size() != r10.exemplars.size()) {
        throw InputError("SA-RMix requires equally sized R@1 and R@10 exemplar libraries");
    }
    PromptVariant mix;
    mix.kind = VariantKind::SaRMix;
    mix.instruction = r1.instruction;
    for (std::size_t i = 0; i < r1.exemplars.size(); ++i) {
        // 1-indexed: odd positions Top1, even positions LowRank.
        mix.exemplars.push_back(i % 2 == 0 ? r1.exemplars[i] : r10.exemplars[i]);
    }
    return mix;
}

void validate_exemplar_count(const PromptVariant& variant, Dataset dataset) {
    std::size_t expected = 6;
    if (dataset == Dataset::Fermi) expected = 5;
    if (dataset == Dataset::Bamboogle) expected = 4;
    if (variant.exemplars.size() != expected) {
        throw InputError("expected " + std::to_string(expected) + " exemplars for " +
                         to_string(dataset) + ", got " +
                         std::to_string(variant.exemplars.size()));
    }
}

std::string render_context_lines(const ContextBundle& contexts, int start_index) {
    std::string out;
    int n = start_index;
    for (const EvidenceSnippet& s : contexts.snippets) {
        if (!out.empty()) out += "\n";
        out += "Context" + std::to_string(n++) + ": ";
        if (!s.title.empty()) out += s.title + ": ";
        out += s.text;
    }
    return out;
}

std::string render_prompt(const PromptVariant& variant, const ContextBundle& contexts,
                          const std::string& question, const DecompositionTrace& partial,
                          const std::string& pending_follow_up) {
    std::string out = variant.instruction + "\n#\n";
    for (const Exemplar& ex : variant.exemplars) {
        if (!ex.contexts.empty()) out += render_context_lines(ex.contexts) + "\n";
        out += std::string(kQuestionMarker) + " " + ex.decomposition.question + "\n";
        out += serialize_trace(ex.decomposition) + "\n";
        out += "#\n";
    }
    if (!contexts.empty()) out += render_context_lines(contexts) + "\n";
    out += std::string(kQuestionMarker) + " " + question + "\n";
    const std::string partial_text = serialize_trace(partial);
    if (!partial_text.empty()) out += partial_text + "\n";
    if (!pending_follow_up.empty()) {
        if (partial.steps.empty()) out += std::string(kYesFollowUpMarker) + "\n";
        out += std::string(kFollowUpMarker) + " " + pending_follow_up + "\n";
    }
    return out;
}

}  // namespace raqa
