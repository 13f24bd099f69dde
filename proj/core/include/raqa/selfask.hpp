#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "raqa/types.hpp"

namespace raqa {

// Structural markers of the Self-Ask text format. Matching is
// case-sensitive; only leading/trailing whitespace is tolerated.
inline constexpr std::string_view kFollowUpMarker = "Follow up:";
inline constexpr std::string_view kIntermediateMarker = "Intermediate answer:";
inline constexpr std::string_view kFinalMarker = "So the final answer is:";
inline constexpr std::string_view kNoFollowUpMarker = "Are follow up questions needed here: No.";
inline constexpr std::string_view kYesFollowUpMarker = "Are follow up questions needed here: Yes.";
inline constexpr std::string_view kQuestionMarker = "Question:";
inline constexpr std::string_view kContextMarker = "Context";

enum class StepKind {
    FollowUp,
    IntermediateAnswer,
    FinalAnswer,
    NoFollowUpNeeded,
    FollowUpsNeeded,  // "Are follow up questions needed here: Yes."
    Unparseable,
};

struct ParsedStep {
    StepKind kind = StepKind::Unparseable;
    std::string payload;  // text after the marker, trimmed
};

/// Classify one model-emitted line/segment.
ParsedStep parse_step(std::string_view text);

/// Parse a full model continuation into a structured trace. No final-answer
/// marker, or an interleaving violation, marks the trace failed (with a
/// diagnostic) rather than throwing. raw_text keeps the input verbatim.
DecompositionTrace parse_trace(const std::string& text);

/// Inverse of parse_trace for non-failed traces. An empty trace yields "".
std::string serialize_trace(const DecompositionTrace& trace);

enum class VariantKind { SaNr, SaR1, SaR10, SaRMix };

VariantKind variant_from_string(const std::string& name);
std::string to_string(VariantKind kind);

struct Exemplar {
    ContextBundle contexts;             // empty for SA-NR
    DecompositionTrace decomposition;   // complete, failed == false
};

struct PromptVariant {
    VariantKind kind = VariantKind::SaNr;
    std::string instruction;
    std::vector<Exemplar> exemplars;
};

/// Load an exemplar library stored in the prompt layout: an instruction
/// block followed by "#"-separated exemplar blocks. A trailing bare
/// "Question:" block is the inference placeholder and is skipped.
PromptVariant load_prompt_file(const std::filesystem::path& path, VariantKind kind);

/// SA-RMix alternates exemplars from the R@1 and R@10 libraries:
/// odd positions (1-indexed) take Top1 exemplars, even take LowRank.
PromptVariant make_rmix(const PromptVariant& r1, const PromptVariant& r10);

/// Throws InputError when the exemplar count does not match the dataset
/// convention (6 for NQ/2WikiMQA/StrategyQA, 5 for Fermi, 4 for Bamboogle).
void validate_exemplar_count(const PromptVariant& variant, Dataset dataset);

/// "Context{i}: {title}: {text}" lines, numbered from start_index.
std::string render_context_lines(const ContextBundle& contexts, int start_index = 1);

/// Assemble the full prompt: instruction, "#"-separated exemplars, the
/// cumulative context lines (numbered 1..K in retrieval order), the
/// question, then the serialized partial trace.
/// pending_follow_up, when non-empty, is a follow-up that has been emitted
/// but not yet answered; it is appended after the partial trace so the
/// next generation produces its intermediate answer.
std::string render_prompt(const PromptVariant& variant, const ContextBundle& contexts,
                          const std::string& question, const DecompositionTrace& partial,
                          const std::string& pending_follow_up = "");

}  // namespace raqa
