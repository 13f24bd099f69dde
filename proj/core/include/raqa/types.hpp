#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace raqa {

/// Thrown for malformed user input: dataset files, config, prompt files.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Dataset { Nq, TwoWikiMqa, StrategyQa, Fermi, Bamboogle };

enum class Metric { ExactMatch, TokenF1, OrderOfMagnitude };

Dataset dataset_from_string(const std::string& name);
std::string to_string(Dataset d);
Metric metric_for(Dataset d);
bool is_multi_hop(Dataset d);

/// A benchmark question with gold answer(s). gold_answers holds the
/// reference string plus any aliases; matching accepts any of them.
struct QaExample {
    std::string id;
    std::string question;
    std::vector<std::string> gold_answers;
    std::vector<std::string> intermediate_answers;
    std::optional<std::string> measure_unit;  // Fermi only
    Dataset dataset = Dataset::Nq;
};

enum class NoiseTier { Top1, LowRank, Random };

NoiseTier tier_from_string(const std::string& name);
std::string to_string(NoiseTier t);

struct EvidenceSnippet {
    std::string query;  // the query this snippet was retrieved for
    int rank = 1;
    std::string title;
    std::string text;
    NoiseTier tier = NoiseTier::Top1;
    std::string source;  // retriever identifier
};

/// Ordered retrieved evidence; append-only while a trace is running.
struct ContextBundle {
    std::vector<EvidenceSnippet> snippets;

    bool empty() const { return snippets.empty(); }
    std::size_t size() const { return snippets.size(); }
    void append(EvidenceSnippet s) { snippets.push_back(std::move(s)); }
};

struct DecompStep {
    std::string follow_up;
    std::string intermediate_answer;
};

/// The evolving Self-Ask state for one question.
/// Invariant: failed == !final_answer.has_value().
struct DecompositionTrace {
    std::string question;
    ContextBundle contexts;
    std::vector<DecompStep> steps;
    std::optional<std::string> final_answer;
    bool failed = false;
    std::string raw_text;
    bool used_retrieval = false;
    std::string failure_reason;  // diagnostic, set when failed
};

}  // namespace raqa
