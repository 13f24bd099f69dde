#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "raqa/nligate.hpp"
#include "raqa/types.hpp"

namespace raqa {

/// One scored pipeline run for one example under one condition.
struct RunRecord {
    std::string example_id;
    Dataset dataset = Dataset::Nq;
    std::string variant;   // prompt-variant identifier
    std::string tier;      // noise-tier identifier, "none" without retrieval
    DecompositionTrace trace;
    std::optional<GateDecision> gate;
    double score = 0.0;
    // Present when the gate ran: scores of both candidate traces, for the
    // entailment-probability analytics.
    std::optional<double> ralm_score;
    std::optional<double> fallback_score;
};

/// SQuAD-style normalization: lowercase, strip punctuation, drop the
/// articles a/an/the, collapse whitespace.
std::string normalize_answer(const std::string& text);

/// 1 iff the normalized prediction equals any normalized gold reference.
int exact_match(const std::string& pred, const std::vector<std::string>& golds);

/// Max over golds of the harmonic mean of token precision/recall on
/// normalized whitespace tokens (multiset overlap). Empty vs empty is 1,
/// empty vs non-empty 0.
double token_f1(const std::string& pred, const std::vector<std::string>& golds);

/// Parse a number out of free answer text (plain, scientific, or with
/// thousands separators). Returns nullopt when no number is found.
std::optional<double> parse_quantity(const std::string& text);

/// Fermi scoring: 1 iff both quantities are positive and within half an
/// order of magnitude (|log10 pred - log10 gold| <= 0.5); unit mismatch or
/// unparseable prediction scores 0. Throws InputError when gold <= 0.
int order_of_magnitude_score(const std::string& pred_text, double gold,
                             const std::string& pred_unit, const std::string& gold_unit);

/// Map "Yes."/"no"/... onto canonical yes/no; other text is unchanged.
std::string canonicalize_yes_no(const std::string& text);

/// Failed traces score 0.5 on StrategyQA and 0 elsewhere; otherwise the
/// dataset's metric applies to the final answer.
double score_run(const RunRecord& record, const QaExample& example);

struct GroupStats {
    double mean_score_x100 = 0.0;
    std::size_t count = 0;
    double failure_rate_pct = 0.0;
};

/// (dataset, variant, tier) identifying one aggregate cell.
using GroupKey = std::tuple<std::string, std::string, std::string>;

std::map<GroupKey, GroupStats> aggregate(const std::vector<RunRecord>& records);

struct DeltaRow {
    std::string dataset;
    std::string variant;
    std::string tier;
    double baseline = 0.0;
    double treated = 0.0;
    double delta = 0.0;
};

/// Per-cell treated - baseline deltas; baseline cells are matched on
/// (dataset, variant) so one no-retrieval baseline serves every tier.
std::vector<DeltaRow> robustness_report(const std::map<GroupKey, GroupStats>& baseline,
                                        const std::map<GroupKey, GroupStats>& treated);

std::string delta_table_csv(const std::vector<DeltaRow>& rows);

/// True iff the normalized final answer occurs as a substring of any
/// normalized retrieved snippet text.
bool answer_in_context(const RunRecord& record);

}  // namespace raqa
