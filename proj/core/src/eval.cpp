#include "raqa/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>
#include <sstream>

namespace raqa {

std::string normalize_answer(const std::string& text) {
    std::string lowered;
    lowered.reserve(text.size());
    for (char c : text) {
        if (std::ispunct(static_cast<unsigned char>(c))) continue;
        lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    std::stringstream ss(lowered);
    std::string token, out;
    while (ss >> token) {
        if (token == "a" || token == "an" || token == "the") continue;
        if (!out.empty()) out += ' ';
        out += token;
    }
    return out;
}

namespace {

std::vector<std::string> tokens_of(const std::string& normalized) {
    std::vector<std::string> out;
    std::stringstream ss(normalized);
    std::string token;
    while (ss >> token) out.push_back(token);
    return out;
}

double f1_single(const std::string& pred, const std::string& gold) {
    const auto p = tokens_of(normalize_answer(pred));
    const auto g = tokens_of(normalize_answer(gold));
    if (p.empty() && g.empty()) return 1.0;
    if (p.empty() || g.empty()) return 0.0;

    std::map<std::string, int> gold_counts;
    for (const auto& t : g) ++gold_counts[t];
    int common = 0;
    for (const auto& t : p) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return 0.0;
    const double precision = static_cast<double>(common) / static_cast<double>(p.size());
    const double recall = static_cast<double>(common) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

int exact_match(const std::string& pred, const std::vector<std::string>& golds) {
    const std::string p = normalize_answer(pred);
    for (const std::string& gold : golds) {
        if (p == normalize_answer(gold)) return 1;
    }
    return 0;
}

double token_f1(const std::string& pred, const std::vector<std::string>& golds) {
    double best = 0.0;
    for (const std::string& gold : golds) best = std::max(best, f1_single(pred, gold));
    return best;
}

std::optional<double> parse_quantity(const std::string& text) {
    static const std::regex number_re(
        R"(([-+]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?(?:[eE][-+]?\d+)?))");
    std::smatch m;
    if (!std::regex_search(text, m, number_re)) return std::nullopt;
    std::string digits = m[1].str();
    digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
    try {
        return std::stod(digits);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

int order_of_magnitude_score(const std::string& pred_text, double gold,
                             const std::string& pred_unit, const std::string& gold_unit) {
    if (gold <= 0.0) throw InputError("gold quantity must be positive");
    // Units are supplied to the model as input; an empty prediction unit is
    // taken as agreeing with the gold unit.
    if (!pred_unit.empty() &&
        normalize_answer(pred_unit) != normalize_answer(gold_unit)) {
        return 0;
    }
    const std::optional<double> pred = parse_quantity(pred_text);
    if (!pred || *pred <= 0.0) return 0;
    return std::abs(std::log10(*pred) - std::log10(gold)) <= 0.5 ? 1 : 0;
}

std::string canonicalize_yes_no(const std::string& text) {
    const std::string n = normalize_answer(text);
    if (n == "yes") return "yes";
    if (n == "no") return "no";
    return text;
}

double score_run(const RunRecord& record, const QaExample& example) {
    if (record.trace.failed || !record.trace.final_answer) {
        return example.dataset == Dataset::StrategyQa ? 0.5 : 0.0;
    }
    const std::string& answer = *record.trace.final_answer;
    switch (metric_for(example.dataset)) {
        case Metric::ExactMatch: {
            if (example.dataset == Dataset::StrategyQa) {
                std::vector<std::string> golds;
                golds.reserve(example.gold_answers.size());
                for (const auto& g : example.gold_answers) {
                    golds.push_back(canonicalize_yes_no(g));
                }
                return exact_match(canonicalize_yes_no(answer), golds);
            }
            return exact_match(answer, example.gold_answers);
        }
        case Metric::TokenF1:
            return token_f1(answer, example.gold_answers);
        case Metric::OrderOfMagnitude: {
            const std::string unit = example.measure_unit.value_or("");
            bool any_gold = false;
            for (const std::string& gold_text : example.gold_answers) {
                const std::optional<double> gold = parse_quantity(gold_text);
                if (!gold) continue;
                any_gold = true;
                if (order_of_magnitude_score(answer, *gold, "", unit) == 1) return 1.0;
            }
            if (!any_gold) throw InputError("no numeric gold answer for " + example.id);
            return 0.0;
        }
    }
    return 0.0;
}

std::map<GroupKey, GroupStats> aggregate(const std::vector<RunRecord>& records) {
    struct Acc {
        double sum = 0.0;
        std::size_t count = 0;
        std::size_t failures = 0;
    };
    std::map<GroupKey, Acc> accs;
    for (const RunRecord& r : records) {
        Acc& acc = accs[{to_string(r.dataset), r.variant, r.tier}];
        acc.sum += r.score;
        ++acc.count;
        if (r.trace.failed) ++acc.failures;
    }
    std::map<GroupKey, GroupStats> out;
    for (const auto& [key, acc] : accs) {
        GroupStats stats;
        stats.count = acc.count;
        stats.mean_score_x100 = 100.0 * acc.sum / static_cast<double>(acc.count);
        stats.failure_rate_pct =
            100.0 * static_cast<double>(acc.failures) / static_cast<double>(acc.count);
        out[key] = stats;
    }
    return out;
}

std::vector<DeltaRow> robustness_report(const std::map<GroupKey, GroupStats>& baseline,
                                        const std::map<GroupKey, GroupStats>& treated) {
    std::vector<DeltaRow> rows;
    for (const auto& [key, stats] : treated) {
        const auto& [dataset, variant, tier] = key;
        const GroupStats* base = nullptr;
        // Prefer a (dataset, variant) match; fall back to the dataset's
        // single baseline cell when the variants differ.
        for (const auto& [bkey, bstats] : baseline) {
            if (std::get<0>(bkey) != dataset) continue;
            if (std::get<1>(bkey) == variant) {
                base = &bstats;
                break;
            }
            if (!base) base = &bstats;
        }
        if (!base) continue;
        rows.push_back({dataset, variant, tier, base->mean_score_x100, stats.mean_score_x100,
                        stats.mean_score_x100 - base->mean_score_x100});
    }
    return rows;
}

std::string delta_table_csv(const std::vector<DeltaRow>& rows) {
    std::ostringstream os;
    os << "dataset,variant,tier,baseline,treated,delta\n";
    os.setf(std::ios::fixed);
    os.precision(1);
    for (const DeltaRow& r : rows) {
        os << r.dataset << ',' << r.variant << ',' << r.tier << ',' << r.baseline << ','
           << r.treated << ',' << r.delta << '\n';
    }
    return os.str();
}

bool answer_in_context(const RunRecord& record) {
    if (record.trace.failed || !record.trace.final_answer || !record.trace.used_retrieval) {
        return false;
    }
    const std::string answer = normalize_answer(*record.trace.final_answer);
    if (answer.empty()) return false;
    for (const EvidenceSnippet& s : record.trace.contexts.snippets) {
        if (normalize_answer(s.text).find(answer) != std::string::npos) return true;
    }
    return false;
}

}  // namespace raqa
