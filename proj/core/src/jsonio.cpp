#include "raqa/jsonio.hpp"

#include <fstream>

#include "raqa/retrieval.hpp"

namespace raqa {

void to_json(nlohmann::json& j, const QaExample& e) {
    j = {{"id", e.id}, {"question", e.question}, {"gold_answers", e.gold_answers}};
    if (!e.intermediate_answers.empty()) j["intermediate_answers"] = e.intermediate_answers;
    if (e.measure_unit) j["measure_unit"] = *e.measure_unit;
}

void from_json(const nlohmann::json& j, QaExample& e) {
    e.id = j.at("id").get<std::string>();
    e.question = j.at("question").get<std::string>();
    e.gold_answers = j.at("gold_answers").get<std::vector<std::string>>();
    e.intermediate_answers =
        j.value("intermediate_answers", std::vector<std::string>{});
    if (j.contains("measure_unit")) e.measure_unit = j["measure_unit"].get<std::string>();
}

void to_json(nlohmann::json& j, const EvidenceSnippet& s) {
    j = {{"query", s.query}, {"rank", s.rank},           {"title", s.title},
         {"text", s.text},   {"tier", to_string(s.tier)}, {"source", s.source}};
}

void from_json(const nlohmann::json& j, EvidenceSnippet& s) {
    s.query = j.at("query").get<std::string>();
    s.rank = j.at("rank").get<int>();
    s.title = j.value("title", "");
    s.text = j.at("text").get<std::string>();
    s.tier = tier_from_string(j.value("tier", "top1"));
    s.source = j.value("source", "");
}

void to_json(nlohmann::json& j, const DecompositionTrace& t) {
    j = {{"question", t.question},
         {"contexts", t.contexts.snippets},
         {"failed", t.failed},
         {"raw_text", t.raw_text},
         {"used_retrieval", t.used_retrieval}};
    nlohmann::json steps = nlohmann::json::array();
    for (const DecompStep& s : t.steps) {
        steps.push_back({{"follow_up", s.follow_up},
                         {"intermediate_answer", s.intermediate_answer}});
    }
    j["steps"] = steps;
    if (t.final_answer) j["final_answer"] = *t.final_answer;
    if (!t.failure_reason.empty()) j["failure_reason"] = t.failure_reason;
}

void from_json(const nlohmann::json& j, DecompositionTrace& t) {
    t.question = j.value("question", "");
    t.contexts.snippets = j.value("contexts", std::vector<EvidenceSnippet>{});
    t.steps.clear();
    for (const auto& s : j.value("steps", nlohmann::json::array())) {
        t.steps.push_back({s.at("follow_up").get<std::string>(),
                           s.at("intermediate_answer").get<std::string>()});
    }
    if (j.contains("final_answer")) t.final_answer = j["final_answer"].get<std::string>();
    t.failed = j.value("failed", false);
    t.raw_text = j.value("raw_text", "");
    t.used_retrieval = j.value("used_retrieval", false);
    t.failure_reason = j.value("failure_reason", "");
}

void to_json(nlohmann::json& j, const GateDecision& g) {
    nlohmann::json checks = nlohmann::json::array();
    for (const GateCheck& c : g.checks) {
        checks.push_back({{"hypothesis", c.hypothesis},
                          {"premise", c.premise},
                          {"p_entail", c.score.p_entail},
                          {"p_neutral", c.score.p_neutral},
                          {"p_contradict", c.score.p_contradict}});
    }
    j = {{"checks", checks},
         {"verdict", g.verdict == Verdict::Accept ? "accept" : "backoff"},
         {"ralm_trace", g.ralm_trace},
         {"fallback_trace", g.fallback_trace}};
    if (!g.backoff_reason.empty()) j["backoff_reason"] = g.backoff_reason;
}

void from_json(const nlohmann::json& j, GateDecision& g) {
    g.checks.clear();
    for (const auto& c : j.value("checks", nlohmann::json::array())) {
        GateCheck check;
        check.hypothesis = c.at("hypothesis").get<std::string>();
        check.premise = c.at("premise").get<std::string>();
        check.score = {c.at("p_entail").get<double>(), c.value("p_neutral", 0.0),
                       c.value("p_contradict", 0.0)};
        g.checks.push_back(std::move(check));
    }
    g.verdict =
        j.value("verdict", "backoff") == std::string("accept") ? Verdict::Accept : Verdict::BackOff;
    g.backoff_reason = j.value("backoff_reason", "");
    if (j.contains("ralm_trace")) g.ralm_trace = j["ralm_trace"].get<DecompositionTrace>();
    if (j.contains("fallback_trace")) {
        g.fallback_trace = j["fallback_trace"].get<DecompositionTrace>();
    }
}

void to_json(nlohmann::json& j, const RunRecord& r) {
    j = {{"example_id", r.example_id}, {"dataset", to_string(r.dataset)},
         {"variant", r.variant},       {"tier", r.tier},
         {"trace", r.trace},           {"score", r.score}};
    if (r.gate) j["gate"] = *r.gate;
    if (r.ralm_score) j["ralm_score"] = *r.ralm_score;
    if (r.fallback_score) j["fallback_score"] = *r.fallback_score;
}

void from_json(const nlohmann::json& j, RunRecord& r) {
    r.example_id = j.at("example_id").get<std::string>();
    r.dataset = dataset_from_string(j.value("dataset", "nq"));
    r.variant = j.value("variant", "");
    r.tier = j.value("tier", "none");
    r.trace = j.at("trace").get<DecompositionTrace>();
    r.score = j.at("score").get<double>();
    if (j.contains("gate")) r.gate = j["gate"].get<GateDecision>();
    if (j.contains("ralm_score")) r.ralm_score = j["ralm_score"].get<double>();
    if (j.contains("fallback_score")) r.fallback_score = j["fallback_score"].get<double>();
}

void to_json(nlohmann::json& j, const TrainingExample& e) {
    std::vector<std::string> tiers;
    tiers.reserve(e.tiers_used.size());
    for (NoiseTier t : e.tiers_used) tiers.push_back(to_string(t));
    j = {{"question_id", e.question_id},
         {"step_index", e.step_index},
         {"input", e.input_text},
         {"target", e.target_text},
         {"tiers", tiers}};
}

void from_json(const nlohmann::json& j, TrainingExample& e) {
    e.question_id = j.at("question_id").get<std::string>();
    e.step_index = j.at("step_index").get<int>();
    e.input_text = j.at("input").get<std::string>();
    e.target_text = j.at("target").get<std::string>();
    e.tiers_used.clear();
    for (const auto& t : j.value("tiers", std::vector<std::string>{})) {
        e.tiers_used.push_back(tier_from_string(t));
    }
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path.string());
    std::vector<nlohmann::json> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(path.string() + " line " + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path.string());
    for (const auto& row : rows) out << row.dump() << "\n";
}

}  // namespace raqa
