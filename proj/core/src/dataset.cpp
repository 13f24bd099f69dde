#include "raqa/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "raqa/jsonio.hpp"

namespace raqa {

Dataset dataset_from_string(const std::string& name) {
    if (name == "nq") return Dataset::Nq;
    if (name == "2wikimqa") return Dataset::TwoWikiMqa;
    if (name == "strategyqa") return Dataset::StrategyQa;
    if (name == "fermi") return Dataset::Fermi;
    if (name == "bamboogle") return Dataset::Bamboogle;
    throw InputError("unknown dataset: " + name);
}

std::string to_string(Dataset d) {
    switch (d) {
        case Dataset::Nq: return "nq";
        case Dataset::TwoWikiMqa: return "2wikimqa";
        case Dataset::StrategyQa: return "strategyqa";
        case Dataset::Fermi: return "fermi";
        case Dataset::Bamboogle: return "bamboogle";
    }
    return "nq";
}

Metric metric_for(Dataset d) {
    switch (d) {
        case Dataset::Nq:
        case Dataset::StrategyQa: return Metric::ExactMatch;
        case Dataset::TwoWikiMqa:
        case Dataset::Bamboogle: return Metric::TokenF1;
        case Dataset::Fermi: return Metric::OrderOfMagnitude;
    }
    return Metric::ExactMatch;
}

bool is_multi_hop(Dataset d) { return d != Dataset::Nq; }

NoiseTier tier_from_string(const std::string& name) {
    if (name == "top1") return NoiseTier::Top1;
    if (name == "lowrank") return NoiseTier::LowRank;
    if (name == "random") return NoiseTier::Random;
    throw InputError("unknown noise tier: " + name);
}

std::string to_string(NoiseTier t) {
    switch (t) {
        case NoiseTier::Top1: return "top1";
        case NoiseTier::LowRank: return "lowrank";
        case NoiseTier::Random: return "random";
    }
    return "top1";
}

namespace {

void validate(const QaExample& e, std::size_t line_no) {
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (e.id.empty()) throw InputError(where + "missing field 'id'");
    if (e.question.empty()) throw InputError(where + "missing field 'question'");
    if (e.gold_answers.empty()) throw InputError(where + "empty gold_answers");
    if (e.measure_unit.has_value() && e.dataset != Dataset::Fermi) {
        throw InputError(where + "measure_unit is only valid for fermi");
    }
    if (!e.measure_unit.has_value() && e.dataset == Dataset::Fermi) {
        throw InputError(where + "missing field 'measure_unit'");
    }
    if (!e.intermediate_answers.empty() && !is_multi_hop(e.dataset)) {
        throw InputError(where + "intermediate_answers on a single-hop dataset");
    }
}

}  // namespace

std::vector<QaExample> load_dataset(const std::filesystem::path& path, Dataset dataset) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset file: " + path.string());

    std::vector<QaExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("line " + std::to_string(line_no) +
                             ": malformed record: " + e.what());
        }
        QaExample example;
        try {
            from_json(j, example);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("line " + std::to_string(line_no) + ": " + e.what());
        }
        example.dataset = dataset;
        validate(example, line_no);
        out.push_back(std::move(example));
    }
    return out;
}

std::vector<QaExample> sample_eval_subset(const std::vector<QaExample>& examples,
                                          std::size_t n, std::uint64_t seed) {
    n = std::min(n, examples.size());
    std::vector<std::size_t> idx(examples.size());
    std::iota(idx.begin(), idx.end(), 0);

    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first n slots end up a uniform sample.
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> dist(i, idx.size() - 1);
        std::swap(idx[i], idx[dist(rng)]);
    }

    std::vector<QaExample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(examples[idx[i]]);
    return out;
}

}  // namespace raqa
