#include "raqa/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "raqa/jsonio.hpp"

namespace raqa {

NoiseMode noise_mode_from_string(const std::string& name) {
    if (name == "top1") return NoiseMode::AlwaysTop1;
    if (name == "lowrank") return NoiseMode::AlwaysLowRank;
    if (name == "random") return NoiseMode::AlwaysRandom;
    if (name == "mix") return NoiseMode::UniformMix;
    throw InputError("unknown noise mode: " + name);
}

std::string to_string(NoiseMode mode) {
    switch (mode) {
        case NoiseMode::AlwaysTop1: return "top1";
        case NoiseMode::AlwaysLowRank: return "lowrank";
        case NoiseMode::AlwaysRandom: return "random";
        case NoiseMode::UniformMix: return "mix";
    }
    return "top1";
}

NoiseTier draw_tier(const NoisePolicy& policy, std::mt19937_64& rng) {
    switch (policy.mode) {
        case NoiseMode::AlwaysTop1: return NoiseTier::Top1;
        case NoiseMode::AlwaysLowRank: return NoiseTier::LowRank;
        case NoiseMode::AlwaysRandom: return NoiseTier::Random;
        case NoiseMode::UniformMix: {
            std::uniform_int_distribution<int> dist(0, 2);
            return static_cast<NoiseTier>(dist(rng));
        }
    }
    return NoiseTier::Top1;
}

std::string format_query(const std::string& question, Corpus corpus) {
    if (question.empty()) throw InputError("cannot format an empty question");
    if (corpus == Corpus::Local) return question;

    std::string normalized;
    bool in_space = true;
    for (char c : question) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) normalized += ' ';
            in_space = true;
        } else {
            normalized += c;
            in_space = false;
        }
    }
    while (!normalized.empty() && normalized.back() == ' ') normalized.pop_back();
    return "en.wikipedia.org " + normalized;
}

RetrievalIndex RetrievalIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open index file: " + path.string());

    std::map<std::string, std::vector<EvidenceSnippet>> grouped;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("index line " + std::to_string(line_no) + ": " + e.what());
        }
        EvidenceSnippet s;
        s.query = j.at("query").get<std::string>();
        s.rank = j.at("rank").get<int>();
        s.title = j.value("title", "");
        s.text = j.at("text").get<std::string>();
        s.source = j.value("source", "index");
        if (s.text.empty()) {
            throw InputError("index line " + std::to_string(line_no) + ": empty text");
        }
        grouped[s.query].push_back(std::move(s));
    }

    RetrievalIndex index;
    for (auto& [query, snippets] : grouped) index.add(query, std::move(snippets));
    return index;
}

void RetrievalIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write index file: " + path.string());
    for (const auto& [query, snippets] : by_query_) {
        for (const EvidenceSnippet& s : snippets) {
            nlohmann::json j{{"query", s.query},
                             {"rank", s.rank},
                             {"title", s.title},
                             {"text", s.text},
                             {"source", s.source}};
            out << j.dump() << "\n";
        }
    }
}

void RetrievalIndex::add(const std::string& query, std::vector<EvidenceSnippet> ranked) {
    if (ranked.empty()) throw InputError("cannot add an empty result list for: " + query);
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.rank < b.rank; });
    for (EvidenceSnippet& s : ranked) s.query = query;
    top1_pool_.push_back(ranked.front());
    by_query_[query] = std::move(ranked);
}

bool RetrievalIndex::contains(const std::string& query) const {
    return by_query_.contains(query);
}

EvidenceSnippet RetrievalIndex::retrieve(const std::string& query, NoiseTier tier,
                                         std::mt19937_64& rng) const {
    if (tier == NoiseTier::Random) {
        std::vector<const EvidenceSnippet*> pool;
        pool.reserve(top1_pool_.size());
        for (const EvidenceSnippet& s : top1_pool_) {
            if (s.query != query) pool.push_back(&s);
        }
        if (pool.empty() || top1_pool_.size() <= 1) {
            throw CacheMissError("random pool too small for query: " + query);
        }
        std::uniform_int_distribution<std::size_t> dist(0, pool.size() - 1);
        EvidenceSnippet chosen = *pool[dist(rng)];
        chosen.tier = NoiseTier::Random;
        // A random snippet is some other query's rank-1 hit; its rank stays 1.
        return chosen;
    }

    const auto it = by_query_.find(query);
    if (it == by_query_.end()) {
        throw CacheMissError("query not in index: " + query);
    }
    const std::vector<EvidenceSnippet>& ranked = it->second;
    if (tier == NoiseTier::Top1) {
        EvidenceSnippet chosen = ranked.front();
        chosen.tier = NoiseTier::Top1;
        return chosen;
    }
    if (ranked.size() < 2) {
        throw CacheMissError("lowrank unavailable (single hit) for query: " + query);
    }
    EvidenceSnippet chosen = ranked.back();
    chosen.tier = NoiseTier::LowRank;
    return chosen;
}

double RetrievalIndex::average_low_rank() const {
    if (by_query_.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [query, snippets] : by_query_) sum += snippets.back().rank;
    return sum / static_cast<double>(by_query_.size());
}

std::vector<std::string> RetrievalIndex::single_hit_queries() const {
    std::vector<std::string> out;
    for (const auto& [query, snippets] : by_query_) {
        if (snippets.size() < 2) out.push_back(query);
    }
    return out;
}

}  // namespace raqa
