// Command-line front end: run, gendata, report, build-index.
//
// Exit codes: 0 success, 1 input/config error, 2 backend error.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "raqa/controller.hpp"
#include "raqa/datagen.hpp"
#include "raqa/dataset.hpp"
#include "raqa/eval.hpp"
#include "raqa/http_backend.hpp"
#include "raqa/jsonio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitBackendError = 2;

struct RunConfig {
    std::string dataset_file;
    std::string dataset = "nq";
    std::string variant = "sa-nr";
    std::map<std::string, std::string> prompt_files;  // variant name -> path
    std::string index_file;
    std::string tier = "top1";  // noise mode: top1 | lowrank | random | mix
    bool no_retrieval = false;
    bool nli_gate = false;
    double threshold = raqa::kDefaultEntailmentThreshold;
    std::uint64_t seed = 0;
    std::size_t sample = 0;  // 0 = all
    unsigned jobs = 0;       // 0 = auto
    std::string output = "records.jsonl";
    std::string event_log;
    // Generation backend: a transcript file or an HTTP endpoint.
    std::string gen_transcript;
    std::string gen_url;
    std::string gen_api_key_env;
    // Entailment backend: a score table or an HTTP endpoint.
    std::string entail_table;
    std::string entail_url;
    std::string entail_api_key_env;
};

void merge_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw raqa::InputError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw raqa::InputError("config file " + path + ": " + e.what());
    }
    cfg.dataset_file = j.value("dataset_file", cfg.dataset_file);
    cfg.dataset = j.value("dataset", cfg.dataset);
    cfg.variant = j.value("variant", cfg.variant);
    if (j.contains("prompts")) {
        for (auto& [k, v] : j["prompts"].items()) cfg.prompt_files[k] = v.get<std::string>();
    }
    cfg.index_file = j.value("index_file", cfg.index_file);
    cfg.tier = j.value("tier", cfg.tier);
    cfg.no_retrieval = j.value("no_retrieval", cfg.no_retrieval);
    cfg.nli_gate = j.value("nli_gate", cfg.nli_gate);
    cfg.threshold = j.value("threshold", cfg.threshold);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.sample = j.value("sample", cfg.sample);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.output = j.value("output", cfg.output);
    cfg.event_log = j.value("event_log", cfg.event_log);
    if (j.contains("generation")) {
        const json& g = j["generation"];
        cfg.gen_transcript = g.value("transcript", cfg.gen_transcript);
        cfg.gen_url = g.value("url", cfg.gen_url);
        cfg.gen_api_key_env = g.value("api_key_env", cfg.gen_api_key_env);
    }
    if (j.contains("entailment")) {
        const json& e = j["entailment"];
        cfg.entail_table = e.value("table", cfg.entail_table);
        cfg.entail_url = e.value("url", cfg.entail_url);
        cfg.entail_api_key_env = e.value("api_key_env", cfg.entail_api_key_env);
    }
}

void require_file(std::vector<std::string>& errors, const std::string& path,
                  const std::string& what) {
    if (path.empty()) {
        errors.push_back("missing " + what);
    } else if (!fs::exists(path)) {
        errors.push_back(what + " not found: " + path);
    }
}

// All validation errors are reported at once.
void validate_run_config(const RunConfig& cfg, bool needs_entailment) {
    std::vector<std::string> errors;
    require_file(errors, cfg.dataset_file, "dataset file");
    if (!cfg.no_retrieval) require_file(errors, cfg.index_file, "index file");
    if (cfg.gen_transcript.empty() && cfg.gen_url.empty()) {
        errors.push_back("no generation backend (generation.transcript or generation.url)");
    }
    if (!cfg.gen_transcript.empty()) {
        require_file(errors, cfg.gen_transcript, "generation transcript");
    }
    if (needs_entailment && cfg.entail_table.empty() && cfg.entail_url.empty()) {
        errors.push_back("no entailment backend (entailment.table or entailment.url)");
    }
    if (needs_entailment && !cfg.entail_table.empty()) {
        require_file(errors, cfg.entail_table, "entailment table");
    }
    std::set<std::string> requested;
    auto needs_prompt = [&](const std::string& name) {
        if (!requested.insert(name).second) return;
        auto it = cfg.prompt_files.find(name);
        if (it == cfg.prompt_files.end()) {
            errors.push_back("missing prompt file for variant " + name);
        } else {
            require_file(errors, it->second, "prompt file " + name);
        }
    };
    if (cfg.variant == "sa-rmix") {
        needs_prompt("sa-r1");
        needs_prompt("sa-r10");
    } else {
        needs_prompt(cfg.variant);
    }
    if (needs_entailment || cfg.no_retrieval || cfg.variant != "sa-nr") needs_prompt("sa-nr");
    if (!errors.empty()) {
        std::string message = "configuration errors:";
        for (const auto& e : errors) message += "\n  - " + e;
        throw raqa::InputError(message);
    }
}

raqa::PromptVariant load_variant(const RunConfig& cfg, const std::string& name) {
    using raqa::VariantKind;
    if (name == "sa-rmix") {
        const auto r1 = raqa::load_prompt_file(cfg.prompt_files.at("sa-r1"), VariantKind::SaR1);
        const auto r10 =
            raqa::load_prompt_file(cfg.prompt_files.at("sa-r10"), VariantKind::SaR10);
        return raqa::make_rmix(r1, r10);
    }
    return raqa::load_prompt_file(cfg.prompt_files.at(name), raqa::variant_from_string(name));
}

std::unique_ptr<raqa::GenerationBackend> make_gen_backend(const RunConfig& cfg) {
    if (!cfg.gen_transcript.empty()) {
        return std::make_unique<raqa::ScriptedGenerationBackend>(
            raqa::ScriptedGenerationBackend::from_file(cfg.gen_transcript));
    }
    return std::make_unique<raqa::HttpGenerationBackend>(
        raqa::HttpBackendConfig{cfg.gen_url, cfg.gen_api_key_env});
}

std::unique_ptr<raqa::EntailmentBackend> make_entail_backend(const RunConfig& cfg) {
    if (!cfg.entail_table.empty()) {
        return std::make_unique<raqa::ScriptedEntailmentBackend>(
            raqa::ScriptedEntailmentBackend::from_file(cfg.entail_table));
    }
    return std::make_unique<raqa::HttpEntailmentBackend>(
        raqa::HttpBackendConfig{cfg.entail_url, cfg.entail_api_key_env});
}

unsigned effective_jobs(unsigned requested) {
    // In-flight requests stay bounded by the backend limit of 8.
    unsigned jobs = requested != 0 ? requested : std::thread::hardware_concurrency();
    if (jobs == 0) jobs = 1;
    return std::min(jobs, 8u);
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

int cmd_run(const RunConfig& cfg) {
    validate_run_config(cfg, cfg.nli_gate);

    const raqa::Dataset dataset = raqa::dataset_from_string(cfg.dataset);
    std::vector<raqa::QaExample> examples = raqa::load_dataset(cfg.dataset_file, dataset);
    if (cfg.sample > 0) examples = raqa::sample_eval_subset(examples, cfg.sample, cfg.seed);

    const raqa::PromptVariant variant = load_variant(cfg, cfg.variant);
    std::optional<raqa::PromptVariant> nr_variant;
    if (cfg.nli_gate || cfg.variant != "sa-nr") nr_variant = load_variant(cfg, "sa-nr");
    const raqa::PromptVariant& fallback = nr_variant ? *nr_variant : variant;

    raqa::RetrievalIndex index;
    if (!cfg.no_retrieval) index = raqa::RetrievalIndex::load(cfg.index_file);

    auto gen = make_gen_backend(cfg);
    std::unique_ptr<raqa::EntailmentBackend> entail;
    if (cfg.nli_gate) entail = make_entail_backend(cfg);

    const raqa::NoisePolicy policy{raqa::noise_mode_from_string(cfg.tier), cfg.seed};

    std::vector<raqa::RunRecord> records(examples.size());
    std::vector<std::vector<raqa::StepEvent>> events(examples.size());

    parallel_for(examples.size(), effective_jobs(cfg.jobs), [&](std::size_t i) {
        const raqa::QaExample& example = examples[i];
        raqa::ControllerConfig ctrl;
        ctrl.seed = cfg.seed;
        ctrl.gate_threshold = cfg.threshold;
        ctrl.on_step = [&, i](const raqa::StepEvent& e) { events[i].push_back(e); };

        raqa::RunRecord record;
        record.example_id = example.id;
        record.dataset = dataset;
        record.variant = cfg.variant;
        record.tier = cfg.no_retrieval ? "none" : cfg.tier;

        if (cfg.nli_gate) {
            raqa::BackoffResult result = raqa::answer_with_nli_backoff(
                example, variant, fallback, policy, *gen, *entail, index, ctrl);
            record.trace = result.chosen;
            record.gate = result.gate;
            raqa::RunRecord probe = record;
            probe.trace = result.gate.ralm_trace;
            record.ralm_score = raqa::score_run(probe, example);
            probe.trace = result.gate.fallback_trace;
            record.fallback_score = raqa::score_run(probe, example);
        } else {
            record.trace = raqa::answer_question(example, variant, policy, !cfg.no_retrieval,
                                                 *gen, cfg.no_retrieval ? nullptr : &index,
                                                 ctrl);
        }
        record.score = raqa::score_run(record, example);
        records[i] = std::move(record);
    });

    raqa::write_jsonl_from(cfg.output, records);
    if (!cfg.event_log.empty()) {
        std::vector<json> rows;
        for (const auto& per_example : events) {
            for (const raqa::StepEvent& e : per_example) {
                char hash_hex[17];
                std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                              static_cast<unsigned long long>(e.prompt_hash));
                json row{{"example_id", e.example_id},
                         {"step", e.step},
                         {"prompt_hash", hash_hex},
                         {"latency_ms", e.latency_ms}};
                if (e.tier) row["tier"] = raqa::to_string(*e.tier);
                rows.push_back(std::move(row));
            }
        }
        raqa::write_jsonl(cfg.event_log, rows);
    }
    std::cout << "wrote " << records.size() << " records to " << cfg.output << "\n";
    return kExitOk;
}

struct GendataOptions {
    std::string mode = "self-consistency";
    int budget_override = 0;
    std::string corpus_out = "corpus.jsonl";
    std::string manifest_out = "corpus.manifest.json";
};

int cmd_gendata(const RunConfig& cfg, const GendataOptions& opts) {
    validate_run_config(cfg, false);

    const raqa::Dataset dataset = raqa::dataset_from_string(cfg.dataset);
    const std::vector<raqa::QaExample> examples =
        raqa::load_dataset(cfg.dataset_file, dataset);
    const raqa::PromptVariant nr_variant = load_variant(cfg, "sa-nr");
    const raqa::RetrievalIndex index = raqa::RetrievalIndex::load(cfg.index_file);
    auto gen = make_gen_backend(cfg);

    raqa::GenerationBudget budget;
    if (opts.budget_override > 0) {
        budget.max_questions_single_hop = opts.budget_override;
        budget.max_questions_multi_hop = opts.budget_override;
    }

    raqa::DatagenStats stats;
    std::vector<raqa::TrainingExample> corpus;
    if (!raqa::is_multi_hop(dataset)) {
        corpus = raqa::gen_single_hop(examples, nr_variant, *gen, index, cfg.seed, budget,
                                      &stats);
    } else {
        const raqa::MultiHopMode mode = opts.mode == "gold-intermediate"
                                            ? raqa::MultiHopMode::GoldIntermediate
                                            : raqa::MultiHopMode::SelfConsistency;
        corpus =
            raqa::gen_multi_hop(examples, nr_variant, *gen, index, cfg.seed, mode, budget,
                                &stats);
    }

    raqa::write_jsonl_from(opts.corpus_out, corpus);
    const json manifest{
        {"dataset", cfg.dataset},
        {"mode", raqa::is_multi_hop(dataset) ? opts.mode : "single-hop"},
        {"seed", cfg.seed},
        {"budget",
         {{"max_questions_single_hop", budget.max_questions_single_hop},
          {"max_questions_multi_hop", budget.max_questions_multi_hop},
          {"samples_per_question", budget.samples_per_question}}},
        {"questions_considered", stats.questions_considered},
        {"filtered_unanswerable", stats.filtered_unanswerable},
        {"filtered_disagreement", stats.filtered_disagreement},
        {"skipped_cache_miss", stats.skipped_cache_miss},
        {"questions_kept", stats.questions_kept},
        {"examples_emitted", stats.examples_emitted},
        {"acceptance_rate", stats.acceptance_rate()}};
    std::ofstream manifest_out(opts.manifest_out);
    manifest_out << manifest.dump(2) << "\n";
    std::cout << "wrote " << corpus.size() << " training examples to " << opts.corpus_out
              << "\n";
    return kExitOk;
}

struct ReportOptions {
    std::string baseline_file;
    std::vector<std::string> treated_files;
    std::string out_dir = ".";
};

json stats_to_json(const std::map<raqa::GroupKey, raqa::GroupStats>& aggregates) {
    json rows = json::array();
    for (const auto& [key, stats] : aggregates) {
        rows.push_back({{"dataset", std::get<0>(key)},
                        {"variant", std::get<1>(key)},
                        {"tier", std::get<2>(key)},
                        {"mean", stats.mean_score_x100},
                        {"count", stats.count},
                        {"failure_rate_pct", stats.failure_rate_pct}});
    }
    return rows;
}

int cmd_report(const ReportOptions& opts) {
    std::vector<raqa::RunRecord> all_treated;
    for (const std::string& path : opts.treated_files) {
        for (auto& r : raqa::read_jsonl_as<raqa::RunRecord>(path)) {
            all_treated.push_back(std::move(r));
        }
    }
    const auto treated_aggr = raqa::aggregate(all_treated);

    json report{{"aggregates", stats_to_json(treated_aggr)}};

    if (!opts.baseline_file.empty()) {
        const auto baseline_records =
            raqa::read_jsonl_as<raqa::RunRecord>(opts.baseline_file);
        const auto baseline_aggr = raqa::aggregate(baseline_records);
        const auto deltas = raqa::robustness_report(baseline_aggr, treated_aggr);
        report["baseline"] = stats_to_json(baseline_aggr);
        json delta_rows = json::array();
        for (const auto& d : deltas) {
            delta_rows.push_back({{"dataset", d.dataset},
                                  {"variant", d.variant},
                                  {"tier", d.tier},
                                  {"baseline", d.baseline},
                                  {"treated", d.treated},
                                  {"delta", d.delta}});
        }
        report["deltas"] = delta_rows;
        std::ofstream csv(fs::path(opts.out_dir) / "deltas.csv");
        csv << raqa::delta_table_csv(deltas);
    }

    // Entailment-probability buckets, when gate data is present.
    std::vector<raqa::BucketInput> bucket_inputs;
    for (const raqa::RunRecord& r : all_treated) {
        if (r.gate && r.ralm_score && r.fallback_score) {
            bucket_inputs.push_back({r.gate->min_p_entail(), *r.ralm_score,
                                     *r.fallback_score});
        }
    }
    if (!bucket_inputs.empty()) {
        const raqa::BucketTable table = raqa::bucket_entailment(bucket_inputs);
        auto row_json = [](const raqa::BucketRow& row) {
            return json{{"count", row.count}, {"share", row.share},
                        {"mean_delta", row.mean_delta}};
        };
        report["entailment_buckets"] = {{"low", row_json(table.low)},
                                        {"medium", row_json(table.medium)},
                                        {"high", row_json(table.high)},
                                        {"total", table.total}};
    }

    const fs::path out_path = fs::path(opts.out_dir) / "report.json";
    std::ofstream out(out_path);
    out << report.dump(2) << "\n";
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

struct BuildIndexOptions {
    std::string questions_file;
    std::string dataset = "nq";
    std::string extra_queries_file;
    std::string url;
    std::string api_key_env;
    std::string corpus = "web";
    int top_k = 10;
    std::string out = "index.jsonl";
};

int cmd_build_index(const BuildIndexOptions& opts) {
    std::vector<std::string> queries;
    for (const auto& e :
         raqa::load_dataset(opts.questions_file, raqa::dataset_from_string(opts.dataset))) {
        queries.push_back(e.question);
    }
    if (!opts.extra_queries_file.empty()) {
        std::ifstream in(opts.extra_queries_file);
        if (!in) throw raqa::InputError("cannot open " + opts.extra_queries_file);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) queries.push_back(line);
        }
    }

    const raqa::Corpus corpus =
        opts.corpus == "local" ? raqa::Corpus::Local : raqa::Corpus::Web;
    raqa::HttpSearchClient client({opts.url, opts.api_key_env});

    raqa::RetrievalIndex index;
    std::vector<std::string> failed_queries;
    std::vector<std::string> lowrank_unavailable;
    for (const std::string& question : queries) {
        std::vector<raqa::SearchResult> results;
        try {
            results = client.search(raqa::format_query(question, corpus), opts.top_k);
        } catch (const std::exception& e) {
            std::cerr << "query failed: " << question << ": " << e.what() << "\n";
            failed_queries.push_back(question);
            continue;
        }
        if (results.empty()) {
            failed_queries.push_back(question);
            continue;
        }
        std::vector<raqa::EvidenceSnippet> snippets;
        for (const raqa::SearchResult& r : results) {
            raqa::EvidenceSnippet s;
            s.query = question;
            s.rank = r.rank;
            s.title = r.title;
            s.text = r.text;
            s.source = "search";
            snippets.push_back(std::move(s));
        }
        if (snippets.size() < 2) lowrank_unavailable.push_back(question);
        index.add(question, std::move(snippets));
    }

    index.save(opts.out);
    const json manifest{{"queries", queries.size()},
                        {"indexed", index.query_count()},
                        {"failed_queries", failed_queries},
                        {"lowrank_unavailable", lowrank_unavailable},
                        {"average_low_rank", index.average_low_rank()},
                        {"partial", !failed_queries.empty()}};
    std::ofstream manifest_out(opts.out + ".manifest.json");
    manifest_out << manifest.dump(2) << "\n";
    std::cout << "indexed " << index.query_count() << "/" << queries.size()
              << " queries, average low rank " << index.average_low_rank() << "\n";
    return kExitOk;
}

// The config file provides defaults; flags parsed afterwards override it.
// It is merged before CLI11 runs, so it has to be found by hand.
std::string scan_for_config(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

void add_run_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--dataset-file", cfg.dataset_file, "line-delimited dataset file");
    cmd->add_option("--dataset", cfg.dataset, "nq|2wikimqa|strategyqa|fermi|bamboogle");
    cmd->add_option("--variant", cfg.variant, "sa-nr|sa-r1|sa-r10|sa-rmix");
    cmd->add_option("--prompt", cfg.prompt_files,
                    "prompt file per variant, e.g. --prompt sa-nr path");
    cmd->add_option("--index", cfg.index_file, "retrieval index file");
    cmd->add_option("--tier", cfg.tier, "noise policy: top1|lowrank|random|mix");
    cmd->add_flag("--no-retrieval", cfg.no_retrieval, "answer from parametric memory only");
    cmd->add_option("--seed", cfg.seed, "run seed");
    cmd->add_option("--sample", cfg.sample, "evaluate a seeded random subset of this size");
    cmd->add_option("--jobs", cfg.jobs, "parallel examples (default: cores, capped at 8)");
    cmd->add_option("--transcript", cfg.gen_transcript, "scripted generation transcript");
    cmd->add_option("--gen-url", cfg.gen_url, "generation backend base URL");
    cmd->add_option("--entail-table", cfg.entail_table, "scripted entailment table");
    cmd->add_option("--entail-url", cfg.entail_url, "entailment backend base URL");
    cmd->add_option("--out", cfg.output, "output record file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"retrieval-robust Self-Ask QA pipeline"};
    app.require_subcommand(1);

    RunConfig run_cfg;
    std::string run_config_path;
    CLI::App* run = app.add_subcommand("run", "answer a dataset and write run records");
    add_run_options(run, run_cfg, run_config_path);
    run->add_flag("--nli-gate", run_cfg.nli_gate, "enable NLI-gated back-off");
    run->add_option("--threshold", run_cfg.threshold, "entailment threshold");
    run->add_option("--event-log", run_cfg.event_log, "structured step event log");

    RunConfig gendata_cfg;
    std::string gendata_config_path;
    GendataOptions gendata_opts;
    CLI::App* gendata = app.add_subcommand("gendata", "generate a fine-tuning corpus");
    add_run_options(gendata, gendata_cfg, gendata_config_path);
    gendata->add_option("--mode", gendata_opts.mode, "gold-intermediate|self-consistency");
    gendata->add_option("--budget", gendata_opts.budget_override, "question cap override");
    gendata->add_option("--corpus-out", gendata_opts.corpus_out, "corpus output file");
    gendata->add_option("--manifest", gendata_opts.manifest_out, "manifest output file");

    ReportOptions report_opts;
    CLI::App* report = app.add_subcommand("report", "aggregate records and report deltas");
    report->add_option("records", report_opts.treated_files, "run record files")->required();
    report->add_option("--baseline", report_opts.baseline_file,
                       "no-retrieval baseline record file");
    report->add_option("--out-dir", report_opts.out_dir, "directory for report files");

    BuildIndexOptions index_opts;
    CLI::App* build_index =
        app.add_subcommand("build-index", "snapshot search results into an index file");
    build_index->add_option("--questions", index_opts.questions_file, "dataset file")
        ->required();
    build_index->add_option("--dataset", index_opts.dataset, "dataset id");
    build_index->add_option("--extra-queries", index_opts.extra_queries_file,
                            "extra raw queries, one per line");
    build_index->add_option("--url", index_opts.url, "search backend base URL")->required();
    build_index->add_option("--api-key-env", index_opts.api_key_env,
                            "env var holding the API key");
    build_index->add_option("--corpus", index_opts.corpus, "web|local query formatting");
    build_index->add_option("--top-k", index_opts.top_k, "results per query");
    build_index->add_option("--out", index_opts.out, "index output file");

    const std::string config_path = scan_for_config(argc, argv);
    try {
        if (!config_path.empty()) {
            merge_config_file(run_cfg, config_path);
            merge_config_file(gendata_cfg, config_path);
        }
    } catch (const raqa::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Fold CLI11's per-error exit codes into the documented 0/1 scheme.
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (run->parsed()) return cmd_run(run_cfg);
        if (gendata->parsed()) return cmd_gendata(gendata_cfg, gendata_opts);
        if (report->parsed()) return cmd_report(report_opts);
        if (build_index->parsed()) return cmd_build_index(index_opts);
    } catch (const raqa::TransportError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackendError;
    } catch (const raqa::ProtocolError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackendError;
    } catch (const raqa::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
