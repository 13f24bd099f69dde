#include <map>
#include <thread>

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include "raqa/jsonio.hpp"
#include "testutil.hpp"

using namespace raqa;
using nlohmann::json;
using testutil::run_cli;

namespace {

std::string q(const std::filesystem::path& path) { return "\"" + path.string() + "\" "; }

std::string nq_run_args(const testutil::TempDir& tmp, const std::string& out_name) {
    return std::string("run --dataset-file ") +
           q(testutil::fixture("datasets/nq_mini.jsonl")) +
           "--dataset nq --variant sa-nr --prompt sa-nr " +
           q(testutil::fixture("prompts/toy_sa_nr.txt")) + "--no-retrieval --transcript " +
           q(testutil::fixture("transcripts/toy_singlehop.jsonl")) + "--seed 5 --jobs 2 " +
           "--out " + q(tmp / out_name);
}

std::map<std::string, RunRecord> by_id(const std::vector<RunRecord>& records) {
    std::map<std::string, RunRecord> out;
    for (const RunRecord& r : records) out[r.example_id] = r;
    return out;
}

}  // namespace

TEST_CASE("run answers a dataset without retrieval and writes records") {
    testutil::TempDir tmp;
    const int exit_code = run_cli(nq_run_args(tmp, "records.jsonl") + "--event-log " +
                                      q(tmp / "events.jsonl"),
                                  tmp / "log.txt");
    REQUIRE(exit_code == 0);

    const auto records = read_jsonl_as<RunRecord>(tmp / "records.jsonl");
    REQUIRE(records.size() == 4);
    const auto map = by_id(records);
    CHECK(map.at("n1").score == doctest::Approx(1.0));
    CHECK(map.at("n3").score == doctest::Approx(1.0));  // alias match
    CHECK(map.at("n4").score == doctest::Approx(0.0));  // scripted wrong answer
    CHECK(map.at("n1").tier == "none");
    CHECK(map.at("n1").variant == "sa-nr");
    CHECK(!map.at("n1").trace.used_retrieval);

    const auto events = read_jsonl(tmp / "events.jsonl");
    CHECK(events.size() == 4);  // one generation per direct answer
    CHECK(events[0].contains("prompt_hash"));
}

TEST_CASE("run is byte-deterministic for a fixed seed") {
    testutil::TempDir tmp;
    REQUIRE(run_cli(nq_run_args(tmp, "a.jsonl"), tmp / "log_a.txt") == 0);
    REQUIRE(run_cli(nq_run_args(tmp, "b.jsonl"), tmp / "log_b.txt") == 0);
    const std::string a = testutil::slurp(tmp / "a.jsonl");
    CHECK(!a.empty());
    CHECK(a == testutil::slurp(tmp / "b.jsonl"));
}

TEST_CASE("run with the NLI gate records verdicts and both candidate scores") {
    testutil::TempDir tmp;
    const std::string args =
        std::string("run --dataset-file ") +
        q(testutil::fixture("datasets/twowiki_mini.jsonl")) +
        "--dataset 2wikimqa --variant sa-r1 --prompt sa-r1 " +
        q(testutil::fixture("prompts/toy_sa_r1.txt")) + "--prompt sa-nr " +
        q(testutil::fixture("prompts/toy_sa_nr.txt")) + "--index " +
        q(testutil::fixture("indexes/toy_index.jsonl")) + "--tier top1 --transcript " +
        q(testutil::fixture("transcripts/toy_multihop.jsonl")) +
        "--nli-gate --entail-table " + q(testutil::fixture("entailment/toy_table.jsonl")) +
        "--out " + q(tmp / "records.jsonl");
    REQUIRE(run_cli(args, tmp / "log.txt") == 0);

    const auto map = by_id(read_jsonl_as<RunRecord>(tmp / "records.jsonl"));
    REQUIRE(map.size() == 3);

    // m1: every hypothesis is entailed, the retrieved trace is kept.
    REQUIRE(map.at("m1").gate.has_value());
    CHECK(map.at("m1").gate->verdict == Verdict::Accept);
    CHECK(map.at("m1").trace.used_retrieval);
    CHECK(map.at("m1").score == doctest::Approx(1.0));
    CHECK(map.at("m1").ralm_score.has_value());
    CHECK(map.at("m1").fallback_score.has_value());

    // m2: the table's low default rejects the chain, backing off to the
    // parametric trace (which is also correct).
    CHECK(map.at("m2").gate->verdict == Verdict::BackOff);
    CHECK(!map.at("m2").trace.used_retrieval);
    CHECK(map.at("m2").score == doctest::Approx(1.0));
}

TEST_CASE("report aggregates records and emits deltas against a baseline") {
    testutil::TempDir tmp;
    REQUIRE(run_cli(nq_run_args(tmp, "baseline.jsonl"), tmp / "log1.txt") == 0);

    const std::string treated_args =
        std::string("run --dataset-file ") +
        q(testutil::fixture("datasets/nq_mini.jsonl")) +
        "--dataset nq --variant sa-r1 --prompt sa-r1 " +
        q(testutil::fixture("prompts/toy_sa_r1.txt")) + "--prompt sa-nr " +
        q(testutil::fixture("prompts/toy_sa_nr.txt")) + "--index " +
        q(testutil::fixture("indexes/toy_index.jsonl")) + "--tier top1 --transcript " +
        q(testutil::fixture("transcripts/toy_singlehop.jsonl")) + "--out " +
        q(tmp / "treated.jsonl");
    REQUIRE(run_cli(treated_args, tmp / "log2.txt") == 0);

    const std::string report_args = q(tmp / "treated.jsonl") + "--baseline " +
                                    q(tmp / "baseline.jsonl") + "--out-dir " + q(tmp.path());
    REQUIRE(run_cli("report " + report_args, tmp / "log3.txt") == 0);

    const json report = json::parse(testutil::slurp(tmp / "report.json"));
    REQUIRE(report.contains("aggregates"));
    REQUIRE(report.contains("deltas"));
    REQUIRE(report["deltas"].size() == 1);
    // The transcript answers identically with and without contexts.
    CHECK(report["deltas"][0]["delta"].get<double>() == doctest::Approx(0.0));
    CHECK(report["deltas"][0]["baseline"].get<double>() == doctest::Approx(75.0));

    const std::string csv = testutil::slurp(tmp / "deltas.csv");
    CHECK(csv.find("dataset,variant,tier,baseline,treated,delta") == 0);
    CHECK(csv.find("nq,sa-r1,top1,75.0,75.0,0.0") != std::string::npos);
}

TEST_CASE("report buckets gated records by entailment probability") {
    testutil::TempDir tmp;
    std::vector<RunRecord> records;
    auto gated = [](const std::string& id, double p, double with, double without) {
        RunRecord r;
        r.example_id = id;
        r.dataset = Dataset::Nq;
        r.variant = "sa-r1";
        r.tier = "top1";
        r.trace.question = "q";
        r.trace.final_answer = "a";
        GateDecision gate;
        gate.checks.push_back({"h", "p", {p, 0.0, 0.0}});
        gate.ralm_trace = r.trace;
        gate.fallback_trace = r.trace;
        r.gate = gate;
        r.ralm_score = with;
        r.fallback_score = without;
        r.score = with;
        return r;
    };
    records.push_back(gated("a", 0.1, 1.0, 0.0));
    records.push_back(gated("b", 0.5, 0.0, 1.0));
    records.push_back(gated("c", 0.9, 1.0, 1.0));
    write_jsonl_from(tmp / "gated.jsonl", records);

    REQUIRE(run_cli("report " + q(tmp / "gated.jsonl") + "--out-dir " + q(tmp.path()),
                    tmp / "log.txt") == 0);
    const json report = json::parse(testutil::slurp(tmp / "report.json"));
    REQUIRE(report.contains("entailment_buckets"));
    CHECK(report["entailment_buckets"]["low"]["count"] == 1);
    CHECK(report["entailment_buckets"]["medium"]["count"] == 1);
    CHECK(report["entailment_buckets"]["high"]["count"] == 1);
    CHECK(report["entailment_buckets"]["medium"]["mean_delta"].get<double>() ==
          doctest::Approx(-1.0));
}

TEST_CASE("a config file supplies defaults and flags override it") {
    testutil::TempDir tmp;
    const json config{
        {"dataset_file", testutil::fixture("datasets/nq_mini.jsonl").string()},
        {"dataset", "nq"},
        {"variant", "sa-nr"},
        {"prompts",
         {{"sa-nr", testutil::fixture("prompts/toy_sa_nr.txt").string()}}},
        {"no_retrieval", true},
        {"seed", 5},
        {"output", (tmp / "from_config.jsonl").string()},
        {"generation",
         {{"transcript", testutil::fixture("transcripts/toy_singlehop.jsonl").string()}}}};
    testutil::spit(tmp / "config.json", config.dump(2));

    SUBCASE("config alone") {
        REQUIRE(run_cli("run --config " + q(tmp / "config.json"), tmp / "log.txt") == 0);
        CHECK(read_jsonl_as<RunRecord>(tmp / "from_config.jsonl").size() == 4);
    }

    SUBCASE("a flag overrides the config value") {
        REQUIRE(run_cli("run --config " + q(tmp / "config.json") + "--out " +
                            q(tmp / "override.jsonl"),
                        tmp / "log.txt") == 0);
        CHECK(std::filesystem::exists(tmp / "override.jsonl"));
        CHECK(!std::filesystem::exists(tmp / "from_config.jsonl"));
    }
}

TEST_CASE("input problems exit 1 with every error listed") {
    testutil::TempDir tmp;
    const int exit_code =
        run_cli("run --dataset-file missing.jsonl --no-retrieval", tmp / "log.txt");
    CHECK(exit_code == 1);
    const std::string log = testutil::slurp(tmp / "log.txt");
    CHECK(log.find("dataset file not found") != std::string::npos);
    CHECK(log.find("no generation backend") != std::string::npos);
    CHECK(log.find("prompt file") != std::string::npos);

    CHECK(run_cli("run --dataset bogus --dataset-file " +
                      q(testutil::fixture("datasets/nq_mini.jsonl")) + "--no-retrieval " +
                      "--prompt sa-nr " + q(testutil::fixture("prompts/toy_sa_nr.txt")) +
                      "--transcript " +
                      q(testutil::fixture("transcripts/toy_singlehop.jsonl")),
                  tmp / "log2.txt") == 1);
    CHECK(run_cli("frobnicate", tmp / "log3.txt") == 1);
}

TEST_CASE("an unreachable generation backend exits 2") {
    testutil::TempDir tmp;
    const std::string args =
        std::string("run --dataset-file ") +
        q(testutil::fixture("datasets/nq_mini.jsonl")) +
        "--dataset nq --variant sa-nr --prompt sa-nr " +
        q(testutil::fixture("prompts/toy_sa_nr.txt")) +
        "--no-retrieval --gen-url http://127.0.0.1:9 --jobs 1 --sample 1 --out " +
        q(tmp / "r.jsonl");
    CHECK(run_cli(args, tmp / "log.txt") == 2);
}

TEST_CASE("gendata writes a deterministic single-hop corpus with a manifest") {
    testutil::TempDir tmp;
    const std::string base =
        std::string("gendata --dataset-file ") +
        q(testutil::fixture("datasets/nq_mini.jsonl")) +
        "--dataset nq --prompt sa-nr " + q(testutil::fixture("prompts/toy_sa_nr.txt")) +
        "--index " + q(testutil::fixture("indexes/toy_index.jsonl")) + "--transcript " +
        q(testutil::fixture("transcripts/toy_singlehop.jsonl")) + "--seed 11 ";

    REQUIRE(run_cli(base + "--corpus-out " + q(tmp / "corpus_a.jsonl") + "--manifest " +
                        q(tmp / "manifest.json"),
                    tmp / "log.txt") == 0);
    REQUIRE(run_cli(base + "--corpus-out " + q(tmp / "corpus_b.jsonl") + "--manifest " +
                        q(tmp / "manifest_b.json"),
                    tmp / "log_b.txt") == 0);
    CHECK(testutil::slurp(tmp / "corpus_a.jsonl") == testutil::slurp(tmp / "corpus_b.jsonl"));

    const json manifest = json::parse(testutil::slurp(tmp / "manifest.json"));
    CHECK(manifest["mode"] == "single-hop");
    CHECK(manifest["questions_considered"] == 4);
    CHECK(manifest["filtered_unanswerable"] == 1);
    CHECK(manifest["questions_kept"] == 3);
    CHECK(manifest["acceptance_rate"].get<double>() == doctest::Approx(0.75));

    const auto corpus = read_jsonl_as<TrainingExample>(tmp / "corpus_a.jsonl");
    CHECK(corpus.size() == 3);
}

TEST_CASE("gendata splits multi-hop decompositions into per-step examples") {
    testutil::TempDir tmp;
    const std::string args =
        std::string("gendata --dataset-file ") +
        q(testutil::fixture("datasets/twowiki_mini.jsonl")) +
        "--dataset 2wikimqa --mode self-consistency --prompt sa-nr " +
        q(testutil::fixture("prompts/toy_sa_nr.txt")) + "--index " +
        q(testutil::fixture("indexes/toy_index.jsonl")) + "--transcript " +
        q(testutil::fixture("transcripts/toy_multihop.jsonl")) + "--seed 11 " +
        "--corpus-out " + q(tmp / "corpus.jsonl") + "--manifest " +
        q(tmp / "manifest.json");
    REQUIRE(run_cli(args, tmp / "log.txt") == 0);

    const json manifest = json::parse(testutil::slurp(tmp / "manifest.json"));
    CHECK(manifest["mode"] == "self-consistency");
    CHECK(manifest["questions_considered"] == 3);
    // m3's scripted decomposition is consistent but wrong.
    CHECK(manifest["filtered_disagreement"] == 1);
    CHECK(manifest["questions_kept"] == 2);

    const auto corpus = read_jsonl_as<TrainingExample>(tmp / "corpus.jsonl");
    CHECK(corpus.size() == 10);  // two kept 2-hop questions, five pairs each
}

TEST_CASE("build-index snapshots a search backend into an index file") {
    httplib::Server server;
    server.Post("/search", [](const httplib::Request& req, httplib::Response& res) {
        const json body = json::parse(req.body);
        const int top_k = body.at("top_k").get<int>();
        json results = json::array();
        for (int r = 1; r <= top_k; ++r) {
            results.push_back({{"rank", r},
                               {"title", "T" + std::to_string(r)},
                               {"text", "snippet " + std::to_string(r)}});
        }
        res.set_content(json{{"results", results}}.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    testutil::TempDir tmp;
    const std::string url = "http://127.0.0.1:" + std::to_string(port);
    const int exit_code = run_cli(
        std::string("build-index --questions ") +
            q(testutil::fixture("datasets/nq_mini.jsonl")) + "--dataset nq --url " + url +
            " --top-k 3 --out " + q(tmp / "index.jsonl"),
        tmp / "log.txt");
    server.stop();
    listener.join();
    REQUIRE(exit_code == 0);

    const RetrievalIndex index = RetrievalIndex::load(tmp / "index.jsonl");
    CHECK(index.query_count() == 4);
    CHECK(index.average_low_rank() == doctest::Approx(3.0));

    const json manifest = json::parse(testutil::slurp(tmp / "index.jsonl.manifest.json"));
    CHECK(manifest["indexed"] == 4);
    CHECK(manifest["partial"] == false);
    CHECK(manifest["lowrank_unavailable"].empty());
}
