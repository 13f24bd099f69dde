#include <random>

#include <doctest.h>

#include "raqa/nligate.hpp"
#include "testutil.hpp"

using namespace raqa;

namespace {

DecompositionTrace two_hop_trace() {
    DecompositionTrace trace;
    trace.question = "original question?";
    trace.steps.push_back({"first follow-up?", "first answer"});
    trace.steps.push_back({"second follow-up?", "second answer"});
    trace.final_answer = "final";
    return trace;
}

ContextBundle three_snippets() {
    ContextBundle bundle;
    bundle.append({"q0", 1, "", "snippet zero", NoiseTier::Top1, ""});
    bundle.append({"q1", 1, "", "snippet one", NoiseTier::Top1, ""});
    bundle.append({"q2", 1, "", "snippet two", NoiseTier::Top1, ""});
    return bundle;
}

}  // namespace

TEST_CASE("build_hypothesis uses the literal template") {
    CHECK(build_hypothesis("Who wrote it?", "Homer") == "Q: Who wrote it? A: Homer");
    CHECK_THROWS_AS(build_hypothesis("", "a"), InputError);
    CHECK_THROWS_AS(build_hypothesis("q", ""), InputError);
}

TEST_CASE("build_premise selects the snippet scope") {
    const ContextBundle bundle = three_snippets();
    CHECK(build_premise(bundle, PremiseScope::PerStep) == "snippet zero");
    CHECK(build_premise(bundle, PremiseScope::All) ==
          "snippet zero\nsnippet one\nsnippet two");
    CHECK_THROWS_AS(build_premise({}, PremiseScope::All), InputError);
}

TEST_CASE("evaluate runs one check per step plus the final answer") {
    std::vector<EntailmentRequest> seen;
    testutil::FnEntailment entail([&](const EntailmentRequest& request) {
        seen.push_back(request);
        return EntailmentScore{0.9, 0.05, 0.05};
    });

    const GateDecision decision = evaluate(two_hop_trace(), three_snippets(), entail);
    CHECK(decision.verdict == Verdict::Accept);
    REQUIRE(decision.checks.size() == 3);
    CHECK(decision.checks[0].hypothesis == "Q: first follow-up? A: first answer");
    CHECK(decision.checks[2].hypothesis == "Q: original question? A: final");
    // Multi-hop: the whole bundle backs every check.
    for (const EntailmentRequest& r : seen) {
        CHECK(r.premise == "snippet zero\nsnippet one\nsnippet two");
    }
}

TEST_CASE("single-hop traces are checked against their single snippet") {
    DecompositionTrace trace;
    trace.question = "q?";
    trace.final_answer = "a";
    ContextBundle bundle;
    bundle.append({"q?", 1, "", "only snippet", NoiseTier::Top1, ""});

    std::vector<std::string> premises;
    testutil::FnEntailment entail([&](const EntailmentRequest& request) {
        premises.push_back(request.premise);
        return EntailmentScore{1.0, 0.0, 0.0};
    });
    const GateDecision decision = evaluate(trace, bundle, entail);
    CHECK(decision.checks.size() == 1);
    CHECK(premises == std::vector<std::string>{"only snippet"});
}

TEST_CASE("threshold boundary: 0.5 accepts, 0.4999 backs off") {
    testutil::FnEntailment at_boundary(
        [](const EntailmentRequest&) { return EntailmentScore{0.5, 0.25, 0.25}; });
    CHECK(evaluate(two_hop_trace(), three_snippets(), at_boundary).verdict ==
          Verdict::Accept);

    testutil::FnEntailment below(
        [](const EntailmentRequest&) { return EntailmentScore{0.4999, 0.25, 0.25}; });
    const GateDecision decision = evaluate(two_hop_trace(), three_snippets(), below);
    CHECK(decision.verdict == Verdict::BackOff);
    CHECK(!decision.backoff_reason.empty());
}

TEST_CASE("any single sub-threshold check forces back-off") {
    for (int weak = 0; weak < 3; ++weak) {
        int call = 0;
        testutil::FnEntailment entail([&](const EntailmentRequest&) {
            const double p = call == weak ? 0.2 : 0.95;
            ++call;
            return EntailmentScore{p, 0.0, 0.0};
        });
        const GateDecision decision = evaluate(two_hop_trace(), three_snippets(), entail);
        CHECK(decision.verdict == Verdict::BackOff);
        CHECK(decision.min_p_entail() == doctest::Approx(0.2));
    }
}

TEST_CASE("raising the threshold never flips a back-off to an accept") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> probs = {uniform(rng), uniform(rng), uniform(rng)};
        auto verdict_at = [&](double threshold) {
            std::size_t call = 0;
            testutil::FnEntailment entail([&](const EntailmentRequest&) {
                return EntailmentScore{probs[call++ % probs.size()], 0.0, 0.0};
            });
            return evaluate(two_hop_trace(), three_snippets(), entail, threshold).verdict;
        };
        const double lo = uniform(rng);
        const double hi = std::max(lo, uniform(rng));
        if (verdict_at(lo) == Verdict::BackOff) CHECK(verdict_at(hi) == Verdict::BackOff);
        if (verdict_at(hi) == Verdict::Accept) CHECK(verdict_at(lo) == Verdict::Accept);
    }
}

TEST_CASE("evaluate refuses failed traces") {
    DecompositionTrace failed;
    failed.failed = true;
    testutil::FnEntailment entail(
        [](const EntailmentRequest&) { return EntailmentScore{1.0, 0.0, 0.0}; });
    CHECK_THROWS_AS(evaluate(failed, three_snippets(), entail), InputError);
}

TEST_CASE("bucket boundaries are 1/3 and 2/3, medium inclusive") {
    const std::vector<BucketInput> decisions = {
        {0.1, 1.0, 0.0},        // low
        {1.0 / 3.0, 1.0, 1.0},  // medium (inclusive lower bound)
        {0.5, 0.0, 1.0},        // medium
        {2.0 / 3.0, 1.0, 0.0},  // medium (inclusive upper bound)
        {0.9, 1.0, 0.0},        // high
    };
    const BucketTable table = bucket_entailment(decisions);
    CHECK(table.total == 5);
    CHECK(table.low.count == 1);
    CHECK(table.medium.count == 3);
    CHECK(table.high.count == 1);
    CHECK(table.low.share == doctest::Approx(0.2));
    CHECK(table.medium.mean_delta == doctest::Approx((0.0 - 1.0 + 1.0) / 3.0));
    CHECK(table.high.mean_delta == doctest::Approx(1.0));

    const BucketTable empty = bucket_entailment({});
    CHECK(empty.total == 0);
    CHECK(empty.low.count == 0);
}

TEST_CASE("min_p_entail is the decision statistic") {
    GateDecision decision;
    decision.checks.push_back({"h1", "p", {0.8, 0.1, 0.1}});
    decision.checks.push_back({"h2", "p", {0.3, 0.3, 0.4}});
    CHECK(decision.min_p_entail() == doctest::Approx(0.3));
    CHECK(GateDecision{}.min_p_entail() == doctest::Approx(0.0));
}
