#include <doctest.h>

#include "tad/perf.hpp"

#include <cmath>

using namespace tad;

namespace {

constexpr double kClock = 2.5e9;

CpiParams base_params() { return {3.0, 0.8, 0.4, 3.0, 0.6, kClock}; }
CpiParams cached_params() { return {3.0, 0.8, 0.1, 3.0, 0.3, kClock}; }

// Minimal hand-built decode results for the measured profile.
DecodeResult run_with(const std::vector<double>& densities,
                      const std::vector<double>& costs,
                      const std::vector<std::uint64_t>& queries) {
    DecodeResult r;
    const Vocabulary v = Vocabulary::from_surfaces({"tok"});
    std::vector<Token> emitted;
    for (std::size_t i = 0; i < densities.size(); ++i) {
        StepRecord s;
        s.step = static_cast<int>(i) + 1;
        s.density = densities[i];
        s.agent_cost = costs[i];
        s.agent_costs = {costs[i]};
        s.oracle_queries = queries[i];
        s.chosen = v.at(0);
        s.safe_ids = {0};
        s.safe_set_size = 1;
        r.steps.push_back(std::move(s));
        emitted.push_back(v.at(0));
    }
    r.trace = Trace(emitted);
    return r;
}

} // namespace

TEST_SUITE("perf") {

TEST_CASE("additive CPI model") {
    CHECK(cpi(base_params()) == doctest::Approx(4.52).epsilon(1e-12));
    CHECK(cpi(cached_params()) == doctest::Approx(3.98).epsilon(1e-12));
    CHECK(cpi({7.0, 0.5, 0.0, 0.0, 0.0, 1.0}) == 7.0); // overheads off
    CHECK_THROWS_AS(cpi({1.0, 1.5, 0.0, 0.0, 0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(cpi({-1.0, 0.5, 0.0, 0.0, 0.0, 1.0}), ValidationError);
}

TEST_CASE("cpi is linear in each cost and monotone in the hit rate") {
    CpiParams p = base_params();
    const double reference = cpi(p);
    p.c_agents += 1.0;
    CHECK(cpi(p) == doctest::Approx(reference + 1.0).epsilon(1e-12));
    p.c_agents -= 1.0;
    p.cpi0 += 2.5;
    CHECK(cpi(p) == doctest::Approx(reference + 2.5).epsilon(1e-12));

    // with c_hit < c_miss, raising the hit rate lowers the CPI
    double previous = std::numeric_limits<double>::infinity();
    for (double h : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        CpiParams q = base_params();
        q.h_kb = h;
        const double value = cpi(q);
        CHECK(value < previous);
        previous = value;
    }
}

TEST_CASE("throughput and the cached speedup") {
    const double tps = throughput(base_params());
    CHECK(tps == doctest::Approx(5.531e8).epsilon(1e-3));
    const double tps_cached = throughput(cached_params());
    CHECK(tps_cached == doctest::Approx(6.281e8).epsilon(1e-3));
    CHECK(tps_cached / tps == doctest::Approx(1.14).epsilon(0.01));
    CHECK(throughput({1.0, 0.0, 0.0, 0.0, 0.0, 1.0}) == 1.0);
}

TEST_CASE("amdahl speedups") {
    CHECK(amdahl(0.35, 2.0) == doctest::Approx(1.2121).epsilon(1e-3));
    CHECK(amdahl(0.35, 3.0) == doctest::Approx(1.3043).epsilon(1e-3));
    CHECK(amdahl(0.0, 10.0) == 1.0);
    for (double f : {0.1, 0.35, 0.5, 0.99}) {
        CHECK(amdahl(f, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(amdahl(1.5, 2.0), ValidationError);
    CHECK_THROWS_AS(amdahl(0.5, 0.5), ValidationError);
}

TEST_CASE("amdahl stays within [1, 1/(1-f)) and approaches the limit") {
    for (double f : {0.1, 0.35, 0.7, 0.9}) {
        const double limit = 1.0 / (1.0 - f);
        for (double s : {1.0, 2.0, 10.0, 1000.0}) {
            const double speedup = amdahl(f, s);
            CHECK(speedup >= 1.0);
            CHECK(speedup < limit);
        }
        CHECK(amdahl(f, 1e9) == doctest::Approx(limit).epsilon(1e-6));
    }
}

TEST_CASE("complexity estimate") {
    const ComplexityParams naive{50000, 128, 40e-6, 1.0, 1.0};
    const ComplexityEstimate base = complexity_estimate(naive);
    CHECK(base.naive_seconds == doctest::Approx(256.0).epsilon(1e-9));
    CHECK(base.pruned_seconds == doctest::Approx(256.0).epsilon(1e-9));
    CHECK(base.speedup == 1.0);

    const ComplexityParams pruned{50000, 128, 40e-6, 0.12, 4.0};
    const ComplexityEstimate est = complexity_estimate(pruned);
    CHECK(est.naive_seconds == doctest::Approx(256.0).epsilon(1e-9));
    CHECK(est.pruned_seconds == doctest::Approx(7.68).epsilon(1e-9));
    CHECK(est.speedup == doctest::Approx(33.333).epsilon(1e-3));
    // the speedup is exactly batch_factor / delta_avg
    CHECK(est.speedup == 4.0 / 0.12);
    CHECK_THROWS_AS(complexity_estimate({0, 1, 1, 1, 1}), ValidationError);
}

TEST_CASE("pipeline bottleneck selection") {
    const PipelineBottleneck lm = pipeline_bottleneck({4, 1, 1, 1});
    CHECK(lm.stage == "LM");
    CHECK(lm.throughput == 0.25);

    const PipelineBottleneck tie = pipeline_bottleneck({2, 2, 2, 2});
    CHECK(tie.stage == "LM"); // declared order breaks ties
    CHECK(tie.throughput == 0.5);

    CHECK(pipeline_bottleneck({1, 3, 1, 1}).stage == "FV");
    CHECK(pipeline_bottleneck({1, 1, 5, 1}).stage == "MR");
    CHECK(pipeline_bottleneck({1, 1, 1, 9}).stage == "CM");
    CHECK_THROWS_AS(pipeline_bottleneck({0, 0, 0, 0}), AllZeroError);
    CHECK_THROWS_AS(pipeline_bottleneck({-1, 0, 0, 1}), ValidationError);
}

TEST_CASE("measured profile averages densities and costs") {
    const DecodeResult run = run_with({0.75, 0.25}, {0.6, 0.6}, {4, 4});
    const MeasuredProfile profile = measured_profile({run}, base_params());
    CHECK(profile.delta_avg == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(profile.queries_per_token == 4.0);
    CHECK(profile.mean_agent_cost == doctest::Approx(0.6).epsilon(1e-12));
    // constant cohort cost 0.6 reproduces the configured CPI parameters
    CHECK(profile.modeled_cpi == doctest::Approx(cpi(base_params())).epsilon(1e-12));
    CHECK(profile.tokens == 2);
}

TEST_CASE("measured profile is additive: c_tad plus the cohort mean") {
    const DecodeResult run = run_with({0.5, 0.5, 0.5}, {0.2, 0.4, 0.9}, {2, 2, 2});
    CpiParams p = base_params();
    const MeasuredProfile profile = measured_profile({run}, p);
    CpiParams without_agents = p;
    without_agents.c_agents = 0.0;
    const double c_tad = cpi(without_agents);
    CHECK(profile.modeled_cpi == c_tad + profile.mean_agent_cost);
    CHECK(profile.per_agent_mean_cost.size() == 1);
    CHECK(profile.per_agent_mean_cost[0] ==
          doctest::Approx((0.2 + 0.4 + 0.9) / 3.0).epsilon(1e-12));
}

TEST_CASE("measured profile rejects empty inputs") {
    CHECK_THROWS_AS(measured_profile({}, base_params()), ValidationError);
    DecodeResult empty;
    CHECK_THROWS_AS(measured_profile({empty}, base_params()), ValidationError);
}

TEST_CASE("candidate pruning drives queries per token towards the density") {
    // constant safe set {fact, support}: density 2/3 every step
    const Vocabulary v = Vocabulary::from_surfaces({"fact", "support", "filler"});
    const Oracle oracle("toy", [](const Trace&, const Token& w, const std::vector<Fact>&) {
        return w.surface != "filler";
    });
    const ScoringModel model(v, ContextMode::Exact, true, {},
                             std::vector<double>(3, 1.0 / 3.0));
    const DecodeResult full = tad_decode(model, oracle, v, 10);
    const DecodeResult pruned = tad_decode(model, oracle, v, 10, Trace{}, true);
    CHECK(pruned.trace == full.trace);

    const MeasuredProfile full_profile = measured_profile({full}, base_params());
    const MeasuredProfile pruned_profile = measured_profile({pruned}, base_params());
    CHECK(full_profile.queries_per_token == 3.0); // whole vocabulary each step
    // pruned scans converge on the previous safe set: the query ratio
    // approaches the measured density (exact only in the long-run limit)
    const double ratio = pruned_profile.queries_per_token / full_profile.queries_per_token;
    CHECK(std::abs(ratio - pruned_profile.delta_avg) < 0.05);
    CHECK(pruned_profile.delta_avg == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

} // TEST_SUITE
