// Acceptance suite: executes every acceptance criterion end to end and
// prints one pass/fail line per criterion. Usage:
//
//   tad_acceptance <path-to-cli> <path-to-scenario-dir>
//
// Exit code 0 iff every criterion passes.

#include "tad/decoder.hpp"
#include "tad/metrics.hpp"
#include "tad/random_toy.hpp"
#include "tad/report.hpp"
#include "tad/scenario.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

std::string g_cli;
std::filesystem::path g_scenarios;
int g_failures = 0;

struct CliResult {
    std::string output;
    int exit_code = -1;
};

CliResult run_cli(const std::string& args) {
    const std::string command = "'" + g_cli + "' " + args + " 2>/dev/null";
    CliResult result;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return result;
    char buffer[4096];
    std::size_t n = 0;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.output.append(buffer, n);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string scenario_path(const std::string& name) {
    return (g_scenarios / (name + ".json")).string();
}

class Criterion {
public:
    Criterion(int number, std::string title)
        : number_(number), title_(std::move(title)), start_(clock::now()) {}

    void require(bool condition, const std::string& detail) {
        if (!condition && failure_.empty()) failure_ = detail;
        ok_ = ok_ && condition;
    }

    double elapsed_seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

    ~Criterion() {
        char line[512];
        if (ok_) {
            std::snprintf(line, sizeof(line), "[PASS] criterion %d: %s (%.2fs)", number_,
                          title_.c_str(), elapsed_seconds());
        } else {
            std::snprintf(line, sizeof(line), "[FAIL] criterion %d: %s -- %s", number_,
                          title_.c_str(), failure_.c_str());
            ++g_failures;
        }
        std::cout << line << "\n";
    }

private:
    using clock = std::chrono::steady_clock;
    int number_;
    std::string title_;
    clock::time_point start_;
    bool ok_ = true;
    std::string failure_;
};

bool near(double value, double target, double tolerance) {
    return std::abs(value - target) <= tolerance;
}

// ---------------------------------------------------------------------
// 1. Benchmark arithmetic through the stats subcommand.
// ---------------------------------------------------------------------
void criterion_1() {
    Criterion c(1, "benchmark statistics reproduce the tabulated arithmetic");

    const CliResult baseline =
        run_cli("stats --total 1000 --answered 1000 --correct 720 --abstained 0");
    c.require(baseline.exit_code == 0, "baseline stats call failed");
    if (baseline.exit_code == 0) {
        const json doc = json::parse(baseline.output);
        c.require(doc.at("accuracy").get<double>() == 0.72, "baseline accuracy != 0.72");
        c.require(doc.at("coverage").get<double>() == 1.0, "baseline coverage != 1");
    }

    const CliResult answer_all = run_cli(
        "stats --total 1000 --answered 1000 --correct 890 --abstained 0 "
        "--baseline 1000 1000 720 0");
    c.require(answer_all.exit_code == 0, "answer-all stats call failed");
    if (answer_all.exit_code == 0) {
        const json doc = json::parse(answer_all.output);
        c.require(doc.at("accuracy").get<double>() == 0.89, "accuracy != 0.89");
        c.require(near(doc.at("relative_gain").get<double>(), 0.236, 0.001),
                  "relative gain outside 0.236 +/- 0.001");
        c.require(near(doc.at("error_reduction").get<double>(), 0.607, 0.001),
                  "error reduction outside 0.607 +/- 0.001");
    }

    const CliResult abstain = run_cli(
        "stats --total 1000 --answered 920 --correct 864 --abstained 80 --omega 0.5");
    c.require(abstain.exit_code == 0, "abstain stats call failed");
    if (abstain.exit_code == 0) {
        const json doc = json::parse(abstain.output);
        c.require(doc.at("coverage").get<double>() == 0.92, "coverage != 0.92");
        c.require(doc.at("utility").get<double>() == 0.904, "utility != 0.904");
        c.require(doc.at("accuracy").get<double>() == 0.864, "accuracy != 0.864");
    }

    c.require(c.elapsed_seconds() < 1.0, "stats goldens exceeded 1 s");
}

// ---------------------------------------------------------------------
// 2. The oracle-guided prefix-selection example, end to end.
// ---------------------------------------------------------------------
void criterion_2() {
    Criterion c(2, "worked example: trace, safe mass, tightened step, entropy note");

    const CliResult run = run_cli("run --scenario '" + scenario_path("worked_example") + "'");
    c.require(run.exit_code == 0, "run exited nonzero");
    if (run.exit_code != 0) return;
    const json doc = json::parse(run.output);

    c.require(doc.at("trace") == json::array({"a", "b"}), "trace != [a, b]");
    const json& steps = doc.at("steps");
    c.require(steps.size() == 2, "expected two steps");
    c.require(near(steps[0].at("safe_mass").get<double>(), 0.90, 1e-12),
              "step-1 safe mass not 0.90 within 1e-12");
    c.require(steps[1].at("safe_set") == json::array({"b"}), "step-2 safe set != {b}");
    c.require(steps[1].at("semantic_entropy_nats").get<double>() == 0.0,
              "step-2 entropy != 0");
    c.require(steps[1].at("density").get<double>() == 0.25, "step-2 density != 0.25");

    // direct evaluation of the definition, recorded with a note against
    // the quoted 0.99 figure
    c.require(near(steps[0].at("semantic_entropy_nats").get<double>(),
                   1.0531597178426317, 1e-9),
              "step-1 entropy not the directly evaluated 1.053 nats");
    bool note_found = false;
    for (const json& note : doc.at("discrepancy_notes")) {
        if (note.at("quantity") == "semantic_entropy_step_1" &&
            near(note.at("quoted").get<double>(), 0.99, 1e-9) &&
            near(note.at("computed").get<double>(), 1.053, 1e-3)) {
            note_found = true;
        }
    }
    c.require(note_found, "missing discrepancy note for the step-1 entropy");
}

// ---------------------------------------------------------------------
// 3. Toy-program goldens: the frozen selection outputs.
// ---------------------------------------------------------------------
void criterion_3() {
    Criterion c(3, "toy goldens: three facts, then fact / support selections");

    const CliResult run = run_cli("run --scenario '" + scenario_path("lean_toy") + "'");
    c.require(run.exit_code == 0, "lean_toy run exited nonzero");
    if (run.exit_code == 0) {
        const json doc = json::parse(run.output);
        c.require(doc.at("trace") == json::array({"fact", "fact", "fact"}),
                  "lean_toy trace != [fact, fact, fact]");
    }

    // greedy selection under the rational score table
    const tad::Scenario scores = tad::load_scenario(scenario_path("rational_scores"));
    const tad::ScoringModel& model = *scores.model;
    const tad::Vocabulary& v = scores.vocabulary;
    const std::vector<tad::Token> safe{v.at(0), v.at(1)};
    c.require(tad::greedy_select(model, safe, tad::Trace{}).surface == "fact",
              "empty-prefix selection != fact");
    c.require(tad::greedy_select(model, safe, tad::Trace({v.at(0)})).surface == "support",
              "post-fact selection != support");
}

// ---------------------------------------------------------------------
// 4. Randomized theorem suite over generated toy scenarios.
// ---------------------------------------------------------------------
void criterion_4() {
    Criterion c(4, "theorem suite over 200 randomized certified scenarios");
    constexpr int kScenarios = 200;
    constexpr std::uint64_t kSeed = 424200;

    int violations = 0;
    std::string first;
    auto flag = [&](const std::string& what, int i) {
        ++violations;
        if (first.empty()) first = what + " at trial " + std::to_string(i);
    };

    for (int i = 0; i < kScenarios; ++i) {
        const tad::RandomToy toy = tad::make_random_toy(kSeed + static_cast<std::uint64_t>(i));

        // enumeration-certified sound + complete
        const tad::OracleReport cert =
            tad::certify_oracle(toy.oracle, toy.kb, toy.vocab, toy.max_len);
        if (!cert.sound || !cert.complete) {
            flag("certification", i);
            continue;
        }

        // (a) every decode prefix is knowledge-consistent
        const tad::DecodeResult decode =
            tad::tad_decode(toy.model, toy.oracle, toy.vocab, toy.max_len);
        for (std::size_t n = 0; n <= decode.trace.length(); ++n) {
            if (!tad::knowledge_consistent(decode.trace.take(n), toy.kb)) {
                flag("consistency", i);
                break;
            }
        }

        // (b) local truthful dominance against exhaustive enumeration
        for (const tad::Trace& y : tad::enumerate_truthful(toy.kb, toy.vocab, toy.max_len)) {
            const std::size_t limit = std::min(decode.trace.length(), y.length());
            std::size_t j = 0;
            while (j < limit && decode.trace[j] == y[j]) ++j;
            if (j == limit) continue;
            if (toy.model.sequence_log_prob(decode.trace.take(j + 1)) <
                toy.model.sequence_log_prob(y.take(j + 1))) {
                flag("dominance", i);
                break;
            }
        }

        // (c) guarded decoding equals decoding under the synthetic oracle
        const std::vector<tad::VerificationAgent> cohort{
            tad::make_oracle_agent("wrapped", toy.oracle, 0.0)};
        const tad::DecodeResult guarded =
            tad::guarded_decode(toy.model, cohort, toy.vocab, toy.max_len);
        const tad::DecodeResult plain =
            tad::tad_decode(toy.model, tad::synthetic_oracle(cohort), toy.vocab, toy.max_len);
        bool equal = guarded.trace == plain.trace && guarded.status == plain.status &&
                     guarded.steps.size() == plain.steps.size();
        for (std::size_t k = 0; equal && k < guarded.steps.size(); ++k) {
            equal = guarded.steps[k].safe_ids == plain.steps[k].safe_ids;
        }
        if (!equal) flag("guarded equivalence", i);

        // (d) a blinded oracle leaves a truthful completion unreachable
        const tad::BlindedOracle blinded = tad::blind_one_truthful_pair(toy);
        const tad::Trace completion = blinded.prefix.append(blinded.token);
        if (!tad::knowledge_consistent(completion, toy.kb)) flag("blind-spot truthful", i);
        if (tad::check_completeness(blinded.oracle, toy.kb, toy.vocab, toy.max_len).complete) {
            flag("blind-spot completeness", i);
        }
        const std::vector<tad::Token> safe =
            tad::safe_set(blinded.oracle, blinded.prefix, toy.vocab);
        if (std::find(safe.begin(), safe.end(), blinded.token) != safe.end()) {
            flag("blind-spot filtering", i);
        }
        const tad::DecodeResult blinded_decode =
            tad::tad_decode(toy.model, blinded.oracle, toy.vocab, toy.max_len);
        if (blinded_decode.trace.length() > blinded.prefix.length() &&
            blinded_decode.trace.take(blinded.prefix.length()) == blinded.prefix &&
            blinded_decode.trace[blinded.prefix.length()] == blinded.token) {
            flag("blind-spot reachability", i);
        }
    }

    c.require(violations == 0, std::to_string(violations) + " violations, first: " + first);
    c.require(c.elapsed_seconds() < 60.0, "theorem suite exceeded 60 s");
}

// ---------------------------------------------------------------------
// 5. Safe-entropy bound over randomized model / safe-set pairs.
// ---------------------------------------------------------------------
void criterion_5() {
    Criterion c(5, "entropy bound over 10^4 randomized model and safe-set pairs");
    std::mt19937_64 rng(515151);
    std::uniform_int_distribution<int> size_dist(2, 16);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int checked = 0;
    int violations = 0;
    while (checked < 10000) {
        const int size = size_dist(rng);
        std::vector<std::string> surfaces;
        for (int i = 0; i < size; ++i) surfaces.push_back("w" + std::to_string(i));
        tad::Vocabulary vocab = tad::Vocabulary::from_surfaces(surfaces);
        std::vector<double> probs(static_cast<std::size_t>(size));
        double sum = 0.0;
        for (double& p : probs) {
            p = unit(rng) < 0.15 ? 0.0 : unit(rng);
            sum += p;
        }
        if (sum == 0.0) continue;
        for (double& p : probs) p /= sum;
        std::unordered_map<std::string, std::vector<double>> contexts;
        contexts[""] = std::move(probs);
        const tad::ScoringModel model(vocab, tad::ContextMode::Exact, true,
                                      std::move(contexts), std::nullopt);
        std::vector<tad::Token> safe;
        for (const tad::Token& t : vocab) {
            if (unit(rng) < 0.5) safe.push_back(t);
        }
        if (safe.empty()) continue;
        if (tad::safe_mass(model, tad::Trace{}, safe) <= 0.0) continue;
        ++checked;
        const double h = tad::semantic_entropy(model, tad::Trace{}, safe);
        const double bound = tad::entropy_bound(model, tad::Trace{}, safe);
        if (h > bound + 1e-9) ++violations;
        if (h > std::log(static_cast<double>(safe.size())) + 1e-9) ++violations;
    }
    c.require(violations == 0, std::to_string(violations) + " bound violations");
    c.require(c.elapsed_seconds() < 10.0, "entropy sweep exceeded 10 s");
}

// ---------------------------------------------------------------------
// 6. Performance-model goldens through the perf subcommand.
// ---------------------------------------------------------------------
void criterion_6() {
    Criterion c(6, "performance goldens: CPI, throughput, speedups, complexity");

    const CliResult perf = run_cli("perf --scenario '" + scenario_path("perf_model") + "'");
    c.require(perf.exit_code == 0, "perf exited nonzero");
    if (perf.exit_code != 0) return;
    const json doc = json::parse(perf.output);

    c.require(doc.at("cpi").get<double>() == 4.52, "CPI != 4.52 exactly");
    c.require(doc.at("cpi_cached").get<double>() == 3.98, "cached CPI != 3.98 exactly");
    c.require(near(doc.at("tps").get<double>(), 5.531e8, 5.531e8 * 0.001),
              "TPS outside 5.531e8 +/- 0.1%");
    c.require(near(doc.at("tps_cached").get<double>(), 6.281e8, 6.281e8 * 0.001),
              "cached TPS outside 6.281e8 +/- 0.1%");
    c.require(near(doc.at("cached_speedup").get<double>(), 1.14, 0.01),
              "cache speedup outside 1.14 +/- 0.01");

    const json& amdahl = doc.at("amdahl");
    c.require(near(amdahl[0].at("speedup").get<double>(), 1.2121, 1e-3),
              "amdahl(0.35, 2) outside 1.2121 +/- 1e-3");
    c.require(near(amdahl[1].at("speedup").get<double>(), 1.3043, 1e-3),
              "amdahl(0.35, 3) outside 1.3043 +/- 1e-3");
    bool note_found = false;
    for (const json& note : doc.at("discrepancy_notes")) {
        if (note.at("quantity") == "amdahl_2" &&
            near(note.at("quoted").get<double>(), 1.36, 1e-9)) {
            note_found = true;
        }
    }
    c.require(note_found, "missing discrepancy note against the quoted 1.36");

    const json& complexity = doc.at("complexity");
    c.require(near(complexity.at("naive_seconds").get<double>(), 256.0, 2.56),
              "naive runtime outside 256 s +/- 1%");
    c.require(near(complexity.at("pruned_seconds").get<double>(), 7.68, 0.0768),
              "pruned runtime outside 7.68 s +/- 1%");
    c.require(near(complexity.at("speedup").get<double>(), 33.3, 0.5),
              "complexity speedup outside 33.3 +/- 0.5");
}

// ---------------------------------------------------------------------
// 7. Abstention behavior: threshold-off equivalence and backoff.
// ---------------------------------------------------------------------
void criterion_7() {
    Criterion c(7, "abstention: tau=0 equivalence, budgeted backoff, scripted rescue");

    const char* bundled[] = {"worked_example", "lean_toy",       "rational_scores",
                             "abstain_stuck",   "abstain_rescue", "incomplete_oracle",
                             "proof_toy",      "guarded_cohort", "perf_model"};
    for (const char* name : bundled) {
        tad::Scenario plain = tad::load_scenario(scenario_path(name));
        plain.decode.algorithm = "tad";
        tad::Scenario abstain = tad::load_scenario(scenario_path(name));
        abstain.decode.algorithm = "abstain";
        abstain.decode.tau = 0.0;
        abstain.decode.retry_budget = 0;
        abstain.retriever.kind = "null";
        abstain.retriever.script.clear();

        json a = tad::run_scenario(plain).json;
        json b = tad::run_scenario(abstain).json;
        a.erase("algorithm");
        b.erase("algorithm");
        if (tad::dump_json(a) != tad::dump_json(b)) {
            c.require(false, std::string("tau=0 budget=0 diverges from the plain decoder on ") +
                                 name);
        }
    }

    // no improvement: abstains after exactly retry_budget retrieval events
    const CliResult stuck = run_cli("run --scenario '" + scenario_path("abstain_stuck") + "'");
    c.require(stuck.exit_code == tad::exit_code::abstained,
              "abstain_stuck did not exit with the abstention code");
    if (stuck.exit_code == tad::exit_code::abstained) {
        const json doc = json::parse(stuck.output);
        c.require(doc.at("status") == "abstained", "abstain_stuck status != abstained");
        c.require(doc.at("retrieval_events").size() == 2,
                  "abstain_stuck retrieval events != retry_budget");
        c.require(doc.at("trace") == json::array(), "abstain_stuck emitted tokens");
    }

    // the scripted fact lifts the safe mass above tau and the decode completes
    const CliResult rescue = run_cli("run --scenario '" + scenario_path("abstain_rescue") + "'");
    c.require(rescue.exit_code == 0, "abstain_rescue exited nonzero");
    if (rescue.exit_code == 0) {
        const json doc = json::parse(rescue.output);
        c.require(doc.at("status") == "completed", "abstain_rescue did not complete");
        c.require(doc.at("trace") == json::array({"b", "b"}), "abstain_rescue trace != [b, b]");
        c.require(doc.at("retrieval_events").size() == 1 &&
                      doc.at("retrieval_events")[0].at("improved").get<bool>(),
                  "abstain_rescue retrieval event missing or unimproved");
    }
}

// ---------------------------------------------------------------------
// 8. Byte-level determinism of every bundled report.
// ---------------------------------------------------------------------
void criterion_8() {
    Criterion c(8, "reports are byte-identical across consecutive runs");
    const char* bundled[] = {"worked_example", "lean_toy",       "rational_scores",
                             "abstain_stuck",   "abstain_rescue", "incomplete_oracle",
                             "proof_toy",      "guarded_cohort", "perf_model"};
    for (const char* name : bundled) {
        const std::string args = "run --scenario '" + scenario_path(name) + "'";
        const CliResult first = run_cli(args);
        const CliResult second = run_cli(args);
        c.require(first.exit_code == second.exit_code,
                  std::string("exit codes differ across runs for ") + name);
        c.require(!first.output.empty() && first.output == second.output,
                  std::string("report bytes differ across runs for ") + name);
    }
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: tad_acceptance <cli> <scenario-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_scenarios = argv[2];

    try {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8();
    } catch (const std::exception& e) {
        std::cerr << "acceptance suite aborted: " << e.what() << "\n";
        return 1;
    }

    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
