#pragma once

// Deterministic run/verify reports. Object keys are emitted in sorted
// order and every float is rounded to 12 significant digits before
// serialization, so a report is byte-stable for fixed inputs.

#include "tad/scenario.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tad {

// Rounds through a %.12g representation.
double round12(double x);
// Canonical dump: sorted keys, two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& j);

struct RunReport {
    std::string scenario_name;
    DecodeResult decode;
    nlohmann::json json; // full canonical report document
};

// Executes the scenario's configured decoder and assembles the report:
// per-step metrics, summary, perf section, discrepancy notes against any
// declared reference values, and golden checks against `expected`.
RunReport run_scenario(const Scenario& scenario);

// Exit codes shared by the CLI and its tests.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int parse = 2;
inline constexpr int validation = 3;
inline constexpr int abstained = 4;
inline constexpr int empty_safe_set = 5;
inline constexpr int budget = 6;
inline constexpr int verify_failed = 7;
} // namespace exit_code

int exit_code_for(DecodeStatus status);

struct VerifyCheck {
    std::string name;
    bool applicable = true;
    bool pass = true;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_pass = true; // over applicable checks
    nlohmann::json json;
};

// Enumeration-backed certification of the scenario: oracle soundness and
// completeness, safe-extension invariance, consistency preservation,
// stepwise and local truthful dominance, guarded equivalence, the
// incompleteness blind-spot demonstration, and the entropy bound on every
// recorded step.
VerifyReport verify_scenario(const Scenario& scenario, int max_len);

// Text lines of a verify report: "[PASS]/[FAIL]/[SKIP] name: detail".
std::string format_verify_report(const VerifyReport& report);

// Perf report from explicit parameter sets (CLI path without a scenario).
nlohmann::json build_perf_report(const PerfSpec& spec, const nlohmann::json& reference_values);

} // namespace tad
