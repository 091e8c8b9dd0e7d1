// Command-line front end: run / verify / stats / perf subcommands over
// scenario files. Reports are deterministic JSON; exit codes are part of
// the contract (see README).

#include "tad/metrics.hpp"
#include "tad/random_toy.hpp"
#include "tad/report.hpp"
#include "tad/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

using nlohmann::json;

void write_or_print(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw tad::Error("cannot open output file: " + out_path);
    out << text;
}

std::string format_run_table(const json& report) {
    std::string text;
    text += "scenario: " + report.at("scenario").get<std::string>() + "\n";
    text += "status:   " + report.at("status").get<std::string>() + "\n";
    text += "trace:   ";
    for (const auto& t : report.at("trace")) text += " " + t.get<std::string>();
    text += "\n";
    text += "step  |S|  safe_mass     entropy       density  chosen\n";
    for (const auto& s : report.at("steps")) {
        char line[160];
        const std::string chosen =
            s.at("chosen").is_null() ? "-" : s.at("chosen").get<std::string>();
        const std::string entropy =
            s.at("semantic_entropy_nats").is_null()
                ? std::string("-")
                : std::to_string(s.at("semantic_entropy_nats").get<double>());
        std::snprintf(line, sizeof(line), "%4d  %3d  %-12.10g  %-12s  %-7.5g  %s\n",
                      s.at("step").get<int>(), s.at("safe_set_size").get<int>(),
                      s.at("safe_mass").get<double>(), entropy.c_str(),
                      s.at("density").get<double>(), chosen.c_str());
        text += line;
    }
    for (const auto& note : report.at("discrepancy_notes")) {
        text += "note: " + note.at("quantity").get<std::string>() + " computed " +
                std::to_string(note.at("computed").get<double>()) + " vs quoted " +
                std::to_string(note.at("quoted").get<double>()) + "\n";
    }
    return text;
}

int run_command(const std::string& scenario_path, const std::string& out_path,
                const std::string& verdicts_path, const std::string& format) {
    tad::Scenario scenario = tad::load_scenario(scenario_path);
    tad::RunReport report = tad::run_scenario(scenario);

    if (!verdicts_path.empty()) {
        std::ofstream vlog(verdicts_path, std::ios::binary);
        if (!vlog) throw tad::Error("cannot open verdict log: " + verdicts_path);
        for (const tad::AgentVerdict& v : report.decode.verdicts) {
            vlog << json{{"step", v.step},
                         {"agent", v.agent},
                         {"token", v.token.surface},
                         {"decision", tad::to_string(v.decision)},
                         {"justification", v.justification}}
                        .dump()
                 << "\n";
        }
        report.json["verdict_log"] = verdicts_path;
    }

    if (format == "table") {
        write_or_print(format_run_table(report.json), out_path);
    } else {
        write_or_print(tad::dump_json(report.json), out_path);
    }

    bool goldens_ok = true;
    if (report.json.contains("golden_checks")) {
        for (const auto& check : report.json.at("golden_checks")) {
            goldens_ok = goldens_ok && check.at("pass").get<bool>();
        }
    }
    const int code = tad::exit_code_for(report.decode.status);
    if (code == tad::exit_code::ok && !goldens_ok) return tad::exit_code::verify_failed;
    return code;
}

int verify_command(const std::string& scenario_path, int max_len, int random_trials,
                   std::uint64_t seed, const std::string& out_path,
                   const std::string& format) {
    bool all_pass = true;
    json doc;
    std::string text;

    if (!scenario_path.empty()) {
        tad::Scenario scenario = tad::load_scenario(scenario_path);
        tad::VerifyReport report = tad::verify_scenario(scenario, max_len);
        all_pass = all_pass && report.all_pass;
        doc["scenario_checks"] = report.json;
        text += format_verify_report(report);
    }

    if (random_trials > 0) {
        // Randomized theorem suite over generated toy scenarios; the seed
        // only steers generation, each scenario itself is deterministic.
        int violations = 0;
        std::string first_failure;
        for (int i = 0; i < random_trials; ++i) {
            const tad::RandomToy toy = tad::make_random_toy(seed + static_cast<std::uint64_t>(i));
            const tad::OracleReport cert =
                tad::certify_oracle(toy.oracle, toy.kb, toy.vocab, toy.max_len);
            if (!cert.sound || !cert.complete) {
                ++violations;
                if (first_failure.empty()) {
                    first_failure = "trial " + std::to_string(i) + ": certification failed";
                }
                continue;
            }
            const tad::DecodeResult decode =
                tad::tad_decode(toy.model, toy.oracle, toy.vocab, toy.max_len);
            for (std::size_t n = 0; n <= decode.trace.length(); ++n) {
                if (!tad::knowledge_consistent(decode.trace.take(n), toy.kb)) {
                    ++violations;
                    if (first_failure.empty()) {
                        first_failure = "trial " + std::to_string(i) + ": consistency violated";
                    }
                    break;
                }
            }
            for (const tad::Trace& y : tad::enumerate_truthful(toy.kb, toy.vocab, toy.max_len)) {
                const std::size_t limit = std::min(decode.trace.length(), y.length());
                std::size_t j = 0;
                while (j < limit && decode.trace[j] == y[j]) ++j;
                if (j == limit) continue;
                if (toy.model.sequence_log_prob(decode.trace.take(j + 1)) <
                    toy.model.sequence_log_prob(y.take(j + 1))) {
                    ++violations;
                    if (first_failure.empty()) {
                        first_failure = "trial " + std::to_string(i) + ": dominance violated";
                    }
                    break;
                }
            }
        }
        json randomized{{"trials", random_trials},
                        {"seed", seed},
                        {"violations", violations}};
        if (!first_failure.empty()) randomized["first_failure"] = first_failure;
        doc["randomized"] = randomized;
        all_pass = all_pass && violations == 0;
        text += "[" + std::string(violations == 0 ? "PASS" : "FAIL") +
                "] randomized-theorem-suite: " + std::to_string(random_trials) +
                " scenarios, " + std::to_string(violations) + " violations\n";
    }

    doc["all_pass"] = all_pass;
    if (format == "table") {
        write_or_print(text, out_path);
    } else {
        write_or_print(tad::dump_json(doc), out_path);
    }
    return all_pass ? tad::exit_code::ok : tad::exit_code::verify_failed;
}

struct StatsRow {
    std::string name;
    tad::BenchmarkCounts counts;
    std::optional<double> safe_mass;
};

StatsRow parse_stats_row(const std::string& flag) {
    // NAME=total,answered,correct,abstained[,safe_mass]
    const auto eq = flag.find('=');
    if (eq == std::string::npos) {
        throw tad::ValidationError("--row expects NAME=total,answered,correct,abstained");
    }
    StatsRow row;
    row.name = flag.substr(0, eq);
    std::vector<long long> values;
    std::string rest = flag.substr(eq + 1);
    std::size_t pos = 0;
    std::vector<std::string> fields;
    while (pos != std::string::npos) {
        const auto comma = rest.find(',', pos);
        fields.push_back(rest.substr(pos, comma == std::string::npos ? comma : comma - pos));
        pos = comma == std::string::npos ? comma : comma + 1;
    }
    if (fields.size() != 4 && fields.size() != 5) {
        throw tad::ValidationError("--row expects 4 or 5 comma-separated values");
    }
    try {
        row.counts.n_total = std::stoll(fields[0]);
        row.counts.n_answered = std::stoll(fields[1]);
        row.counts.n_correct = std::stoll(fields[2]);
        row.counts.n_abstained = std::stoll(fields[3]);
        if (fields.size() == 5) row.safe_mass = std::stod(fields[4]);
    } catch (const std::exception&) {
        throw tad::ValidationError("--row values must be numeric");
    }
    return row;
}

json benchmark_report_json(const tad::BenchmarkReport& r) {
    json j;
    j["accuracy"] = tad::round12(r.accuracy);
    j["error"] = tad::round12(r.error);
    j["coverage"] = tad::round12(r.coverage);
    j["accuracy_given_answered"] = r.accuracy_given_answered
                                       ? json(tad::round12(*r.accuracy_given_answered))
                                       : json(nullptr);
    j["utility"] = tad::round12(r.utility);
    j["relative_gain"] = r.relative_gain ? json(tad::round12(*r.relative_gain)) : json(nullptr);
    j["error_reduction"] =
        r.error_reduction ? json(tad::round12(*r.error_reduction)) : json(nullptr);
    j["flags"] = r.flags;
    return j;
}

int stats_command(long long total, long long answered, long long correct, long long abstained,
                  double omega, const std::vector<long long>& baseline,
                  const std::vector<std::string>& rows, bool table,
                  const std::string& out_path) {
    const tad::RiskPolicy policy{omega};

    if (!rows.empty()) {
        // Multi-row aggregate layout; the first row is the baseline the
        // relative columns are computed against.
        std::vector<StatsRow> parsed;
        for (const std::string& r : rows) parsed.push_back(parse_stats_row(r));
        std::optional<tad::BenchmarkCounts> base;
        std::string text = "Method              Acc.    Err.    Coverage  Utility   SafeMass\n";
        json json_rows = json::array();
        for (const StatsRow& row : parsed) {
            const tad::BenchmarkReport rep = tad::benchmark_stats(row.counts, policy, base);
            if (!base) base = row.counts;
            char line[200];
            std::snprintf(line, sizeof(line), "%-18s  %5.1f%%  %5.1f%%  %7.1f%%  %-8.6g  %s\n",
                          row.name.c_str(), rep.accuracy * 100.0, rep.error * 100.0,
                          rep.coverage * 100.0, rep.utility,
                          row.safe_mass ? std::to_string(*row.safe_mass).substr(0, 4).c_str()
                                        : "-");
            text += line;
            json jr = benchmark_report_json(rep);
            jr["name"] = row.name;
            if (row.safe_mass) jr["safe_mass"] = *row.safe_mass;
            json_rows.push_back(std::move(jr));
        }
        if (table) {
            write_or_print(text, out_path);
        } else {
            write_or_print(tad::dump_json(json{{"rows", json_rows}}), out_path);
        }
        return tad::exit_code::ok;
    }

    tad::BenchmarkCounts counts{total, answered, correct, abstained};
    std::optional<tad::BenchmarkCounts> base;
    if (!baseline.empty()) {
        if (baseline.size() != 4) {
            throw tad::ValidationError(
                "--baseline expects: total answered correct abstained");
        }
        base = tad::BenchmarkCounts{baseline[0], baseline[1], baseline[2], baseline[3]};
    }
    const tad::BenchmarkReport report = tad::benchmark_stats(counts, policy, base);
    if (table) {
        char line[400];
        std::snprintf(line, sizeof(line),
                      "accuracy  %.10g\nerror     %.10g\ncoverage  %.10g\nutility   %.10g\n",
                      report.accuracy, report.error, report.coverage, report.utility);
        std::string text = line;
        if (report.relative_gain) {
            text += "relative_gain   " + std::to_string(*report.relative_gain) + "\n";
        }
        if (report.error_reduction) {
            text += "error_reduction " + std::to_string(*report.error_reduction) + "\n";
        }
        write_or_print(text, out_path);
    } else {
        write_or_print(tad::dump_json(benchmark_report_json(report)), out_path);
    }
    return tad::exit_code::ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"truth-aware decoding engine"};
    app.require_subcommand(1);

    // --- run ---
    auto* run = app.add_subcommand("run", "execute a scenario and emit its report");
    std::string run_scenario_path, run_out, run_verdicts, run_format = "json";
    run->add_option("--scenario", run_scenario_path, "scenario JSON file")->required();
    run->add_option("--out", run_out, "write the report here instead of stdout");
    run->add_option("--verdicts", run_verdicts, "write the agent verdict log (JSON lines)");
    run->add_option("--format", run_format, "json | table")
        ->check(CLI::IsMember({"json", "table"}));

    // --- verify ---
    auto* verify = app.add_subcommand("verify", "enumeration-based theorem checks");
    std::string verify_scenario_path, verify_out, verify_format = "json";
    int verify_max_len = 4;
    int verify_random = 0;
    std::uint64_t verify_seed = 0;
    verify->add_option("--scenario", verify_scenario_path, "scenario JSON file");
    verify->add_option("--max-len", verify_max_len, "enumeration horizon (default 4)");
    verify->add_option("--random", verify_random,
                       "additionally run N randomized toy scenarios");
    verify->add_option("--seed", verify_seed, "seed for the randomized suite");
    verify->add_option("--out", verify_out, "write the report here instead of stdout");
    verify->add_option("--format", verify_format, "json | table")
        ->check(CLI::IsMember({"json", "table"}));

    // --- stats ---
    auto* stats = app.add_subcommand("stats", "benchmark statistics from counts");
    long long s_total = 0, s_answered = 0, s_correct = 0, s_abstained = 0;
    double s_omega = 0.5;
    std::vector<long long> s_baseline;
    std::vector<std::string> s_rows;
    bool s_table = false;
    std::string s_out;
    stats->add_option("--total", s_total, "number of prompts");
    stats->add_option("--answered", s_answered, "prompts answered");
    stats->add_option("--correct", s_correct, "answers judged correct");
    stats->add_option("--abstained", s_abstained, "prompts abstained");
    stats->add_option("--omega", s_omega, "utility weight for abstentions (default 0.5)");
    stats->add_option("--baseline", s_baseline,
                      "baseline counts: total answered correct abstained")
        ->expected(4);
    stats->add_option("--row", s_rows,
                      "aggregate row NAME=total,answered,correct,abstained[,safe_mass]; "
                      "first row is the baseline");
    stats->add_flag("--table", s_table, "render as a text table");
    stats->add_option("--out", s_out, "write the report here instead of stdout");

    // --- perf ---
    auto* perf = app.add_subcommand("perf", "analytic performance model");
    std::string p_scenario, p_out;
    double p_cpi0 = -1, p_hkb = 0, p_chit = 0, p_cmiss = 0, p_cagents = 0, p_clock = 1.0;
    std::vector<double> p_amdahl;
    std::vector<double> p_complexity;
    std::vector<double> p_pipeline;
    perf->add_option("--scenario", p_scenario, "read perf parameters from a scenario file");
    perf->add_option("--cpi0", p_cpi0, "base cycles per token");
    perf->add_option("--h-kb", p_hkb, "KB hit rate");
    perf->add_option("--c-hit", p_chit, "cycles per KB hit");
    perf->add_option("--c-miss", p_cmiss, "cycles per KB miss");
    perf->add_option("--c-agents", p_cagents, "per-token agent overhead");
    perf->add_option("--clock", p_clock, "clock rate in Hz");
    perf->add_option("--amdahl", p_amdahl, "fraction f and factor s")->expected(2);
    perf->add_option("--complexity", p_complexity,
                     "vocab_size horizon oracle_cost_seconds delta_avg batch_factor")
        ->expected(5);
    perf->add_option("--pipeline", p_pipeline, "stage times: t_lm t_fv t_mr t_cm")
        ->expected(4);
    perf->add_option("--out", p_out, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed()) {
            return run_command(run_scenario_path, run_out, run_verdicts, run_format);
        }
        if (verify->parsed()) {
            if (verify_scenario_path.empty() && verify_random == 0) {
                throw tad::ValidationError("verify needs --scenario and/or --random N");
            }
            return verify_command(verify_scenario_path, verify_max_len, verify_random,
                                  verify_seed, verify_out, verify_format);
        }
        if (stats->parsed()) {
            return stats_command(s_total, s_answered, s_correct, s_abstained, s_omega,
                                 s_baseline, s_rows, s_table, s_out);
        }
        if (perf->parsed()) {
            tad::PerfSpec spec;
            nlohmann::json reference = nlohmann::json::object();
            if (!p_scenario.empty()) {
                tad::Scenario scenario = tad::load_scenario(p_scenario);
                if (!scenario.perf) {
                    throw tad::ValidationError("scenario has no perf section");
                }
                spec = *scenario.perf;
                reference = scenario.reference_values;
            }
            if (p_cpi0 >= 0) {
                spec.cpi = tad::CpiParams{p_cpi0, p_hkb, p_chit, p_cmiss, p_cagents, p_clock};
            }
            if (!p_amdahl.empty()) spec.amdahl.emplace_back(p_amdahl[0], p_amdahl[1]);
            if (!p_complexity.empty()) {
                spec.complexity = tad::ComplexityParams{p_complexity[0], p_complexity[1],
                                                        p_complexity[2], p_complexity[3],
                                                        p_complexity[4]};
            }
            if (!p_pipeline.empty()) {
                spec.pipeline = tad::PipelineStages{p_pipeline[0], p_pipeline[1], p_pipeline[2],
                                                    p_pipeline[3]};
            }
            if (!spec.cpi && spec.amdahl.empty() && !spec.complexity && !spec.pipeline) {
                throw tad::ValidationError("perf needs a scenario or explicit parameters");
            }
            write_or_print(tad::dump_json(tad::build_perf_report(spec, reference)), p_out);
            return tad::exit_code::ok;
        }
    } catch (const tad::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return tad::exit_code::parse;
    } catch (const tad::BudgetExceededError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return tad::exit_code::budget;
    } catch (const tad::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return tad::exit_code::validation;
    } catch (const tad::UndefinedContextError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return tad::exit_code::validation;
    } catch (const tad::UnknownTokenError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return tad::exit_code::validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tad::exit_code::internal;
    }
    return tad::exit_code::internal;
}
