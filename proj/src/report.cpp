#include "tad/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace tad {

using nlohmann::json;

double round12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::strtod(buf, nullptr);
}

std::string dump_json(const json& j) {
    return j.dump(2) + "\n";
}

namespace {

json trace_to_json(const Trace& trace) {
    json out = json::array();
    for (const Token& t : trace) out.push_back(t.surface);
    return out;
}

json step_to_json(const StepRecord& s, const Vocabulary& vocab) {
    json out;
    out["step"] = s.step;
    json safe = json::array();
    for (int id : s.safe_ids) safe.push_back(vocab.at(id).surface);
    out["safe_set"] = std::move(safe);
    out["safe_set_size"] = s.safe_set_size;
    out["safe_mass"] = round12(s.safe_mass);
    out["semantic_entropy_nats"] =
        s.semantic_entropy ? json(round12(*s.semantic_entropy)) : json(nullptr);
    out["density"] = round12(s.density);
    out["chosen"] = s.chosen ? json(s.chosen->surface) : json(nullptr);
    out["oracle_queries"] = s.oracle_queries;
    out["agent_cost"] = round12(s.agent_cost);
    if (!s.agent_costs.empty()) {
        json costs = json::array();
        for (double c : s.agent_costs) costs.push_back(round12(c));
        out["agent_costs"] = std::move(costs);
    }
    return out;
}

// Flat registry of named quantities a scenario may quote reference values
// against; unknown names in reference_values are a validation error.
void add_quantity(std::map<std::string, double>& registry, const std::string& name,
                  double value) {
    registry[name] = value;
}

json make_discrepancy_notes(const json& reference_values,
                            const std::map<std::string, double>& registry) {
    json notes = json::array();
    for (auto it = reference_values.begin(); it != reference_values.end(); ++it) {
        auto found = registry.find(it.key());
        if (found == registry.end()) {
            throw ValidationError("reference_values names unknown quantity '" + it.key() + "'");
        }
        if (!it.value().is_number()) {
            throw ValidationError("reference_values." + it.key() + " must be a number");
        }
        const double quoted = it.value().get<double>();
        const double computed = found->second;
        if (std::abs(computed - quoted) > 0.005) {
            notes.push_back(json{
                {"quantity", it.key()},
                {"computed", round12(computed)},
                {"quoted", round12(quoted)},
                {"note", "direct evaluation disagrees with the quoted reference figure"}});
        }
    }
    return notes;
}

json build_perf_section(const PerfSpec& spec, std::map<std::string, double>& registry,
                        const std::vector<DecodeResult>* run) {
    json out;
    if (spec.cpi) {
        const double base_cpi = cpi(*spec.cpi);
        const double base_tps = throughput(*spec.cpi);
        out["cpi"] = round12(base_cpi);
        out["tps"] = round12(base_tps);
        add_quantity(registry, "cpi", base_cpi);
        add_quantity(registry, "tps", base_tps);
        if (spec.cpi_cached) {
            const double cached_cpi = cpi(*spec.cpi_cached);
            const double cached_tps = throughput(*spec.cpi_cached);
            out["cpi_cached"] = round12(cached_cpi);
            out["tps_cached"] = round12(cached_tps);
            out["cached_speedup"] = round12(cached_tps / base_tps);
            add_quantity(registry, "cpi_cached", cached_cpi);
            add_quantity(registry, "tps_cached", cached_tps);
            add_quantity(registry, "cached_speedup", cached_tps / base_tps);
        }
        if (run && !run->empty()) {
            bool any_token = false;
            for (const DecodeResult& r : *run) {
                if (r.emitted() > 0) any_token = true;
            }
            if (any_token) {
                const MeasuredProfile profile = measured_profile(*run, *spec.cpi);
                json measured;
                measured["delta_avg"] = round12(profile.delta_avg);
                measured["queries_per_token"] = round12(profile.queries_per_token);
                measured["mean_agent_cost"] = round12(profile.mean_agent_cost);
                if (!profile.per_agent_mean_cost.empty()) {
                    json per = json::array();
                    for (double c : profile.per_agent_mean_cost) per.push_back(round12(c));
                    measured["per_agent_mean_cost"] = std::move(per);
                }
                measured["modeled_cpi"] = round12(profile.modeled_cpi);
                measured["tokens"] = profile.tokens;
                out["measured"] = std::move(measured);
                add_quantity(registry, "measured_delta_avg", profile.delta_avg);
                add_quantity(registry, "measured_modeled_cpi", profile.modeled_cpi);
            }
        }
    }
    if (!spec.amdahl.empty()) {
        json inst = json::array();
        for (std::size_t i = 0; i < spec.amdahl.size(); ++i) {
            const auto& [f, s] = spec.amdahl[i];
            const double speedup = amdahl(f, s);
            inst.push_back(json{{"f", f}, {"s", s}, {"speedup", round12(speedup)}});
            add_quantity(registry, "amdahl_" + std::to_string(i + 1), speedup);
        }
        out["amdahl"] = std::move(inst);
    }
    if (spec.complexity) {
        const ComplexityEstimate est = complexity_estimate(*spec.complexity);
        out["complexity"] = json{{"naive_seconds", round12(est.naive_seconds)},
                                 {"pruned_seconds", round12(est.pruned_seconds)},
                                 {"speedup", round12(est.speedup)}};
        add_quantity(registry, "complexity_naive_seconds", est.naive_seconds);
        add_quantity(registry, "complexity_pruned_seconds", est.pruned_seconds);
        add_quantity(registry, "complexity_speedup", est.speedup);
    }
    if (spec.pipeline) {
        const PipelineBottleneck b = pipeline_bottleneck(*spec.pipeline);
        out["pipeline"] = json{{"bottleneck", b.stage},
                               {"service_time", round12(b.service_time)},
                               {"throughput", round12(b.throughput)}};
        add_quantity(registry, "pipeline_throughput", b.throughput);
    }
    return out;
}

DecodeResult execute(const Scenario& sc, Retriever& retriever) {
    const ScoringModel& model = *sc.model;
    const Oracle& oracle = *sc.oracle;
    const Vocabulary& vocab = sc.vocabulary;
    const Trace initial = sc.initial_trace();
    if (sc.decode.algorithm == "tad") {
        return tad_decode(model, oracle, vocab, sc.decode.horizon, initial,
                          sc.decode.prune_candidates);
    }
    if (sc.decode.algorithm == "guarded") {
        return guarded_decode(model, sc.agents, vocab, sc.decode.horizon, initial);
    }
    if (sc.decode.algorithm == "abstain") {
        return tad_decode_abstain(model, oracle, vocab, sc.decode.horizon, sc.decode.tau,
                                  retriever, sc.decode.retry_budget, initial);
    }
    if (sc.decode.algorithm == "proof") {
        return generate_proof(vocab, oracle, model, sc.make_proof_goal(),
                              sc.proof ? sc.proof->max_steps : 0);
    }
    throw ValidationError("unknown decode algorithm '" + sc.decode.algorithm + "'");
}

} // namespace

int exit_code_for(DecodeStatus status) {
    switch (status) {
        case DecodeStatus::Completed: return exit_code::ok;
        case DecodeStatus::Abstained: return exit_code::abstained;
        case DecodeStatus::EmptySafeSet: return exit_code::empty_safe_set;
        case DecodeStatus::BudgetExhausted: return exit_code::budget;
    }
    return exit_code::internal;
}

RunReport run_scenario(const Scenario& sc) {
    auto retriever = sc.make_retriever();
    DecodeResult result = execute(sc, *retriever);

    const ScoringModel& model = *sc.model;
    const RiskPolicy policy{sc.decode.omega};
    std::map<std::string, double> registry;

    json doc;
    doc["scenario"] = sc.name;
    doc["algorithm"] = sc.decode.algorithm;
    doc["status"] = to_string(result.status);
    doc["initial"] = trace_to_json(result.initial);
    doc["trace"] = trace_to_json(result.trace);

    json steps = json::array();
    for (const StepRecord& s : result.steps) {
        steps.push_back(step_to_json(s, sc.vocabulary));
        const std::string suffix = "_step_" + std::to_string(s.step);
        add_quantity(registry, "safe_mass" + suffix, s.safe_mass);
        if (s.semantic_entropy) {
            add_quantity(registry, "semantic_entropy" + suffix, *s.semantic_entropy);
        }
        add_quantity(registry, "density" + suffix, s.density);
    }
    doc["steps"] = std::move(steps);

    json events = json::array();
    for (const RetrievalEvent& e : result.retrieval_events) {
        events.push_back(json{{"step", e.step}, {"added", e.added}, {"improved", e.improved}});
    }
    doc["retrieval_events"] = std::move(events);

    // Metrics summary: means over steps with a non-empty safe set.
    double mass_sum = 0.0, entropy_sum = 0.0, density_sum = 0.0;
    std::size_t populated = 0, entropy_count = 0;
    for (const StepRecord& s : result.steps) {
        if (s.safe_set_size == 0) continue;
        ++populated;
        mass_sum += s.safe_mass;
        density_sum += s.density;
        if (s.semantic_entropy) {
            entropy_sum += *s.semantic_entropy;
            ++entropy_count;
        }
    }
    json metrics;
    metrics["omega"] = round12(policy.omega);
    metrics["mean_safe_mass"] =
        populated ? json(round12(mass_sum / static_cast<double>(populated))) : json(nullptr);
    metrics["mean_semantic_entropy_nats"] =
        entropy_count ? json(round12(entropy_sum / static_cast<double>(entropy_count)))
                      : json(nullptr);
    metrics["mean_semantic_entropy_bits"] =
        entropy_count
            ? json(round12(entropy_sum / static_cast<double>(entropy_count) / std::log(2.0)))
            : json(nullptr);
    metrics["mean_density"] =
        populated ? json(round12(density_sum / static_cast<double>(populated))) : json(nullptr);
    if (populated) {
        add_quantity(registry, "mean_safe_mass", mass_sum / static_cast<double>(populated));
        add_quantity(registry, "mean_density", density_sum / static_cast<double>(populated));
    }
    if (entropy_count) {
        add_quantity(registry, "mean_semantic_entropy",
                     entropy_sum / static_cast<double>(entropy_count));
    }

    // Risk after each step, against the knowledge base plus whatever the
    // session retrieved into its view.
    json risk_trajectory = json::array();
    {
        Trace prefix = result.initial;
        for (const StepRecord& s : result.steps) {
            if (s.chosen) prefix = prefix.append(*s.chosen);
            const bool consistent = knowledge_consistent(prefix, *sc.kb, result.overlay);
            const double r = risk(consistent, s.safe_mass, policy);
            risk_trajectory.push_back(json{{"step", s.step}, {"risk", round12(r)}});
        }
    }
    metrics["risk_trajectory"] = std::move(risk_trajectory);

    const double seq_log_prob = model.sequence_log_prob(result.trace);
    const double seq_prob = model.sequence_prob(result.trace);
    metrics["sequence_log_prob"] = round12(seq_log_prob);
    metrics["sequence_prob"] = round12(seq_prob);
    add_quantity(registry, "sequence_prob", seq_prob);
    doc["metrics"] = std::move(metrics);

    if (sc.perf) {
        const std::vector<DecodeResult> runs{result};
        doc["perf"] = build_perf_section(*sc.perf, registry, &runs);
    }

    doc["discrepancy_notes"] = make_discrepancy_notes(sc.reference_values, registry);

    // Golden checks declared in the scenario itself.
    if (!sc.expected.empty() && !sc.expected.is_null()) {
        json checks = json::array();
        for (auto it = sc.expected.begin(); it != sc.expected.end(); ++it) {
            json actual;
            if (it.key() == "trace") {
                actual = trace_to_json(result.trace);
            } else if (it.key() == "status") {
                actual = to_string(result.status);
            } else {
                throw ValidationError("expected." + it.key() +
                                      " is not a checkable golden (use trace | status)");
            }
            checks.push_back(json{{"name", it.key()},
                                  {"expected", it.value()},
                                  {"actual", actual},
                                  {"pass", actual == it.value()}});
        }
        doc["golden_checks"] = std::move(checks);
    }

    doc["verdict_log"] = json(nullptr);

    RunReport report;
    report.scenario_name = sc.name;
    report.decode = std::move(result);
    report.json = std::move(doc);
    return report;
}

namespace {

std::string describe_pair(const Trace& prefix, const Token& w) {
    return "(prefix '" + prefix.joined_surfaces() + "', token '" + w.surface + "')";
}

bool same_safe_steps(const DecodeResult& a, const DecodeResult& b) {
    if (a.trace != b.trace || a.status != b.status) return false;
    if (a.steps.size() != b.steps.size()) return false;
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        if (a.steps[i].safe_ids != b.steps[i].safe_ids) return false;
        if (a.steps[i].chosen.has_value() != b.steps[i].chosen.has_value()) return false;
        if (a.steps[i].chosen && !(*a.steps[i].chosen == *b.steps[i].chosen)) return false;
    }
    return true;
}

} // namespace

VerifyReport verify_scenario(const Scenario& sc, int max_len) {
    if (max_len < 1) throw ValidationError("verify max_len must be >= 1");
    VerifyReport report;
    const ScoringModel& model = *sc.model;
    const Oracle& oracle = *sc.oracle;
    const KnowledgeBase& kb = *sc.kb;
    const Vocabulary& vocab = sc.vocabulary;

    auto push = [&report](VerifyCheck check) {
        if (check.applicable && !check.pass) report.all_pass = false;
        report.checks.push_back(std::move(check));
    };

    // Oracle certification by enumeration.
    const OracleReport soundness = check_soundness(oracle, kb, vocab, max_len);
    {
        VerifyCheck c;
        c.name = "oracle-soundness";
        c.pass = soundness.sound;
        c.detail = soundness.sound
                       ? "no approved extension breaks knowledge consistency"
                       : "violation at " + describe_pair(soundness.counterexamples[0].prefix,
                                                         soundness.counterexamples[0].token);
        push(std::move(c));
    }
    const OracleReport completeness = check_completeness(oracle, kb, vocab, max_len);
    {
        VerifyCheck c;
        c.name = "oracle-completeness";
        c.pass = completeness.complete;
        c.detail = completeness.complete
                       ? "no consistent extension is rejected"
                       : "blind spot at " + describe_pair(completeness.counterexamples[0].prefix,
                                                          completeness.counterexamples[0].token);
        push(std::move(c));
    }

    // Safe extension invariance, re-derived through safe_set directly.
    {
        VerifyCheck c;
        c.name = "safe-extension-invariance";
        c.applicable = soundness.sound;
        if (!c.applicable) {
            c.detail = "hypothesis unmet: oracle is not sound";
        } else {
            c.pass = true;
            for (const Trace& x : enumerate_consistent(kb, vocab, max_len - 1)) {
                for (const Token& w : safe_set(oracle, x, vocab)) {
                    if (!knowledge_consistent(x.append(w), kb)) {
                        c.pass = false;
                        c.detail = "consistency lost at " + describe_pair(x, w);
                        break;
                    }
                }
                if (!c.pass) break;
            }
            if (c.pass) c.detail = "every safe extension of a consistent prefix stays consistent";
        }
        push(std::move(c));
    }

    // Decode once at the enumeration horizon for the trace-level checks.
    const DecodeResult decode = tad_decode(model, oracle, vocab, max_len);

    {
        VerifyCheck c;
        c.name = "consistency-preservation";
        c.applicable = soundness.sound;
        if (!c.applicable) {
            c.detail = "hypothesis unmet: oracle is not sound";
        } else {
            c.pass = true;
            for (std::size_t n = 0; n <= decode.trace.length(); ++n) {
                if (!knowledge_consistent(decode.trace.take(n), kb)) {
                    c.pass = false;
                    c.detail = "decoded prefix '" + decode.trace.take(n).joined_surfaces() +
                               "' is not knowledge-consistent";
                    break;
                }
            }
            if (c.pass) {
                c.detail = "all " + std::to_string(decode.trace.length() + 1) +
                           " decoded prefixes are knowledge-consistent";
            }
        }
        push(std::move(c));
    }

    {
        VerifyCheck c;
        c.name = "stepwise-dominance";
        c.pass = true;
        Trace prefix = decode.initial;
        for (const StepRecord& s : decode.steps) {
            if (!s.chosen) break;
            const double chosen_prob = model.prob(prefix, *s.chosen);
            for (int id : s.safe_ids) {
                if (model.prob(prefix, vocab.at(id)) > chosen_prob) {
                    c.pass = false;
                    c.detail = "step " + std::to_string(s.step) + ": '" +
                               vocab.at(id).surface + "' outscores the chosen token";
                    break;
                }
            }
            if (!c.pass) break;
            prefix = prefix.append(*s.chosen);
        }
        if (c.pass) c.detail = "chosen token maximizes the model over every recorded safe set";
        push(std::move(c));
    }

    {
        VerifyCheck c;
        c.name = "local-truthful-dominance";
        c.applicable = soundness.sound && completeness.complete;
        if (!c.applicable) {
            c.detail = "hypothesis unmet: oracle must be sound and complete";
        } else {
            c.pass = true;
            std::size_t compared = 0;
            for (const Trace& y : enumerate_truthful(kb, vocab, max_len)) {
                const std::size_t limit = std::min(decode.trace.length(), y.length());
                std::size_t j = 0;
                while (j < limit && decode.trace[j] == y[j]) ++j;
                if (j == limit) continue; // one is a prefix of the other
                ++compared;
                const double lhs = model.sequence_log_prob(decode.trace.take(j + 1));
                const double rhs = model.sequence_log_prob(y.take(j + 1));
                if (lhs < rhs) {
                    c.pass = false;
                    c.detail = "truthful sequence '" + y.joined_surfaces() +
                               "' outscores the decode at divergence index " +
                               std::to_string(j + 1);
                    break;
                }
            }
            if (c.pass) {
                c.detail = "decode dominates all " + std::to_string(compared) +
                           " diverging truthful sequences up to length " +
                           std::to_string(max_len);
            }
        }
        push(std::move(c));
    }

    {
        VerifyCheck c;
        c.name = "oracle-incompleteness-blind-spot";
        c.applicable = !completeness.complete;
        if (!c.applicable) {
            c.detail = "oracle is complete; no blind spot to demonstrate";
        } else {
            const Counterexample& cex = completeness.counterexamples[0];
            const Trace blocked = cex.prefix.append(cex.token);
            bool truthful = knowledge_consistent(blocked, kb);
            bool filtered = true;
            for (const Token& w : safe_set(oracle, cex.prefix, vocab)) {
                if (w == cex.token) filtered = false;
            }
            bool unreachable = true;
            if (decode.trace.length() > cex.prefix.length() &&
                decode.trace.take(cex.prefix.length()) == cex.prefix &&
                decode.trace[cex.prefix.length()] == cex.token) {
                unreachable = false;
            }
            c.pass = truthful && filtered && unreachable;
            c.detail = "truthful completion '" + blocked.joined_surfaces() +
                       "' is filtered out of the safe set and never decoded";
            if (!c.pass) c.detail = "blind-spot demonstration failed at " +
                                    describe_pair(cex.prefix, cex.token);
        }
        push(std::move(c));
    }

    {
        VerifyCheck c;
        c.name = "guarded-equivalence";
        std::vector<VerificationAgent> cohort = sc.agents;
        if (cohort.empty()) {
            cohort.push_back(make_oracle_agent("oracle", oracle, 0.0));
        }
        const Oracle synthetic = synthetic_oracle(cohort);
        const DecodeResult guarded = guarded_decode(model, cohort, vocab, max_len);
        const DecodeResult plain = tad_decode(model, synthetic, vocab, max_len);
        c.pass = same_safe_steps(guarded, plain);
        c.detail = c.pass ? "guarded decode equals plain decode under the joint-constraint oracle"
                          : "guarded decode diverges from the joint-constraint oracle decode";
        push(std::move(c));

        VerifyCheck justified;
        justified.name = "block-justifications";
        justified.pass = true;
        for (const AgentVerdict& v : guarded.verdicts) {
            if (v.decision != Decision::Accept && v.justification.empty()) {
                justified.pass = false;
                justified.detail = "agent '" + v.agent + "' blocked '" + v.token.surface +
                                   "' without a justification";
                break;
            }
        }
        if (justified.pass) justified.detail = "every non-accept verdict carries a justification";
        push(std::move(justified));
    }

    {
        VerifyCheck c;
        c.name = "safe-entropy-bound";
        c.pass = true;
        Trace prefix = decode.initial;
        for (const StepRecord& s : decode.steps) {
            if (s.safe_mass > 0.0) {
                std::vector<Token> safe;
                for (int id : s.safe_ids) safe.push_back(vocab.at(id));
                const double h = semantic_entropy(model, prefix, safe);
                const double bound = entropy_bound(model, prefix, safe);
                const double cardinality = std::log(static_cast<double>(safe.size()));
                if (h > bound + 1e-9 || h > cardinality + 1e-9) {
                    c.pass = false;
                    c.detail = "entropy bound violated at step " + std::to_string(s.step);
                    break;
                }
            }
            if (!s.chosen) break;
            prefix = prefix.append(*s.chosen);
        }
        if (c.pass) c.detail = "semantic entropy within both bounds on every recorded step";
        push(std::move(c));
    }

    json checks = json::array();
    for (const VerifyCheck& c : report.checks) {
        checks.push_back(json{{"name", c.name},
                              {"applicable", c.applicable},
                              {"pass", c.pass},
                              {"detail", c.detail}});
    }
    report.json = json{{"checks", std::move(checks)}, {"all_pass", report.all_pass}};
    return report;
}

std::string format_verify_report(const VerifyReport& report) {
    std::string out;
    for (const VerifyCheck& c : report.checks) {
        const char* tag = !c.applicable ? "[SKIP]" : (c.pass ? "[PASS]" : "[FAIL]");
        out += tag;
        out += ' ';
        out += c.name;
        out += ": ";
        out += c.detail;
        out += '\n';
    }
    out += report.all_pass ? "all checks passed\n" : "one or more checks failed\n";
    return out;
}

nlohmann::json build_perf_report(const PerfSpec& spec, const json& reference_values) {
    std::map<std::string, double> registry;
    json doc = build_perf_section(spec, registry, nullptr);
    doc["discrepancy_notes"] = make_discrepancy_notes(reference_values, registry);
    return doc;
}

} // namespace tad
