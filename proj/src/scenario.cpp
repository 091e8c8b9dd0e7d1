#include "tad/scenario.hpp"

#include <algorithm>
#include <fstream>

namespace tad {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ValidationError("scenario field '" + where + "': " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing required key '") + key + "'");
    return *it;
}

std::string get_string(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string get_string_or(const json& j, const char* key, const std::string& fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<std::string>();
}

double get_number(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    return v.get<double>();
}

std::optional<std::int64_t> opt_int(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::int64_t>();
}

Fact parse_fact(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected a fact object");
    Fact f;
    f.subject = get_string(j, "subject", where);
    f.relation = get_string(j, "relation", where);
    f.object = get_string(j, "object", where);
    f.valid_from = opt_int(j, "valid_from");
    f.valid_to = opt_int(j, "valid_to");
    f.validate();
    return f;
}

json fact_to_json(const Fact& f) {
    json j{{"subject", f.subject}, {"relation", f.relation}, {"object", f.object}};
    if (f.valid_from) j["valid_from"] = *f.valid_from;
    if (f.valid_to) j["valid_to"] = *f.valid_to;
    return j;
}

bool parse_verdict(const std::string& v, const std::string& where) {
    if (v == "allow") return true;
    if (v == "deny") return false;
    fail(where, "verdict must be 'allow' or 'deny', got '" + v + "'");
}

std::vector<Rule> parse_rules(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of rules");
    std::vector<Rule> rules;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        const json& r = j[i];
        Rule rule;
        rule.prefix_pattern = get_string(r, "prefix_pattern", at);
        rule.token_pattern = get_string(r, "token", at);
        rule.allow = parse_verdict(get_string(r, "verdict", at), at);
        rules.push_back(std::move(rule));
    }
    return rules;
}

json rules_to_json(const std::vector<Rule>& rules) {
    json out = json::array();
    for (const Rule& r : rules) {
        out.push_back(json{{"prefix_pattern", r.prefix_pattern},
                           {"token", r.token_pattern},
                           {"verdict", r.allow ? "allow" : "deny"}});
    }
    return out;
}

Token resolve_surface(const Vocabulary& vocab, const std::string& surface,
                      const std::string& where) {
    auto token = vocab.find_surface(surface);
    if (!token) fail(where, "unknown token surface '" + surface + "'");
    return *token;
}

std::vector<double> parse_score_vector(const json& probs, const Vocabulary& vocab,
                                       const std::string& where) {
    if (!probs.is_object()) fail(where, "expected an object of surface -> score");
    std::vector<double> v(vocab.size(), 0.0);
    for (auto it = probs.begin(); it != probs.end(); ++it) {
        const Token token = resolve_surface(vocab, it.key(), where);
        if (!it.value().is_number()) fail(where + "." + it.key(), "expected a number");
        v[static_cast<std::size_t>(token.id)] = it.value().get<double>();
    }
    return v;
}

CpiParams parse_cpi(const json& j, const std::string& where) {
    CpiParams p;
    p.cpi0 = get_number(j, "cpi0", where);
    p.h_kb = get_number(j, "h_kb", where);
    p.c_hit = get_number(j, "c_hit", where);
    p.c_miss = get_number(j, "c_miss", where);
    p.c_agents = get_number(j, "c_agents", where);
    p.clock_hz = j.contains("clock_hz") ? get_number(j, "clock_hz", where) : 1.0;
    p.validate();
    return p;
}

json cpi_to_json(const CpiParams& p) {
    return json{{"cpi0", p.cpi0},     {"h_kb", p.h_kb},
                {"c_hit", p.c_hit},   {"c_miss", p.c_miss},
                {"c_agents", p.c_agents}, {"clock_hz", p.clock_hz}};
}

} // namespace

std::unique_ptr<Retriever> Scenario::make_retriever() const {
    if (retriever.kind == "null") return std::make_unique<NullRetriever>();
    if (retriever.kind == "scripted") {
        return std::make_unique<ScriptedRetriever>(retriever.script);
    }
    throw ValidationError("unknown retriever kind '" + retriever.kind + "'");
}

ProofGoal Scenario::make_proof_goal() const {
    if (!proof) throw ValidationError("scenario declares no proof goal");
    ProofGoal goal;
    if (proof->goal_kind == "token_reached") {
        goal.kind = ProofGoal::Kind::TokenReached;
        goal.token = resolve_surface(vocabulary, proof->goal_token, "proof.goal.token");
    } else if (proof->goal_kind == "trace_equals") {
        goal.kind = ProofGoal::Kind::TraceEquals;
        std::vector<Token> tokens;
        for (const std::string& s : proof->goal_trace) {
            tokens.push_back(resolve_surface(vocabulary, s, "proof.goal.trace"));
        }
        goal.target = Trace(std::move(tokens));
    } else {
        throw ValidationError("proof goal kind must be token_reached | trace_equals");
    }
    return goal;
}

Trace Scenario::initial_trace() const {
    std::vector<Token> tokens;
    for (const std::string& s : decode.initial) {
        tokens.push_back(resolve_surface(vocabulary, s, "decode.initial"));
    }
    return Trace(std::move(tokens));
}

Scenario parse_scenario(const nlohmann::json& doc, const std::string& fallback_name) {
    if (!doc.is_object()) throw ValidationError("scenario document must be a JSON object");
    Scenario sc;
    sc.name = get_string_or(doc, "name", fallback_name);

    // --- vocabulary + per-token annotations ---
    const json& vocab_json = require(doc, "vocabulary", "scenario");
    if (!vocab_json.is_array() || vocab_json.empty()) {
        fail("vocabulary", "expected a non-empty array");
    }
    std::vector<Token> tokens;
    sc.annotations.resize(vocab_json.size());
    for (std::size_t i = 0; i < vocab_json.size(); ++i) {
        const std::string where = "vocabulary[" + std::to_string(i) + "]";
        const json& e = vocab_json[i];
        if (!e.is_object()) fail(where, "expected an object");
        tokens.push_back(Token{static_cast<int>(i), get_string(e, "surface", where)});
        TokenAnnotations& a = sc.annotations[i];
        if (e.contains("claim") && !e["claim"].is_null()) {
            const json& c = e["claim"];
            TokenClaim claim;
            claim.subject = get_string(c, "subject", where + ".claim");
            claim.relation = get_string(c, "relation", where + ".claim");
            claim.object = get_string(c, "object", where + ".claim");
            claim.at = opt_int(c, "at");
            a.claim = std::move(claim);
        }
        if (e.contains("binding") && !e["binding"].is_null()) {
            const json& b = e["binding"];
            a.binding = {get_string(b, "entity", where + ".binding"),
                         get_string(b, "attribute", where + ".binding")};
        }
        if (e.contains("topic") && !e["topic"].is_null()) a.topic = e["topic"].get<std::string>();
        if (e.contains("tense") && !e["tense"].is_null()) a.tense = e["tense"].get<std::string>();
    }
    sc.vocabulary = Vocabulary(std::move(tokens));

    // --- scoring model ---
    const json& model_json = require(doc, "model", "scenario");
    const ContextMode mode =
        context_mode_from_string(get_string_or(model_json, "context_mode", "exact"));
    const bool normalized =
        model_json.contains("normalized") ? model_json["normalized"].get<bool>() : true;
    std::unordered_map<std::string, std::vector<double>> contexts;
    if (model_json.contains("contexts")) {
        const json& ctxs = model_json["contexts"];
        if (!ctxs.is_array()) fail("model.contexts", "expected an array");
        for (std::size_t i = 0; i < ctxs.size(); ++i) {
            const std::string where = "model.contexts[" + std::to_string(i) + "]";
            const std::string key = get_string(ctxs[i], "key", where);
            if (contexts.count(key)) fail(where, "duplicate context key '" + key + "'");
            contexts[key] =
                parse_score_vector(require(ctxs[i], "probs", where), sc.vocabulary, where);
        }
    }
    std::optional<std::vector<double>> fallback;
    if (model_json.contains("fallback") && !model_json["fallback"].is_null()) {
        fallback = parse_score_vector(model_json["fallback"], sc.vocabulary, "model.fallback");
    }
    sc.model.emplace(sc.vocabulary, mode, normalized, std::move(contexts), std::move(fallback));

    // --- knowledge base ---
    const json& kb_json = require(doc, "kb", "scenario");
    sc.kb_spec.realization = get_string_or(kb_json, "realization", "rules");
    if (kb_json.contains("facts")) {
        const json& facts = kb_json["facts"];
        if (!facts.is_array()) fail("kb.facts", "expected an array");
        for (std::size_t i = 0; i < facts.size(); ++i) {
            sc.kb_spec.facts.push_back(
                parse_fact(facts[i], "kb.facts[" + std::to_string(i) + "]"));
        }
    }
    if (kb_json.contains("rules")) {
        sc.kb_spec.rules = parse_rules(kb_json["rules"], "kb.rules");
    }
    sc.kb_spec.default_allow =
        parse_verdict(get_string_or(kb_json, "default_verdict", "allow"), "kb.default_verdict");
    sc.kb_spec.require_support =
        kb_json.contains("require_support") && kb_json["require_support"].get<bool>();

    ClaimMap claims(sc.vocabulary.size());
    for (std::size_t i = 0; i < sc.annotations.size(); ++i) claims[i] = sc.annotations[i].claim;

    if (sc.kb_spec.realization == "rules") {
        sc.kb.emplace(make_rule_kb(sc.kb_spec.facts,
                                   RuleTable(sc.kb_spec.rules, sc.kb_spec.default_allow)));
    } else if (sc.kb_spec.realization == "triples") {
        sc.kb.emplace(
            make_triple_kb(sc.kb_spec.facts, claims, sc.kb_spec.require_support));
    } else {
        fail("kb.realization", "must be 'rules' or 'triples'");
    }

    // --- oracle ---
    if (doc.contains("oracle")) {
        const json& oracle_json = doc["oracle"];
        sc.oracle_spec.kind = get_string_or(oracle_json, "kind", "kb_backed");
        if (oracle_json.contains("rules")) {
            sc.oracle_spec.rules = parse_rules(oracle_json["rules"], "oracle.rules");
        }
        sc.oracle_spec.default_allow = parse_verdict(
            get_string_or(oracle_json, "default_verdict", "allow"), "oracle.default_verdict");
    }
    if (sc.oracle_spec.kind == "kb_backed") {
        if (sc.kb_spec.realization == "rules") {
            RuleTable table(sc.kb_spec.rules, sc.kb_spec.default_allow);
            sc.oracle.emplace("kb_backed(rules)",
                              [table](const Trace& x, const Token& w,
                                      const std::vector<Fact>&) { return table.allows(x, w); });
        } else {
            const std::vector<Fact> base = sc.kb_spec.facts;
            const bool require_support = sc.kb_spec.require_support;
            const ClaimMap claim_map = claims;
            sc.oracle.emplace(
                "kb_backed(triples)",
                [base, claim_map, require_support](const Trace&, const Token& w,
                                                   const std::vector<Fact>& extra) {
                    if (static_cast<std::size_t>(w.id) >= claim_map.size()) return true;
                    const auto& claim = claim_map[static_cast<std::size_t>(w.id)];
                    if (!claim) return true;
                    const ClaimCheck check = check_claim(*claim, base, extra);
                    if (check.status == ClaimStatus::Contradicted) return false;
                    if (require_support && check.status == ClaimStatus::Unknown) return false;
                    return true;
                });
        }
    } else if (sc.oracle_spec.kind == "table") {
        RuleTable table(sc.oracle_spec.rules, sc.oracle_spec.default_allow);
        sc.oracle.emplace("table", [table](const Trace& x, const Token& w,
                                           const std::vector<Fact>&) {
            return table.allows(x, w);
        });
    } else {
        fail("oracle.kind", "must be 'kb_backed' or 'table'");
    }

    // --- agents ---
    if (doc.contains("agents")) {
        const json& agents_json = doc["agents"];
        if (!agents_json.is_array()) fail("agents", "expected an array");
        for (std::size_t i = 0; i < agents_json.size(); ++i) {
            const std::string where = "agents[" + std::to_string(i) + "]";
            const json& a = agents_json[i];
            AgentSpec spec;
            spec.kind = get_string(a, "kind", where);
            spec.name = get_string_or(a, "name", spec.kind);
            spec.cost = a.contains("cost") ? get_number(a, "cost", where) : 0.0;
            if (spec.kind == "factual") {
                sc.agents.push_back(make_factual_verifier(spec.name, sc.kb_spec.facts,
                                                          sc.annotations, spec.cost));
            } else if (spec.kind == "reasoner") {
                if (a.contains("rules")) {
                    const json& rr = a["rules"];
                    if (!rr.is_array()) fail(where + ".rules", "expected an array");
                    for (std::size_t k = 0; k < rr.size(); ++k) {
                        const std::string rat = where + ".rules[" + std::to_string(k) + "]";
                        ReasonerRule rule;
                        rule.state_pattern = get_string_or(rr[k], "state_pattern", "*");
                        rule.token_pattern = get_string(rr[k], "token", rat);
                        rule.result = get_string(rr[k], "result", rat);
                        rule.justification = get_string_or(rr[k], "justification", "");
                        spec.reasoner_rules.push_back(std::move(rule));
                    }
                }
                spec.default_result = get_string_or(a, "default_result", "true");
                sc.agents.push_back(make_math_reasoner(spec.name, spec.reasoner_rules,
                                                       spec.default_result, spec.cost));
            } else if (spec.kind == "monitor") {
                MonitorConfig config;
                if (a.contains("initial_topic") && !a["initial_topic"].is_null()) {
                    config.initial_topic = a["initial_topic"].get<std::string>();
                    spec.initial_topic = config.initial_topic;
                }
                if (a.contains("initial_tense") && !a["initial_tense"].is_null()) {
                    config.initial_tense = a["initial_tense"].get<std::string>();
                    spec.initial_tense = config.initial_tense;
                }
                sc.agents.push_back(
                    make_context_monitor(spec.name, sc.annotations, config, spec.cost));
            } else if (spec.kind == "table") {
                if (a.contains("rules")) spec.rules = parse_rules(a["rules"], where + ".rules");
                spec.default_allow = parse_verdict(
                    get_string_or(a, "default_verdict", "allow"), where + ".default_verdict");
                sc.agents.push_back(make_table_agent(
                    spec.name, RuleTable(spec.rules, spec.default_allow), spec.cost));
            } else {
                fail(where + ".kind", "must be factual | reasoner | monitor | table");
            }
            sc.agent_specs.push_back(std::move(spec));
        }
    }

    // --- decode parameters ---
    if (doc.contains("decode")) {
        const json& d = doc["decode"];
        sc.decode.algorithm = get_string_or(d, "algorithm", "tad");
        sc.decode.horizon = d.contains("horizon") ? d["horizon"].get<int>() : 0;
        sc.decode.tau = d.contains("tau") ? d["tau"].get<double>() : 0.0;
        sc.decode.retry_budget = d.contains("retry_budget") ? d["retry_budget"].get<int>() : 2;
        sc.decode.omega = d.contains("omega") ? d["omega"].get<double>() : 0.5;
        sc.decode.prune_candidates =
            d.contains("prune_candidates") && d["prune_candidates"].get<bool>();
        if (d.contains("initial")) {
            for (const json& s : d["initial"]) {
                sc.decode.initial.push_back(s.get<std::string>());
            }
        }
        if (sc.decode.algorithm != "tad" && sc.decode.algorithm != "guarded" &&
            sc.decode.algorithm != "abstain" && sc.decode.algorithm != "proof") {
            fail("decode.algorithm", "must be tad | guarded | abstain | proof");
        }
        if (sc.decode.horizon < 0) fail("decode.horizon", "must be >= 0");
        if (!(sc.decode.tau >= 0.0 && sc.decode.tau <= 1.0)) {
            fail("decode.tau", "must lie in [0, 1]");
        }
        if (sc.decode.retry_budget < 0) fail("decode.retry_budget", "must be >= 0");
        if (!(sc.decode.omega >= 0.0 && sc.decode.omega <= 1.0)) {
            fail("decode.omega", "must lie in [0, 1]");
        }
    }
    sc.initial_trace(); // validates surfaces
    if (sc.decode.algorithm == "guarded" && sc.agents.empty()) {
        fail("decode.algorithm", "guarded decoding requires at least one agent");
    }

    // --- retriever ---
    if (doc.contains("retriever")) {
        const json& r = doc["retriever"];
        sc.retriever.kind = get_string_or(r, "kind", "null");
        if (sc.retriever.kind != "null" && sc.retriever.kind != "scripted") {
            fail("retriever.kind", "must be 'null' or 'scripted'");
        }
        if (r.contains("script")) {
            const json& script = r["script"];
            if (!script.is_array()) fail("retriever.script", "expected an array of fact lists");
            for (std::size_t i = 0; i < script.size(); ++i) {
                std::vector<Fact> call;
                const std::string where = "retriever.script[" + std::to_string(i) + "]";
                if (!script[i].is_array()) fail(where, "expected an array of facts");
                for (std::size_t k = 0; k < script[i].size(); ++k) {
                    call.push_back(
                        parse_fact(script[i][k], where + "[" + std::to_string(k) + "]"));
                }
                sc.retriever.script.push_back(std::move(call));
            }
        }
    }

    // --- proof goal ---
    if (doc.contains("proof")) {
        const json& p = doc["proof"];
        ProofSpec spec;
        const json& goal = require(p, "goal", "proof");
        spec.goal_kind = get_string(goal, "kind", "proof.goal");
        if (spec.goal_kind == "token_reached") {
            spec.goal_token = get_string(goal, "token", "proof.goal");
        } else if (spec.goal_kind == "trace_equals") {
            for (const json& s : require(goal, "trace", "proof.goal")) {
                spec.goal_trace.push_back(s.get<std::string>());
            }
        } else {
            fail("proof.goal.kind", "must be token_reached | trace_equals");
        }
        spec.max_steps = p.contains("max_steps") ? p["max_steps"].get<int>() : 16;
        if (spec.max_steps < 0) fail("proof.max_steps", "must be >= 0");
        sc.proof = std::move(spec);
        sc.make_proof_goal(); // validates surfaces
    }
    if (sc.decode.algorithm == "proof" && !sc.proof) {
        fail("decode.algorithm", "proof decoding requires a proof section");
    }

    // --- perf parameters ---
    if (doc.contains("perf")) {
        const json& p = doc["perf"];
        PerfSpec spec;
        if (p.contains("cpi")) spec.cpi = parse_cpi(p["cpi"], "perf.cpi");
        if (p.contains("cpi_cached")) {
            spec.cpi_cached = parse_cpi(p["cpi_cached"], "perf.cpi_cached");
        }
        if (p.contains("amdahl")) {
            const json& inst = p["amdahl"];
            if (!inst.is_array()) fail("perf.amdahl", "expected an array of {f, s}");
            for (std::size_t i = 0; i < inst.size(); ++i) {
                const std::string where = "perf.amdahl[" + std::to_string(i) + "]";
                spec.amdahl.emplace_back(get_number(inst[i], "f", where),
                                         get_number(inst[i], "s", where));
            }
        }
        if (p.contains("complexity")) {
            const json& c = p["complexity"];
            ComplexityParams cp;
            cp.vocab_size = get_number(c, "vocab_size", "perf.complexity");
            cp.horizon = get_number(c, "horizon", "perf.complexity");
            cp.oracle_cost_seconds = get_number(c, "oracle_cost_seconds", "perf.complexity");
            cp.delta_avg = get_number(c, "delta_avg", "perf.complexity");
            cp.batch_factor = get_number(c, "batch_factor", "perf.complexity");
            cp.validate();
            spec.complexity = cp;
        }
        if (p.contains("pipeline")) {
            const json& s = p["pipeline"];
            PipelineStages stages;
            stages.t_lm = get_number(s, "t_lm", "perf.pipeline");
            stages.t_fv = get_number(s, "t_fv", "perf.pipeline");
            stages.t_mr = get_number(s, "t_mr", "perf.pipeline");
            stages.t_cm = get_number(s, "t_cm", "perf.pipeline");
            stages.validate();
            spec.pipeline = stages;
        }
        sc.perf = std::move(spec);
    }

    if (doc.contains("reference_values")) {
        if (!doc["reference_values"].is_object()) {
            fail("reference_values", "expected an object of quantity -> number");
        }
        sc.reference_values = doc["reference_values"];
    }
    if (doc.contains("expected")) sc.expected = doc["expected"];
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("scenario file " + path.string() + ": " + e.what());
    }
    return parse_scenario(doc, path.stem().string());
}

nlohmann::json serialize_scenario(const Scenario& sc) {
    json doc;
    doc["name"] = sc.name;

    json vocab = json::array();
    for (const Token& t : sc.vocabulary) {
        json e{{"surface", t.surface}};
        const TokenAnnotations& a = sc.annotations[static_cast<std::size_t>(t.id)];
        if (a.claim) {
            json c{{"subject", a.claim->subject},
                   {"relation", a.claim->relation},
                   {"object", a.claim->object}};
            if (a.claim->at) c["at"] = *a.claim->at;
            e["claim"] = std::move(c);
        }
        if (a.binding) {
            e["binding"] = json{{"entity", a.binding->first}, {"attribute", a.binding->second}};
        }
        if (a.topic) e["topic"] = *a.topic;
        if (a.tense) e["tense"] = *a.tense;
        vocab.push_back(std::move(e));
    }
    doc["vocabulary"] = std::move(vocab);

    const ScoringModel& model = *sc.model;
    json model_json;
    model_json["context_mode"] = to_string(model.mode());
    model_json["normalized"] = model.normalized();
    std::vector<std::string> keys;
    for (const auto& [key, _] : model.contexts()) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    json contexts = json::array();
    for (const std::string& key : keys) {
        json probs;
        const auto& v = model.contexts().at(key);
        for (const Token& t : sc.vocabulary) {
            probs[t.surface] = v[static_cast<std::size_t>(t.id)];
        }
        contexts.push_back(json{{"key", key}, {"probs", std::move(probs)}});
    }
    model_json["contexts"] = std::move(contexts);
    if (model.fallback()) {
        json probs;
        for (const Token& t : sc.vocabulary) {
            probs[t.surface] = (*model.fallback())[static_cast<std::size_t>(t.id)];
        }
        model_json["fallback"] = std::move(probs);
    }
    doc["model"] = std::move(model_json);

    json kb_json;
    kb_json["realization"] = sc.kb_spec.realization;
    json facts = json::array();
    for (const Fact& f : sc.kb_spec.facts) facts.push_back(fact_to_json(f));
    kb_json["facts"] = std::move(facts);
    kb_json["rules"] = rules_to_json(sc.kb_spec.rules);
    kb_json["default_verdict"] = sc.kb_spec.default_allow ? "allow" : "deny";
    kb_json["require_support"] = sc.kb_spec.require_support;
    doc["kb"] = std::move(kb_json);

    json oracle_json;
    oracle_json["kind"] = sc.oracle_spec.kind;
    if (sc.oracle_spec.kind == "table") {
        oracle_json["rules"] = rules_to_json(sc.oracle_spec.rules);
        oracle_json["default_verdict"] = sc.oracle_spec.default_allow ? "allow" : "deny";
    }
    doc["oracle"] = std::move(oracle_json);

    if (!sc.agent_specs.empty()) {
        json agents = json::array();
        for (const AgentSpec& spec : sc.agent_specs) {
            json a{{"kind", spec.kind}, {"name", spec.name}, {"cost", spec.cost}};
            if (spec.kind == "reasoner") {
                json rules = json::array();
                for (const ReasonerRule& r : spec.reasoner_rules) {
                    rules.push_back(json{{"state_pattern", r.state_pattern},
                                         {"token", r.token_pattern},
                                         {"result", r.result},
                                         {"justification", r.justification}});
                }
                a["rules"] = std::move(rules);
                a["default_result"] = spec.default_result;
            } else if (spec.kind == "table") {
                a["rules"] = rules_to_json(spec.rules);
                a["default_verdict"] = spec.default_allow ? "allow" : "deny";
            } else if (spec.kind == "monitor") {
                if (spec.initial_topic) a["initial_topic"] = *spec.initial_topic;
                if (spec.initial_tense) a["initial_tense"] = *spec.initial_tense;
            }
            agents.push_back(std::move(a));
        }
        doc["agents"] = std::move(agents);
    }

    doc["decode"] = json{{"algorithm", sc.decode.algorithm},
                         {"horizon", sc.decode.horizon},
                         {"tau", sc.decode.tau},
                         {"retry_budget", sc.decode.retry_budget},
                         {"omega", sc.decode.omega},
                         {"initial", sc.decode.initial},
                         {"prune_candidates", sc.decode.prune_candidates}};

    json retriever_json{{"kind", sc.retriever.kind}};
    if (!sc.retriever.script.empty()) {
        json script = json::array();
        for (const auto& call : sc.retriever.script) {
            json facts_json = json::array();
            for (const Fact& f : call) facts_json.push_back(fact_to_json(f));
            script.push_back(std::move(facts_json));
        }
        retriever_json["script"] = std::move(script);
    }
    doc["retriever"] = std::move(retriever_json);

    if (sc.proof) {
        json goal;
        goal["kind"] = sc.proof->goal_kind;
        if (sc.proof->goal_kind == "token_reached") {
            goal["token"] = sc.proof->goal_token;
        } else {
            goal["trace"] = sc.proof->goal_trace;
        }
        doc["proof"] = json{{"goal", std::move(goal)}, {"max_steps", sc.proof->max_steps}};
    }

    if (sc.perf) {
        json p;
        if (sc.perf->cpi) p["cpi"] = cpi_to_json(*sc.perf->cpi);
        if (sc.perf->cpi_cached) p["cpi_cached"] = cpi_to_json(*sc.perf->cpi_cached);
        if (!sc.perf->amdahl.empty()) {
            json inst = json::array();
            for (const auto& [f, s] : sc.perf->amdahl) {
                inst.push_back(json{{"f", f}, {"s", s}});
            }
            p["amdahl"] = std::move(inst);
        }
        if (sc.perf->complexity) {
            const ComplexityParams& c = *sc.perf->complexity;
            p["complexity"] = json{{"vocab_size", c.vocab_size},
                                   {"horizon", c.horizon},
                                   {"oracle_cost_seconds", c.oracle_cost_seconds},
                                   {"delta_avg", c.delta_avg},
                                   {"batch_factor", c.batch_factor}};
        }
        if (sc.perf->pipeline) {
            const PipelineStages& s = *sc.perf->pipeline;
            p["pipeline"] = json{
                {"t_lm", s.t_lm}, {"t_fv", s.t_fv}, {"t_mr", s.t_mr}, {"t_cm", s.t_cm}};
        }
        doc["perf"] = std::move(p);
    }

    if (!sc.reference_values.empty()) doc["reference_values"] = sc.reference_values;
    if (!sc.expected.empty() && !sc.expected.is_null()) doc["expected"] = sc.expected;
    return doc;
}

} // namespace tad
