#include "tad/agents.hpp"

#include <algorithm>

namespace tad {

std::string to_string(Decision d) {
    switch (d) {
        case Decision::Accept: return "accept";
        case Decision::Block: return "block";
        case Decision::ScaffoldRequest: return "scaffold_request";
    }
    return "accept";
}

GammaResult gamma(const std::vector<VerificationAgent>& agents,
                  const std::vector<AgentState>& states, const Trace& prefix,
                  const Vocabulary& vocab) {
    if (agents.empty() || agents.size() != states.size()) {
        throw ValidationError("gamma requires |agents| == |states| >= 1");
    }
    GammaResult result;
    for (const Token& w : vocab) {
        bool all_accept = true;
        for (std::size_t i = 0; i < agents.size(); ++i) {
            AgentVerdict v = agents[i].evaluate(states[i], prefix, w);
            v.agent = agents[i].name;
            v.token = w;
            if (v.decision != Decision::Accept) all_accept = false;
            result.verdicts.push_back(std::move(v));
        }
        if (all_accept) result.tokens.push_back(w);
    }
    return result;
}

std::vector<AgentState> update_states(const std::vector<VerificationAgent>& agents,
                                      const std::vector<AgentState>& states,
                                      const Trace& new_prefix, const Token& chosen) {
    if (agents.size() != states.size()) {
        throw ValidationError("update_states requires |agents| == |states|");
    }
    // Agents observe the prefix as it stood before the emission.
    const Trace before = new_prefix.take(new_prefix.length() - 1);
    std::vector<AgentState> out;
    out.reserve(states.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        out.push_back(agents[i].update(states[i], before, chosen));
    }
    return out;
}

double cohort_cost(const std::vector<VerificationAgent>& agents,
                   const std::vector<AgentState>& states, const Trace& prefix,
                   const Token& chosen) {
    double total = 0.0;
    for (double c : per_agent_costs(agents, states, prefix, chosen)) total += c;
    return total;
}

std::vector<double> per_agent_costs(const std::vector<VerificationAgent>& agents,
                                    const std::vector<AgentState>& states,
                                    const Trace& prefix, const Token& chosen) {
    if (agents.size() != states.size()) {
        throw ValidationError("cohort_cost requires |agents| == |states|");
    }
    std::vector<double> out;
    out.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const double c = agents[i].cost(states[i], prefix, chosen);
        if (!(c >= 0.0)) {
            throw ValidationError("agent '" + agents[i].name + "' returned a negative cost");
        }
        out.push_back(c);
    }
    return out;
}

namespace {

std::function<double(const AgentState&, const Trace&, const Token&)>
constant_cost(double cost) {
    if (!(cost >= 0.0)) throw ValidationError("agent cost must be >= 0");
    return [cost](const AgentState&, const Trace&, const Token&) { return cost; };
}

AgentState identity_update(const AgentState& s, const Trace&, const Token&) { return s; }

std::string fact_to_text(const Fact& f) {
    std::string s = "(" + f.subject + ", " + f.relation + ", " + f.object + ")";
    if (f.valid_from || f.valid_to) {
        s += " valid [";
        s += f.valid_from ? std::to_string(*f.valid_from) : std::string("-inf");
        s += ", ";
        s += f.valid_to ? std::to_string(*f.valid_to) : std::string("+inf");
        s += "]";
    }
    return s;
}

const std::optional<TokenClaim> kNoClaim;

const std::optional<TokenClaim>& claim_for(const AnnotationMap& annotations, const Token& w) {
    if (static_cast<std::size_t>(w.id) < annotations.size()) {
        return annotations[static_cast<std::size_t>(w.id)].claim;
    }
    return kNoClaim;
}

} // namespace

VerificationAgent make_factual_verifier(std::string name, std::vector<Fact> facts,
                                        AnnotationMap annotations, double cost) {
    VerificationAgent agent;
    agent.name = std::move(name);
    agent.initial_state = AgentState{{"asserted", AgentState::array()}};
    agent.cost = constant_cost(cost);

    auto asserted_facts = [](const AgentState& state) {
        std::vector<Fact> out;
        for (const auto& triple : state.at("asserted")) {
            out.push_back(Fact{triple.at(0).get<std::string>(),
                               triple.at(1).get<std::string>(),
                               triple.at(2).get<std::string>(), std::nullopt, std::nullopt});
        }
        return out;
    };

    agent.evaluate = [facts, annotations, asserted_facts](
                         const AgentState& state, const Trace&, const Token& w) {
        AgentVerdict v;
        v.decision = Decision::Accept;
        const auto& claim = claim_for(annotations, w);
        if (!claim) return v;
        const ClaimCheck against_kb = check_claim(*claim, facts);
        if (against_kb.status == ClaimStatus::Contradicted) {
            v.decision = Decision::Block;
            v.justification = "claim (" + claim->subject + ", " + claim->relation + ", " +
                              claim->object + ") mismatches stored fact " +
                              fact_to_text(*against_kb.conflicting) + "; proposed correction: " +
                              against_kb.conflicting->object;
            return v;
        }
        // Also hold the claim against what the trace already asserted.
        const ClaimCheck against_context = check_claim(*claim, asserted_facts(state));
        if (against_context.status == ClaimStatus::Contradicted) {
            v.decision = Decision::Block;
            v.justification = "claim (" + claim->subject + ", " + claim->relation + ", " +
                              claim->object + ") conflicts with earlier assertion " +
                              fact_to_text(*against_context.conflicting) +
                              "; proposed correction: " + against_context.conflicting->object;
        }
        return v;
    };

    agent.update = [annotations](const AgentState& state, const Trace&, const Token& w) {
        const auto& claim = claim_for(annotations, w);
        if (!claim) return state;
        AgentState next = state;
        next["asserted"].push_back({claim->subject, claim->relation, claim->object});
        return next;
    };
    return agent;
}

VerificationAgent make_math_reasoner(std::string name, std::vector<ReasonerRule> rules,
                                     std::string default_result, double cost) {
    for (const ReasonerRule& r : rules) {
        if (r.result != "true" && r.result != "false" && r.result != "unknown") {
            throw ValidationError("reasoner rule result must be true|false|unknown, got '" +
                                  r.result + "'");
        }
    }
    if (default_result != "true" && default_result != "false" && default_result != "unknown") {
        throw ValidationError("reasoner default result must be true|false|unknown");
    }

    VerificationAgent agent;
    agent.name = std::move(name);
    agent.initial_state = AgentState{{"proof", ""}};
    agent.cost = constant_cost(cost);

    auto lookup = [rules = std::move(rules), default_result](const AgentState& state,
                                                             const Token& w) {
        const std::string proof = state.at("proof").get<std::string>();
        for (const ReasonerRule& r : rules) {
            if (glob_match(r.state_pattern, proof) && glob_match(r.token_pattern, w.surface)) {
                return std::pair<std::string, std::string>(r.result, r.justification);
            }
        }
        return std::pair<std::string, std::string>(default_result, "");
    };

    agent.evaluate = [lookup](const AgentState& state, const Trace&, const Token& w) {
        AgentVerdict v;
        const auto [result, justification] = lookup(state, w);
        if (result == "true") {
            v.decision = Decision::Accept;
        } else if (result == "false") {
            v.decision = Decision::Block;
            v.justification = justification.empty()
                                  ? "step '" + w.surface + "' violates a premise of the current proof state"
                                  : justification;
        } else {
            v.decision = Decision::ScaffoldRequest;
            v.justification = justification.empty()
                                  ? "step '" + w.surface + "' is undecided; lemma scaffold requested"
                                  : justification;
        }
        return v;
    };

    agent.update = [](const AgentState& state, const Trace&, const Token& w) {
        AgentState next = state;
        std::string proof = state.at("proof").get<std::string>();
        if (!proof.empty()) proof += ' ';
        proof += w.surface;
        next["proof"] = proof;
        return next;
    };
    return agent;
}

VerificationAgent make_context_monitor(std::string name, AnnotationMap annotations,
                                       MonitorConfig config, double cost) {
    VerificationAgent agent;
    agent.name = std::move(name);
    agent.initial_state = AgentState{
        {"attributes", AgentState::object()},
        {"topic", config.initial_topic ? AgentState(*config.initial_topic) : AgentState(nullptr)},
        {"tense", config.initial_tense ? AgentState(*config.initial_tense) : AgentState(nullptr)},
    };
    agent.cost = constant_cost(cost);

    auto annotation_for = [annotations](const Token& w) -> const TokenAnnotations* {
        if (static_cast<std::size_t>(w.id) < annotations.size()) {
            return &annotations[static_cast<std::size_t>(w.id)];
        }
        return nullptr;
    };

    agent.evaluate = [annotation_for](const AgentState& state, const Trace&, const Token& w) {
        AgentVerdict v;
        const TokenAnnotations* a = annotation_for(w);
        if (!a) return v;
        if (a->binding) {
            const auto& attrs = state.at("attributes");
            auto it = attrs.find(a->binding->first);
            if (it != attrs.end() && it->get<std::string>() != a->binding->second) {
                v.decision = Decision::Block;
                v.justification = "entity '" + a->binding->first + "' already bound to '" +
                                  it->get<std::string>() + "', token rebinds it to '" +
                                  a->binding->second + "'";
                return v;
            }
        }
        if (a->topic && !state.at("topic").is_null() &&
            state.at("topic").get<std::string>() != *a->topic) {
            v.decision = Decision::Block;
            v.justification = "topic '" + *a->topic + "' conflicts with established topic '" +
                              state.at("topic").get<std::string>() + "'";
            return v;
        }
        if (a->tense && !state.at("tense").is_null() &&
            state.at("tense").get<std::string>() != *a->tense) {
            v.decision = Decision::Block;
            v.justification = "tense '" + *a->tense + "' conflicts with established tense '" +
                              state.at("tense").get<std::string>() + "'";
            return v;
        }
        return v;
    };

    agent.update = [annotation_for](const AgentState& state, const Trace&, const Token& w) {
        const TokenAnnotations* a = annotation_for(w);
        if (!a) return state;
        AgentState next = state;
        if (a->binding) next["attributes"][a->binding->first] = a->binding->second;
        if (a->topic && next.at("topic").is_null()) next["topic"] = *a->topic;
        if (a->tense && next.at("tense").is_null()) next["tense"] = *a->tense;
        return next;
    };
    return agent;
}

VerificationAgent make_table_agent(std::string name, RuleTable rules, double cost) {
    VerificationAgent agent;
    agent.name = std::move(name);
    agent.initial_state = AgentState(nullptr);
    agent.cost = constant_cost(cost);
    agent.update = identity_update;
    agent.evaluate = [rules = std::move(rules)](const AgentState&, const Trace& prefix,
                                                const Token& w) {
        AgentVerdict v;
        if (!rules.allows(prefix, w)) {
            v.decision = Decision::Block;
            v.justification = "token '" + w.surface + "' denied after prefix '" +
                              prefix.joined_surfaces() + "'";
        }
        return v;
    };
    return agent;
}

VerificationAgent make_oracle_agent(std::string name, Oracle oracle, double cost) {
    VerificationAgent agent;
    agent.name = std::move(name);
    agent.initial_state = AgentState(nullptr);
    agent.cost = constant_cost(cost);
    agent.update = identity_update;
    agent.evaluate = [oracle = std::move(oracle)](const AgentState&, const Trace& prefix,
                                                  const Token& w) {
        AgentVerdict v;
        if (!oracle.judge(prefix, w)) {
            v.decision = Decision::Block;
            v.justification = "oracle '" + oracle.name() + "' rejects '" + w.surface +
                              "' after prefix '" + prefix.joined_surfaces() + "'";
        }
        return v;
    };
    return agent;
}

std::vector<AgentState> replay_states(const std::vector<VerificationAgent>& agents,
                                      const Trace& prefix) {
    std::vector<AgentState> states;
    states.reserve(agents.size());
    for (const VerificationAgent& a : agents) states.push_back(a.initial_state);
    for (std::size_t s = 0; s < prefix.length(); ++s) {
        const Trace before = prefix.take(s);
        for (std::size_t i = 0; i < agents.size(); ++i) {
            states[i] = agents[i].update(states[i], before, prefix[s]);
        }
    }
    return states;
}

Oracle synthetic_oracle(std::vector<VerificationAgent> agents) {
    if (agents.empty()) throw ValidationError("synthetic oracle requires >= 1 agent");
    auto judge = [agents = std::move(agents)](const Trace& prefix, const Token& w,
                                              const std::vector<Fact>&) {
        const std::vector<AgentState> states = replay_states(agents, prefix);
        for (std::size_t i = 0; i < agents.size(); ++i) {
            if (!agents[i].accepts(states[i], prefix, w)) return false;
        }
        return true;
    };
    return Oracle("synthetic(joint-constraint)", std::move(judge));
}

Oracle agent_as_oracle(const VerificationAgent& agent) {
    VerificationAgent copy = agent;
    auto judge = [copy](const Trace& prefix, const Token& w, const std::vector<Fact>&) {
        const std::vector<AgentState> states = replay_states({copy}, prefix);
        return copy.accepts(states[0], prefix, w);
    };
    return Oracle("agent(" + agent.name + ")", std::move(judge));
}

} // namespace tad
