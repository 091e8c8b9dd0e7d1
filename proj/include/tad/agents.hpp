#pragma once

// Verification agents: (state, update, acceptance, cost) quadruples, the
// three concrete agents, and the joint constraint operator.

#include "tad/core.hpp"
#include "tad/oracle.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace tad {

// Agent-internal state. JSON keeps payloads serializable and comparable
// for equality, which replay tests and the no-improvement check rely on.
using AgentState = nlohmann::json;

enum class Decision { Accept, Block, ScaffoldRequest };

std::string to_string(Decision d);

struct AgentVerdict {
    int step = 0; // stamped by the decoder; 0 outside a decode
    std::string agent;
    Token token;
    Decision decision = Decision::Accept;
    std::string justification; // non-empty whenever decision != Accept
};

// The quadruple. evaluate() is pure; update() is deterministic and applied
// once per emitted token. A ScaffoldRequest counts as a rejection for
// decoding purposes but is logged distinctly.
struct VerificationAgent {
    std::string name;
    AgentState initial_state;
    std::function<AgentState(const AgentState&, const Trace&, const Token&)> update;
    std::function<AgentVerdict(const AgentState&, const Trace&, const Token&)> evaluate;
    std::function<double(const AgentState&, const Trace&, const Token&)> cost;

    bool accepts(const AgentState& state, const Trace& prefix, const Token& w) const {
        return evaluate(state, prefix, w).decision == Decision::Accept;
    }
};

struct GammaResult {
    std::vector<Token> tokens;          // intersection, vocabulary id order
    std::vector<AgentVerdict> verdicts; // one per (token, agent) evaluation
};

// Intersection over agents of each agent's accepted tokens. Every
// (agent, token) pair is evaluated and logged; no short-circuiting.
GammaResult gamma(const std::vector<VerificationAgent>& agents,
                  const std::vector<AgentState>& states, const Trace& prefix,
                  const Vocabulary& vocab);

// Element-wise state update after emitting `chosen`; `new_prefix` is the
// trace including the chosen token.
std::vector<AgentState> update_states(const std::vector<VerificationAgent>& agents,
                                      const std::vector<AgentState>& states,
                                      const Trace& new_prefix, const Token& chosen);

// Sum of per-agent costs for scoring `chosen` after `prefix`.
double cohort_cost(const std::vector<VerificationAgent>& agents,
                   const std::vector<AgentState>& states, const Trace& prefix,
                   const Token& chosen);
std::vector<double> per_agent_costs(const std::vector<VerificationAgent>& agents,
                                    const std::vector<AgentState>& states,
                                    const Trace& prefix, const Token& chosen);

// Per-token annotations the concrete agents read. Declared in the
// scenario; absent annotations mean "nothing to check".
struct TokenAnnotations {
    std::optional<TokenClaim> claim;
    std::optional<std::pair<std::string, std::string>> binding; // entity -> attribute
    std::optional<std::string> topic;
    std::optional<std::string> tense;
};
using AnnotationMap = std::vector<TokenAnnotations>; // indexed by token id

// Checks token claims against the fact store and previously asserted
// claims; blocks on mismatched object or timeline and proposes the stored
// value. State: {"asserted": [[s, r, o], ...]}.
VerificationAgent make_factual_verifier(std::string name, std::vector<Fact> facts,
                                        AnnotationMap annotations, double cost);

// One reasoner rule: glob over the current proof-state text and the
// candidate step surface.
struct ReasonerRule {
    std::string state_pattern;
    std::string token_pattern;
    std::string result; // "true" | "false" | "unknown"
    std::string justification;
};

// Rule-table reasoner; false blocks citing the violated premise, unknown
// blocks with a scaffold request. State: {"proof": "<accepted steps>"}.
VerificationAgent make_math_reasoner(std::string name, std::vector<ReasonerRule> rules,
                                     std::string default_result, double cost);

struct MonitorConfig {
    std::optional<std::string> initial_topic;
    std::optional<std::string> initial_tense;
};

// Blocks conflicting entity re-binding, topic drift, and tense drift.
// State: {"attributes": {entity: attribute}, "topic": t|null, "tense": t|null}.
VerificationAgent make_context_monitor(std::string name, AnnotationMap annotations,
                                       MonitorConfig config, double cost);

// Generic allow/deny agent over a rule table (stateless).
VerificationAgent make_table_agent(std::string name, RuleTable rules, double cost);

// Wraps an oracle as a stateless agent; the guarded-equivalence theorem
// checks are built on this.
VerificationAgent make_oracle_agent(std::string name, Oracle oracle, double cost);

// The synthetic oracle O'(x, w) := w in Gamma(x, s(x)) where s(x) replays
// every agent's update along x from its initial state.
Oracle synthetic_oracle(std::vector<VerificationAgent> agents);

// Replay of agent states along a prefix (initial states advanced token by
// token); used by the synthetic oracle and by per-agent soundness checks.
std::vector<AgentState> replay_states(const std::vector<VerificationAgent>& agents,
                                      const Trace& prefix);

// Wraps one agent's acceptance predicate (with replayed state) as an
// oracle so the enumeration certifiers apply to individual agents.
Oracle agent_as_oracle(const VerificationAgent& agent);

} // namespace tad
