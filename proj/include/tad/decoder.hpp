#pragma once

// The decoding procedures: greedy truth-aware decoding, the multi-agent
// guarded variant, decoding with abstention and retrieval backoff, and
// proof generation. A decode session is single-threaded; distinct
// sessions share no mutable state.

#include "tad/agents.hpp"
#include "tad/core.hpp"
#include "tad/model.hpp"
#include "tad/oracle.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace tad {

struct StepRecord {
    int step = 0;                  // 1-based
    std::vector<int> safe_ids;     // safe set, vocabulary id order
    int safe_set_size = 0;
    double safe_mass = 0.0;
    std::optional<double> semantic_entropy; // nats; absent when mass is 0
    double density = 0.0;
    std::optional<Token> chosen;
    std::uint64_t oracle_queries = 0; // token judgments performed this step
    double agent_cost = 0.0;          // cohort cost for the chosen token
    std::vector<double> agent_costs;  // per agent, empty without a cohort
    std::size_t verdict_begin = 0;    // range into DecodeResult::verdicts
    std::size_t verdict_end = 0;
};

enum class DecodeStatus { Completed, EmptySafeSet, Abstained, BudgetExhausted };

std::string to_string(DecodeStatus status);

struct RetrievalEvent {
    int step = 0;
    int added = 0; // documents (facts) returned by the call
    bool improved = false;
};

struct DecodeResult {
    Trace initial;
    Trace trace; // initial followed by every emitted token
    DecodeStatus status = DecodeStatus::Completed;
    std::vector<StepRecord> steps;
    std::vector<RetrievalEvent> retrieval_events;
    std::vector<AgentVerdict> verdicts;
    std::vector<Fact> overlay; // facts retrieved into the session's KB view

    std::size_t emitted() const { return trace.length() - initial.length(); }
};

// Greedy argmax of prob over `safe`; ties resolve to the lowest
// vocabulary id. Throws EmptySafeSetError on an empty set.
Token greedy_select(const ScoringModel& model, const std::vector<Token>& safe,
                    const Trace& prefix);

// Greedy decoding constrained to oracle-approved tokens. Stops with
// EmptySafeSet when no token is approved, Completed after `horizon`
// emissions. With prune_candidates, each step scans only the previous
// step's safe set (valid when safe sets only tighten over time).
DecodeResult tad_decode(const ScoringModel& model, const Oracle& oracle,
                        const Vocabulary& vocab, int horizon,
                        const Trace& initial = Trace{}, bool prune_candidates = false);

// Same control flow with the joint constraint operator in place of the
// oracle; agent states advance after every emission.
DecodeResult guarded_decode(const ScoringModel& model,
                            const std::vector<VerificationAgent>& agents,
                            const Vocabulary& vocab, int horizon,
                            const Trace& initial = Trace{});

// Supplies additional facts for a prefix. Implementations may throw; the
// failure surfaces as a retrieval event with improved = false.
class Retriever {
public:
    virtual ~Retriever() = default;
    virtual std::vector<Fact> retrieve(const Trace& prefix) = 0;
};

class NullRetriever final : public Retriever {
public:
    std::vector<Fact> retrieve(const Trace&) override { return {}; }
};

// Returns script[i] on the i-th call (empty past the end).
class ScriptedRetriever final : public Retriever {
public:
    explicit ScriptedRetriever(std::vector<std::vector<Fact>> script)
        : script_(std::move(script)) {}
    std::vector<Fact> retrieve(const Trace&) override {
        if (cursor_ >= script_.size()) return {};
        return script_[cursor_++];
    }
    std::size_t calls() const { return cursor_; }

private:
    std::vector<std::vector<Fact>> script_;
    std::size_t cursor_ = 0;
};

// Decoding with abstention and retrieval backoff. Whenever the safe set
// is empty or its mass falls below tau, retrieved facts are folded into a
// session-owned overlay (the base oracle stays immutable) and the step is
// re-evaluated; after retry_budget unsuccessful retrievals at a step the
// decode returns Abstained. With tau == 0 and retry_budget == 0 the
// procedure reproduces tad_decode exactly.
DecodeResult tad_decode_abstain(const ScoringModel& model, const Oracle& oracle,
                                const Vocabulary& vocab, int horizon, double tau,
                                Retriever& retriever, int retry_budget,
                                const Trace& initial = Trace{});

// Decides when a proof trace establishes the conjecture.
struct ProofGoal {
    enum class Kind { TokenReached, TraceEquals };
    Kind kind = Kind::TokenReached;
    std::optional<Token> token;       // TokenReached
    std::optional<Trace> target;      // TraceEquals

    bool proved(const Trace& proof) const;
};

// Greedy proof search over a rule vocabulary: Abstained when no rule is
// approved, Completed when the goal predicate holds, BudgetExhausted at
// max_steps.
DecodeResult generate_proof(const Vocabulary& rules, const Oracle& math_oracle,
                            const ScoringModel& model, const ProofGoal& goal,
                            int max_steps);

// All knowledge-consistent traces of length <= max_len in lexicographic
// id order; the exhaustive reference the dominance theorem is checked
// against.
std::vector<Trace> enumerate_truthful(const KnowledgeBase& kb, const Vocabulary& vocab,
                                      int max_len);

} // namespace tad
