#include "tad/decoder.hpp"

#include "tad/metrics.hpp"

namespace tad {

std::string to_string(DecodeStatus status) {
    switch (status) {
        case DecodeStatus::Completed: return "completed";
        case DecodeStatus::EmptySafeSet: return "empty_safe_set";
        case DecodeStatus::Abstained: return "abstained";
        case DecodeStatus::BudgetExhausted: return "budget_exhausted";
    }
    return "completed";
}

Token greedy_select(const ScoringModel& model, const std::vector<Token>& safe,
                    const Trace& prefix) {
    if (safe.empty()) {
        throw EmptySafeSetError("greedy selection over an empty safe set");
    }
    const Token* best = &safe.front();
    double best_score = model.prob(prefix, *best);
    for (std::size_t i = 1; i < safe.size(); ++i) {
        const double score = model.prob(prefix, safe[i]);
        // Strict improvement only: ties keep the earlier (lower-id) token.
        if (score > best_score) {
            best = &safe[i];
            best_score = score;
        }
    }
    return *best;
}

namespace {

StepRecord make_step_record(int step, const ScoringModel& model, const Trace& prefix,
                            const std::vector<Token>& safe, const Vocabulary& vocab,
                            std::uint64_t queries) {
    StepRecord rec;
    rec.step = step;
    rec.safe_ids.reserve(safe.size());
    for (const Token& w : safe) rec.safe_ids.push_back(w.id);
    rec.safe_set_size = static_cast<int>(safe.size());
    rec.safe_mass = safe_mass(model, prefix, safe);
    if (rec.safe_mass > 0.0) {
        rec.semantic_entropy = semantic_entropy(model, prefix, safe);
    }
    rec.density = semantic_density(safe, vocab);
    rec.oracle_queries = queries;
    return rec;
}

} // namespace

DecodeResult tad_decode(const ScoringModel& model, const Oracle& oracle,
                        const Vocabulary& vocab, int horizon, const Trace& initial,
                        bool prune_candidates) {
    if (horizon < 0) throw ValidationError("decode horizon must be >= 0");
    DecodeResult result;
    result.initial = initial;
    result.trace = initial;
    result.status = DecodeStatus::Completed;

    std::vector<Token> candidates = vocab.tokens();
    for (int t = 1; t <= horizon; ++t) {
        const std::vector<Token>& scan = prune_candidates ? candidates : vocab.tokens();
        const std::vector<Token> safe = safe_set_over(oracle, result.trace, scan);
        StepRecord rec = make_step_record(t, model, result.trace, safe, vocab, scan.size());
        if (safe.empty()) {
            result.steps.push_back(std::move(rec));
            result.status = DecodeStatus::EmptySafeSet;
            return result;
        }
        const Token chosen = greedy_select(model, safe, result.trace);
        rec.chosen = chosen;
        result.steps.push_back(std::move(rec));
        result.trace = result.trace.append(chosen);
        if (prune_candidates) candidates = safe;
    }
    return result;
}

DecodeResult guarded_decode(const ScoringModel& model,
                            const std::vector<VerificationAgent>& agents,
                            const Vocabulary& vocab, int horizon, const Trace& initial) {
    if (horizon < 0) throw ValidationError("decode horizon must be >= 0");
    if (agents.empty()) throw ValidationError("guarded decode requires >= 1 agent");
    DecodeResult result;
    result.initial = initial;
    result.trace = initial;
    result.status = DecodeStatus::Completed;

    std::vector<AgentState> states = replay_states(agents, initial);
    for (int t = 1; t <= horizon; ++t) {
        GammaResult joint = gamma(agents, states, result.trace, vocab);
        StepRecord rec =
            make_step_record(t, model, result.trace, joint.tokens, vocab, vocab.size());
        rec.verdict_begin = result.verdicts.size();
        for (AgentVerdict& v : joint.verdicts) {
            v.step = t;
            result.verdicts.push_back(std::move(v));
        }
        rec.verdict_end = result.verdicts.size();
        if (joint.tokens.empty()) {
            result.steps.push_back(std::move(rec));
            result.status = DecodeStatus::EmptySafeSet;
            return result;
        }
        const Token chosen = greedy_select(model, joint.tokens, result.trace);
        rec.chosen = chosen;
        rec.agent_costs = per_agent_costs(agents, states, result.trace, chosen);
        rec.agent_cost = 0.0;
        for (double c : rec.agent_costs) rec.agent_cost += c;
        result.steps.push_back(std::move(rec));
        result.trace = result.trace.append(chosen);
        states = update_states(agents, states, result.trace, chosen);
    }
    return result;
}

DecodeResult tad_decode_abstain(const ScoringModel& model, const Oracle& oracle,
                                const Vocabulary& vocab, int horizon, double tau,
                                Retriever& retriever, int retry_budget,
                                const Trace& initial) {
    if (horizon < 0) throw ValidationError("decode horizon must be >= 0");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in [0, 1]");
    if (retry_budget < 0) throw ValidationError("retry_budget must be >= 0");

    DecodeResult result;
    result.initial = initial;
    result.trace = initial;
    result.status = DecodeStatus::Completed;

    std::vector<Fact> overlay; // session-owned view extension; base oracle untouched

    for (int t = 1; t <= horizon; ++t) {
        int attempts = 0;
        std::vector<Token> safe = safe_set(oracle, result.trace, vocab, overlay);
        double pi = safe_mass(model, result.trace, safe);
        std::uint64_t queries = vocab.size();
        while (true) {
            const bool failing = safe.empty() || pi < tau;
            if (!failing) {
                StepRecord rec = make_step_record(t, model, result.trace, safe, vocab, queries);
                const Token chosen = greedy_select(model, safe, result.trace);
                rec.chosen = chosen;
                result.steps.push_back(std::move(rec));
                result.trace = result.trace.append(chosen);
                break;
            }
            if (attempts == retry_budget) {
                result.steps.push_back(
                    make_step_record(t, model, result.trace, safe, vocab, queries));
                // Without any backoff configured this is exactly the plain
                // decoder's empty-safe-set exit; otherwise it is a refusal.
                result.status = (retry_budget == 0 && tau == 0.0)
                                    ? DecodeStatus::EmptySafeSet
                                    : DecodeStatus::Abstained;
                result.overlay = std::move(overlay);
                return result;
            }
            ++attempts;
            RetrievalEvent event;
            event.step = t;
            std::vector<Fact> docs;
            try {
                docs = retriever.retrieve(result.trace);
            } catch (const std::exception&) {
                docs.clear(); // retriever failure: event recorded, no facts folded
            }
            event.added = static_cast<int>(docs.size());
            for (Fact& f : docs) {
                f.validate();
                overlay.push_back(std::move(f));
            }
            const std::vector<Token> after = safe_set(oracle, result.trace, vocab, overlay);
            const double pi_after = safe_mass(model, result.trace, after);
            queries += vocab.size();
            event.improved = after.size() > safe.size() || pi_after > pi;
            result.retrieval_events.push_back(event);
            safe = std::move(after);
            pi = pi_after;
        }
    }
    result.overlay = std::move(overlay);
    return result;
}

bool ProofGoal::proved(const Trace& proof) const {
    switch (kind) {
        case Kind::TokenReached: {
            if (!token) throw ValidationError("token_reached goal requires a token");
            for (const Token& w : proof) {
                if (w == *token) return true;
            }
            return false;
        }
        case Kind::TraceEquals:
            if (!target) throw ValidationError("trace_equals goal requires a target trace");
            return proof == *target;
    }
    return false;
}

DecodeResult generate_proof(const Vocabulary& rules, const Oracle& math_oracle,
                            const ScoringModel& model, const ProofGoal& goal,
                            int max_steps) {
    if (max_steps < 0) throw ValidationError("max_steps must be >= 0");
    DecodeResult result;
    result.status = DecodeStatus::Completed;

    int t = 0;
    while (!goal.proved(result.trace)) {
        if (t == max_steps) {
            result.status = DecodeStatus::BudgetExhausted;
            return result;
        }
        ++t;
        const std::vector<Token> safe = safe_set(math_oracle, result.trace, rules);
        StepRecord rec = make_step_record(t, model, result.trace, safe, rules, rules.size());
        if (safe.empty()) {
            result.steps.push_back(std::move(rec));
            result.status = DecodeStatus::Abstained;
            return result;
        }
        const Token chosen = greedy_select(model, safe, result.trace);
        rec.chosen = chosen;
        result.steps.push_back(std::move(rec));
        result.trace = result.trace.append(chosen);
    }
    return result;
}

std::vector<Trace> enumerate_truthful(const KnowledgeBase& kb, const Vocabulary& vocab,
                                      int max_len) {
    return enumerate_consistent(kb, vocab, max_len);
}

} // namespace tad
