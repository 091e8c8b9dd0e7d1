#pragma once

// The oracle, safe-set computation, and brute-force soundness /
// completeness certification over enumerated traces.

#include "tad/core.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace tad {

// Verdict on extending `prefix` with `w`. `extra` is the overlay of
// retrieved facts owned by a decode session; oracles that do not consult
// facts ignore it.
using JudgeFn =
    std::function<bool(const Trace& prefix, const Token& w, const std::vector<Fact>& extra)>;
// Verdict on a whole prefix.
using PrefixJudgeFn = std::function<bool(const Trace&, const std::vector<Fact>& extra)>;

// Deterministic token judge with an optional memo cache keyed by
// (trace, token). Queries that carry overlay facts bypass the cache.
class Oracle {
public:
    Oracle(std::string name, JudgeFn judge);
    Oracle(std::string name, JudgeFn judge, PrefixJudgeFn prefix_judge);

    bool judge(const Trace& prefix, const Token& w) const;
    bool judge(const Trace& prefix, const Token& w, const std::vector<Fact>& extra) const;
    // Defaults to "every truncation step passes judge".
    bool prefix_judge(const Trace& trace, const std::vector<Fact>& extra = {}) const;

    bool has_custom_prefix_judge() const { return static_cast<bool>(custom_prefix_); }

    const std::string& name() const { return name_; }

    void set_memo_enabled(bool enabled) const;
    bool memo_enabled() const;

    struct MemoStats {
        std::uint64_t lookups = 0;     // judge() calls with no overlay
        std::uint64_t hits = 0;        // answered from the cache
        std::uint64_t evaluations = 0; // underlying judge evaluations
    };
    MemoStats memo_stats() const;
    void reset_memo() const;

private:
    std::string name_;
    JudgeFn judge_;
    PrefixJudgeFn custom_prefix_;

    struct Memo {
        std::mutex mutex;
        std::unordered_map<std::string, bool> cache;
        MemoStats stats;
        bool enabled = false;
    };
    std::shared_ptr<Memo> memo_;
};

// Exactly the tokens judged safe after `prefix`, in vocabulary id order.
std::vector<Token> safe_set(const Oracle& oracle, const Trace& prefix,
                            const Vocabulary& vocab,
                            const std::vector<Fact>& extra = {});
// Same, restricted to a candidate subset (must be in id order already).
std::vector<Token> safe_set_over(const Oracle& oracle, const Trace& prefix,
                                 const std::vector<Token>& candidates,
                                 const std::vector<Fact>& extra = {});

struct Counterexample {
    Trace prefix;
    Token token;
    std::string kind; // "soundness" | "completeness" | "coherence"
};

struct OracleReport {
    bool sound = true;
    bool complete = true;
    std::vector<Counterexample> counterexamples;
};

// Enumeration cap on the total number of sequences of length <= max_len;
// overridable through the TAD_ENUM_BUDGET environment variable.
std::uint64_t enumeration_budget();
// Sum of |V|^l for l = 0..max_len, saturating; throws BudgetExceededError
// when it exceeds the budget.
void require_enumeration_within_budget(std::size_t vocab_size, int max_len);

// All knowledge-consistent traces of length <= max_len, lexicographic by
// token ids (depth-first, children in id order).
std::vector<Trace> enumerate_consistent(const KnowledgeBase& kb, const Vocabulary& vocab,
                                        int max_len);

// Flags (x, w) pairs the oracle approves although the extension breaks
// knowledge consistency. Extensions are enumerated up to length max_len.
OracleReport check_soundness(const Oracle& oracle, const KnowledgeBase& kb,
                             const Vocabulary& vocab, int max_len);
// Flags (p, w) pairs with p and p||w both consistent yet rejected.
OracleReport check_completeness(const Oracle& oracle, const KnowledgeBase& kb,
                                const Vocabulary& vocab, int max_len);
// Both checks merged into one report.
OracleReport certify_oracle(const Oracle& oracle, const KnowledgeBase& kb,
                            const Vocabulary& vocab, int max_len);

// Self-test for a custom prefix_judge: prefix_judge(x || w) must agree
// with judge(x, w) whenever prefix_judge(x) holds. Returns disagreements.
std::vector<Counterexample> check_prefix_coherence(const Oracle& oracle,
                                                   const Vocabulary& vocab, int max_len);

} // namespace tad
