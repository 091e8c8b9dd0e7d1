#pragma once

// Tokens, traces, facts, and the knowledge-consistency predicate.
// Everything here is immutable after construction and safe to share
// across concurrent readers.

#include "tad/errors.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tad {

struct Token {
    int id = 0;
    std::string surface;

    bool operator==(const Token& other) const {
        return id == other.id && surface == other.surface;
    }
    bool operator!=(const Token& other) const { return !(*this == other); }
};

// Finite candidate universe. Iteration order is the id order, which is
// the tie-breaking anchor everywhere else in the library: ids must be
// exactly 0..size-1 and surfaces must be unique and non-empty.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<Token> tokens);

    static Vocabulary from_surfaces(const std::vector<std::string>& surfaces);

    std::size_t size() const { return tokens_.size(); }
    bool empty() const { return tokens_.empty(); }
    const Token& at(int id) const;
    std::optional<Token> find_surface(std::string_view surface) const;

    std::vector<Token>::const_iterator begin() const { return tokens_.begin(); }
    std::vector<Token>::const_iterator end() const { return tokens_.end(); }
    const std::vector<Token>& tokens() const { return tokens_; }

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

private:
    std::vector<Token> tokens_;
};

// A finite token sequence, possibly empty. Value type: append/take
// return fresh traces.
class Trace {
public:
    Trace() = default;
    explicit Trace(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    std::size_t length() const { return tokens_.size(); }
    bool empty() const { return tokens_.empty(); }
    const Token& operator[](std::size_t i) const { return tokens_[i]; }
    const Token& back() const { return tokens_.back(); }

    // First n tokens; take(length()) is the trace itself.
    Trace take(std::size_t n) const;
    Trace append(const Token& w) const;

    // Token surfaces joined by a single space ("" for the empty trace).
    // This is the canonical form prefix patterns are matched against.
    std::string joined_surfaces() const;
    // Token ids joined by ','; used as a cache / table key.
    std::string id_key() const;

    std::vector<Token>::const_iterator begin() const { return tokens_.begin(); }
    std::vector<Token>::const_iterator end() const { return tokens_.end(); }
    const std::vector<Token>& tokens() const { return tokens_; }

    bool operator==(const Trace& other) const { return tokens_ == other.tokens_; }
    bool operator!=(const Trace& other) const { return !(*this == other); }

private:
    std::vector<Token> tokens_;
};

// One (subject, relation, object) triple, optionally valid only on an
// integer tick interval [valid_from, valid_to].
struct Fact {
    std::string subject;
    std::string relation;
    std::string object;
    std::optional<std::int64_t> valid_from;
    std::optional<std::int64_t> valid_to;

    void validate() const;

    bool operator==(const Fact& other) const {
        return subject == other.subject && relation == other.relation &&
               object == other.object && valid_from == other.valid_from &&
               valid_to == other.valid_to;
    }
};

// Claim a token asserts when emitted, checked against a fact store.
struct TokenClaim {
    std::string subject;
    std::string relation;
    std::string object;
    std::optional<std::int64_t> at;
};

enum class ClaimStatus { Supported, Contradicted, Unknown };

struct ClaimCheck {
    ClaimStatus status = ClaimStatus::Unknown;
    // For Contradicted: the stored fact the claim conflicts with.
    std::optional<Fact> conflicting;
};

// Checks a claim against base facts plus an extra overlay (retrieval
// results folded in mid-decode). Contradicted when some fact shares
// subject+relation but disagrees on object or timeline.
ClaimCheck check_claim(const TokenClaim& claim, const std::vector<Fact>& facts,
                       const std::vector<Fact>& extra = {});

// Shell-style glob over surfaces: '*' matches any run (including spaces),
// '?' matches one character.
bool glob_match(std::string_view pattern, std::string_view text);

// One allow/deny rule: matched against (prefix surfaces joined by spaces,
// token surface). First match wins; RuleTable supplies the default.
struct Rule {
    std::string prefix_pattern;
    std::string token_pattern;
    bool allow = true;
};

class RuleTable {
public:
    RuleTable() = default;
    RuleTable(std::vector<Rule> rules, bool default_allow)
        : rules_(std::move(rules)), default_allow_(default_allow) {}

    bool allows(const Trace& prefix, const Token& w) const;
    const std::vector<Rule>& rules() const { return rules_; }
    bool default_allow() const { return default_allow_; }

private:
    std::vector<Rule> rules_;
    bool default_allow_ = true;
};

// Membership test for the set of admissible sequences. `extra` carries
// overlay facts a decode session has retrieved; realizations that do not
// consult facts ignore it.
using SequencePredicate =
    std::function<bool(const Trace&, const std::vector<Fact>& extra)>;

// A triple store plus a decidable sequence predicate. The constructor
// enforces the base axiom: the empty trace must be a member.
class KnowledgeBase {
public:
    KnowledgeBase(std::vector<Fact> facts, SequencePredicate predicate);

    bool contains(const Trace& trace, const std::vector<Fact>& extra = {}) const;
    const std::vector<Fact>& facts() const { return facts_; }

private:
    std::vector<Fact> facts_;
    SequencePredicate predicate_;
};

// Rule realization: a trace is admissible iff every extension step
// x[0..s-1] -> x[s] is allowed by the table. Prefix-closed and contains
// the empty trace by construction.
KnowledgeBase make_rule_kb(std::vector<Fact> facts, RuleTable rules);

// Triple realization: a trace is admissible iff no token claim in it is
// contradicted by the store (plus overlay). With require_support, a claim
// must additionally be witnessed by a matching fact.
using ClaimMap = std::vector<std::optional<TokenClaim>>; // indexed by token id
KnowledgeBase make_triple_kb(std::vector<Fact> facts, ClaimMap claims,
                             bool require_support);

// True iff every truncation take(s), 1 <= s <= length, is a member;
// vacuously true for the empty trace.
bool knowledge_consistent(const Trace& trace, const KnowledgeBase& kb,
                          const std::vector<Fact>& extra = {});

} // namespace tad
