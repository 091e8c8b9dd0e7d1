#include "tad/core.hpp"

#include <algorithm>
#include <unordered_set>

namespace tad {

Vocabulary::Vocabulary(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
    std::sort(tokens_.begin(), tokens_.end(),
              [](const Token& a, const Token& b) { return a.id < b.id; });
    std::unordered_set<std::string> surfaces;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        const Token& t = tokens_[i];
        if (t.id != static_cast<int>(i)) {
            throw ValidationError("vocabulary ids must be exactly 0..size-1, got id " +
                                  std::to_string(t.id) + " at position " + std::to_string(i));
        }
        if (t.surface.empty()) {
            throw ValidationError("vocabulary token " + std::to_string(t.id) +
                                  " has an empty surface");
        }
        // prefix patterns match surfaces joined by spaces, so surfaces
        // must not contain whitespace themselves
        if (t.surface.find_first_of(" \t\n\r") != std::string::npos) {
            throw ValidationError("vocabulary surface '" + t.surface +
                                  "' contains whitespace");
        }
        if (!surfaces.insert(t.surface).second) {
            throw ValidationError("duplicate vocabulary surface '" + t.surface + "'");
        }
    }
}

Vocabulary Vocabulary::from_surfaces(const std::vector<std::string>& surfaces) {
    std::vector<Token> tokens;
    tokens.reserve(surfaces.size());
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        tokens.push_back(Token{static_cast<int>(i), surfaces[i]});
    }
    return Vocabulary(std::move(tokens));
}

const Token& Vocabulary::at(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
        throw UnknownTokenError("token id " + std::to_string(id) +
                                " outside vocabulary of size " + std::to_string(tokens_.size()));
    }
    return tokens_[static_cast<std::size_t>(id)];
}

std::optional<Token> Vocabulary::find_surface(std::string_view surface) const {
    for (const Token& t : tokens_) {
        if (t.surface == surface) return t;
    }
    return std::nullopt;
}

Trace Trace::take(std::size_t n) const {
    if (n >= tokens_.size()) return *this;
    return Trace(std::vector<Token>(tokens_.begin(), tokens_.begin() + static_cast<long>(n)));
}

Trace Trace::append(const Token& w) const {
    std::vector<Token> out = tokens_;
    out.push_back(w);
    return Trace(std::move(out));
}

std::string Trace::joined_surfaces() const {
    std::string out;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (i) out += ' ';
        out += tokens_[i].surface;
    }
    return out;
}

std::string Trace::id_key() const {
    std::string out;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(tokens_[i].id);
    }
    return out;
}

void Fact::validate() const {
    if (subject.empty() || relation.empty() || object.empty()) {
        throw ValidationError("fact fields subject/relation/object must be non-empty");
    }
    if (valid_from && valid_to && *valid_from > *valid_to) {
        throw ValidationError("fact (" + subject + ", " + relation + ", " + object +
                              ") has valid_from > valid_to");
    }
}

namespace {

bool window_contains(const Fact& f, std::optional<std::int64_t> at) {
    if (!at) return true;
    if (f.valid_from && *at < *f.valid_from) return false;
    if (f.valid_to && *at > *f.valid_to) return false;
    return true;
}

} // namespace

ClaimCheck check_claim(const TokenClaim& claim, const std::vector<Fact>& facts,
                       const std::vector<Fact>& extra) {
    ClaimCheck result;
    const Fact* conflict = nullptr;
    auto scan = [&](const std::vector<Fact>& pool) {
        for (const Fact& f : pool) {
            if (f.subject != claim.subject || f.relation != claim.relation) continue;
            if (f.object == claim.object && window_contains(f, claim.at)) {
                result.status = ClaimStatus::Supported;
                return;
            }
            if (!conflict) conflict = &f;
        }
    };
    scan(facts);
    if (result.status != ClaimStatus::Supported) scan(extra);
    if (result.status == ClaimStatus::Supported) return result;
    if (conflict) {
        result.status = ClaimStatus::Contradicted;
        result.conflicting = *conflict;
    }
    return result;
}

bool glob_match(std::string_view pattern, std::string_view text) {
    // Iterative matcher with single backtrack point per '*'.
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

bool RuleTable::allows(const Trace& prefix, const Token& w) const {
    const std::string key = prefix.joined_surfaces();
    for (const Rule& r : rules_) {
        if (glob_match(r.prefix_pattern, key) && glob_match(r.token_pattern, w.surface)) {
            return r.allow;
        }
    }
    return default_allow_;
}

KnowledgeBase::KnowledgeBase(std::vector<Fact> facts, SequencePredicate predicate)
    : facts_(std::move(facts)), predicate_(std::move(predicate)) {
    for (const Fact& f : facts_) f.validate();
    if (!predicate_) {
        throw ValidationError("knowledge base requires a sequence predicate");
    }
    if (!predicate_(Trace{}, {})) {
        throw ValidationError("knowledge base violates the base axiom: "
                              "the empty trace must be a member");
    }
}

bool KnowledgeBase::contains(const Trace& trace, const std::vector<Fact>& extra) const {
    return predicate_(trace, extra);
}

KnowledgeBase make_rule_kb(std::vector<Fact> facts, RuleTable rules) {
    auto predicate = [rules = std::move(rules)](const Trace& trace,
                                                const std::vector<Fact>&) {
        for (std::size_t s = 1; s <= trace.length(); ++s) {
            if (!rules.allows(trace.take(s - 1), trace[s - 1])) return false;
        }
        return true;
    };
    return KnowledgeBase(std::move(facts), std::move(predicate));
}

KnowledgeBase make_triple_kb(std::vector<Fact> facts, ClaimMap claims,
                             bool require_support) {
    std::vector<Fact> base = facts;
    auto predicate = [base, claims = std::move(claims), require_support](
                         const Trace& trace, const std::vector<Fact>& extra) {
        for (const Token& w : trace) {
            if (static_cast<std::size_t>(w.id) >= claims.size()) continue;
            const auto& claim = claims[static_cast<std::size_t>(w.id)];
            if (!claim) continue;
            const ClaimCheck check = check_claim(*claim, base, extra);
            if (check.status == ClaimStatus::Contradicted) return false;
            if (require_support && check.status == ClaimStatus::Unknown) return false;
        }
        return true;
    };
    return KnowledgeBase(std::move(facts), std::move(predicate));
}

bool knowledge_consistent(const Trace& trace, const KnowledgeBase& kb,
                          const std::vector<Fact>& extra) {
    for (std::size_t s = 1; s <= trace.length(); ++s) {
        if (!kb.contains(trace.take(s), extra)) return false;
    }
    return true;
}

} // namespace tad
