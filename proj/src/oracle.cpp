#include "tad/oracle.hpp"

#include <cstdlib>
#include <limits>

namespace tad {

Oracle::Oracle(std::string name, JudgeFn judge)
    : name_(std::move(name)), judge_(std::move(judge)), memo_(std::make_shared<Memo>()) {
    if (!judge_) throw ValidationError("oracle '" + name_ + "' requires a judge function");
}

Oracle::Oracle(std::string name, JudgeFn judge, PrefixJudgeFn prefix_judge)
    : Oracle(std::move(name), std::move(judge)) {
    custom_prefix_ = std::move(prefix_judge);
}

bool Oracle::judge(const Trace& prefix, const Token& w) const {
    return judge(prefix, w, {});
}

bool Oracle::judge(const Trace& prefix, const Token& w, const std::vector<Fact>& extra) const {
    if (!extra.empty()) return judge_(prefix, w, extra);

    std::unique_lock lock(memo_->mutex);
    if (!memo_->enabled) {
        ++memo_->stats.lookups;
        ++memo_->stats.evaluations;
        lock.unlock();
        return judge_(prefix, w, extra);
    }
    ++memo_->stats.lookups;
    const std::string key = prefix.id_key() + "|" + std::to_string(w.id);
    auto it = memo_->cache.find(key);
    if (it != memo_->cache.end()) {
        ++memo_->stats.hits;
        return it->second;
    }
    lock.unlock();
    const bool verdict = judge_(prefix, w, extra);
    lock.lock();
    ++memo_->stats.evaluations;
    memo_->cache.emplace(key, verdict); // concurrent inserts write identical values
    return verdict;
}

bool Oracle::prefix_judge(const Trace& trace, const std::vector<Fact>& extra) const {
    if (custom_prefix_) return custom_prefix_(trace, extra);
    for (std::size_t s = 1; s <= trace.length(); ++s) {
        if (!judge(trace.take(s - 1), trace[s - 1], extra)) return false;
    }
    return true;
}

void Oracle::set_memo_enabled(bool enabled) const {
    std::lock_guard lock(memo_->mutex);
    memo_->enabled = enabled;
}

bool Oracle::memo_enabled() const {
    std::lock_guard lock(memo_->mutex);
    return memo_->enabled;
}

Oracle::MemoStats Oracle::memo_stats() const {
    std::lock_guard lock(memo_->mutex);
    return memo_->stats;
}

void Oracle::reset_memo() const {
    std::lock_guard lock(memo_->mutex);
    memo_->cache.clear();
    memo_->stats = MemoStats{};
}

std::vector<Token> safe_set(const Oracle& oracle, const Trace& prefix,
                            const Vocabulary& vocab, const std::vector<Fact>& extra) {
    return safe_set_over(oracle, prefix, vocab.tokens(), extra);
}

std::vector<Token> safe_set_over(const Oracle& oracle, const Trace& prefix,
                                 const std::vector<Token>& candidates,
                                 const std::vector<Fact>& extra) {
    std::vector<Token> out;
    for (const Token& w : candidates) {
        if (oracle.judge(prefix, w, extra)) out.push_back(w);
    }
    return out;
}

std::uint64_t enumeration_budget() {
    if (const char* env = std::getenv("TAD_ENUM_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
        throw ValidationError("TAD_ENUM_BUDGET must be a positive integer, got '" +
                              std::string(env) + "'");
    }
    return 1'000'000;
}

void require_enumeration_within_budget(std::size_t vocab_size, int max_len) {
    const std::uint64_t budget = enumeration_budget();
    std::uint64_t total = 1; // the empty trace
    std::uint64_t layer = 1;
    for (int l = 1; l <= max_len; ++l) {
        if (vocab_size != 0 && layer > budget / vocab_size) {
            throw BudgetExceededError("enumeration of |V|=" + std::to_string(vocab_size) +
                                      " up to length " + std::to_string(max_len) +
                                      " exceeds the budget of " + std::to_string(budget) +
                                      " sequences");
        }
        layer *= vocab_size;
        if (total > budget - layer) {
            throw BudgetExceededError("enumeration of |V|=" + std::to_string(vocab_size) +
                                      " up to length " + std::to_string(max_len) +
                                      " exceeds the budget of " + std::to_string(budget) +
                                      " sequences");
        }
        total += layer;
    }
}

namespace {

void enumerate_rec(const KnowledgeBase& kb, const Vocabulary& vocab, int remaining,
                   const Trace& current, std::vector<Trace>& out) {
    out.push_back(current);
    if (remaining == 0) return;
    for (const Token& w : vocab) {
        const Trace next = current.append(w);
        if (kb.contains(next)) {
            enumerate_rec(kb, vocab, remaining - 1, next, out);
        }
    }
}

} // namespace

std::vector<Trace> enumerate_consistent(const KnowledgeBase& kb, const Vocabulary& vocab,
                                        int max_len) {
    if (max_len < 0) throw ValidationError("max_len must be >= 0");
    require_enumeration_within_budget(vocab.size(), max_len);
    std::vector<Trace> out;
    enumerate_rec(kb, vocab, max_len, Trace{}, out);
    return out;
}

OracleReport check_soundness(const Oracle& oracle, const KnowledgeBase& kb,
                             const Vocabulary& vocab, int max_len) {
    if (max_len < 1) throw ValidationError("max_len must be >= 1");
    require_enumeration_within_budget(vocab.size(), max_len);
    OracleReport report;
    for (const Trace& x : enumerate_consistent(kb, vocab, max_len - 1)) {
        for (const Token& w : vocab) {
            if (!oracle.judge(x, w)) continue;
            if (!kb.contains(x.append(w))) {
                report.sound = false;
                report.counterexamples.push_back({x, w, "soundness"});
            }
        }
    }
    return report;
}

OracleReport check_completeness(const Oracle& oracle, const KnowledgeBase& kb,
                                const Vocabulary& vocab, int max_len) {
    if (max_len < 1) throw ValidationError("max_len must be >= 1");
    require_enumeration_within_budget(vocab.size(), max_len);
    OracleReport report;
    for (const Trace& p : enumerate_consistent(kb, vocab, max_len - 1)) {
        for (const Token& w : vocab) {
            if (!kb.contains(p.append(w))) continue;
            if (!oracle.judge(p, w)) {
                report.complete = false;
                report.counterexamples.push_back({p, w, "completeness"});
            }
        }
    }
    return report;
}

OracleReport certify_oracle(const Oracle& oracle, const KnowledgeBase& kb,
                            const Vocabulary& vocab, int max_len) {
    OracleReport sound = check_soundness(oracle, kb, vocab, max_len);
    OracleReport complete = check_completeness(oracle, kb, vocab, max_len);
    OracleReport merged;
    merged.sound = sound.sound;
    merged.complete = complete.complete;
    merged.counterexamples = std::move(sound.counterexamples);
    merged.counterexamples.insert(merged.counterexamples.end(),
                                  complete.counterexamples.begin(),
                                  complete.counterexamples.end());
    return merged;
}

std::vector<Counterexample> check_prefix_coherence(const Oracle& oracle,
                                                   const Vocabulary& vocab, int max_len) {
    require_enumeration_within_budget(vocab.size(), max_len);
    std::vector<Counterexample> bad;
    // Walk prefixes the prefix judge itself approves.
    std::vector<Trace> frontier{Trace{}};
    for (int len = 0; len < max_len; ++len) {
        std::vector<Trace> next;
        for (const Trace& x : frontier) {
            if (!oracle.prefix_judge(x)) continue;
            for (const Token& w : vocab) {
                const Trace ext = x.append(w);
                if (oracle.prefix_judge(ext) != oracle.judge(x, w)) {
                    bad.push_back({x, w, "coherence"});
                }
                next.push_back(ext);
            }
        }
        frontier = std::move(next);
    }
    return bad;
}

} // namespace tad
