#include "tad/model.hpp"

#include <algorithm>
#include <cmath>

namespace tad {

ContextMode context_mode_from_string(const std::string& s) {
    if (s == "exact") return ContextMode::Exact;
    if (s == "last_token") return ContextMode::LastToken;
    if (s == "token_set") return ContextMode::TokenSet;
    throw ValidationError("unknown context mode '" + s +
                          "' (expected exact | last_token | token_set)");
}

std::string to_string(ContextMode mode) {
    switch (mode) {
        case ContextMode::Exact: return "exact";
        case ContextMode::LastToken: return "last_token";
        case ContextMode::TokenSet: return "token_set";
    }
    return "exact";
}

namespace {

constexpr double kNormalizationTolerance = 1e-9;

void validate_vector(const std::string& key, const std::vector<double>& v,
                     std::size_t vocab_size, bool normalized) {
    if (v.size() != vocab_size) {
        throw ValidationError("score vector for context '" + key + "' has " +
                              std::to_string(v.size()) + " entries, vocabulary has " +
                              std::to_string(vocab_size));
    }
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0)) {
            throw ValidationError("negative score in context '" + key + "'");
        }
        sum += x;
    }
    if (normalized && std::abs(sum - 1.0) > kNormalizationTolerance) {
        throw ValidationError("context '" + key + "' sums to " + std::to_string(sum) +
                              ", expected 1 within 1e-9");
    }
}

} // namespace

ScoringModel::ScoringModel(Vocabulary vocabulary, ContextMode mode, bool normalized,
                           std::unordered_map<std::string, std::vector<double>> contexts,
                           std::optional<std::vector<double>> fallback)
    : vocabulary_(std::move(vocabulary)),
      mode_(mode),
      normalized_(normalized),
      contexts_(std::move(contexts)),
      fallback_(std::move(fallback)) {
    for (const auto& [key, v] : contexts_) {
        validate_vector(key, v, vocabulary_.size(), normalized_);
    }
    if (fallback_) validate_vector("<fallback>", *fallback_, vocabulary_.size(), normalized_);
}

std::string ScoringModel::context_key(const Trace& prefix) const {
    switch (mode_) {
        case ContextMode::Exact:
            return prefix.joined_surfaces();
        case ContextMode::LastToken:
            return prefix.empty() ? std::string{} : prefix.back().surface;
        case ContextMode::TokenSet: {
            std::vector<int> ids;
            for (const Token& t : prefix) {
                if (std::find(ids.begin(), ids.end(), t.id) == ids.end()) ids.push_back(t.id);
            }
            std::sort(ids.begin(), ids.end());
            std::string key;
            for (std::size_t i = 0; i < ids.size(); ++i) {
                if (i) key += ' ';
                key += vocabulary_.at(ids[i]).surface;
            }
            return key;
        }
    }
    return {};
}

const std::vector<double>& ScoringModel::vector_for(const Trace& prefix) const {
    const std::string key = context_key(prefix);
    auto it = contexts_.find(key);
    if (it != contexts_.end()) return it->second;
    if (fallback_) return *fallback_;
    throw UndefinedContextError("no score vector for context '" + key +
                                "' and no fallback declared");
}

double ScoringModel::prob(const Trace& prefix, const Token& w) const {
    if (w.id < 0 || static_cast<std::size_t>(w.id) >= vocabulary_.size() ||
        vocabulary_.at(w.id) != w) {
        throw UnknownTokenError("token '" + w.surface + "' (id " + std::to_string(w.id) +
                                ") is not in the model vocabulary");
    }
    return vector_for(prefix)[static_cast<std::size_t>(w.id)];
}

double ScoringModel::log_prob(const Trace& prefix, const Token& w) const {
    return std::log(prob(prefix, w));
}

double ScoringModel::sequence_log_prob(const Trace& trace) const {
    double sum = 0.0;
    for (std::size_t s = 0; s < trace.length(); ++s) {
        sum += log_prob(trace.take(s), trace[s]);
    }
    return sum;
}

double ScoringModel::sequence_prob(const Trace& trace) const {
    return std::exp(sequence_log_prob(trace));
}

} // namespace tad
