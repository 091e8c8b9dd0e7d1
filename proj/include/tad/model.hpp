#pragma once

// Scoring model: the conditional distribution P(w | prefix) given as
// explicit tables keyed by a context reduction of the prefix.

#include "tad/core.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace tad {

// How a prefix reduces to a table key:
//   Exact     - full surface sequence, space-joined
//   LastToken - surface of the last token ("" for the empty prefix)
//   TokenSet  - distinct surfaces present, in id order, space-joined
enum class ContextMode { Exact, LastToken, TokenSet };

ContextMode context_mode_from_string(const std::string& s);
std::string to_string(ContextMode mode);

class ScoringModel {
public:
    // `contexts` maps key -> score vector over the vocabulary (id order).
    // With normalized=true each vector must be a distribution within 1e-9;
    // otherwise any non-negative score vector is accepted.
    ScoringModel(Vocabulary vocabulary, ContextMode mode, bool normalized,
                 std::unordered_map<std::string, std::vector<double>> contexts,
                 std::optional<std::vector<double>> fallback);

    double prob(const Trace& prefix, const Token& w) const;
    double log_prob(const Trace& prefix, const Token& w) const;

    // Left-to-right sum of per-step log probs; the additive identity
    // sequence_log_prob(x || w) == sequence_log_prob(x) + log_prob(x, w)
    // is exact because it is the same arithmetic path.
    double sequence_log_prob(const Trace& trace) const;
    // exp of the log form; 1 for the empty trace.
    double sequence_prob(const Trace& trace) const;

    std::string context_key(const Trace& prefix) const;
    const std::vector<double>& vector_for(const Trace& prefix) const;

    const Vocabulary& vocabulary() const { return vocabulary_; }
    ContextMode mode() const { return mode_; }
    bool normalized() const { return normalized_; }
    const std::unordered_map<std::string, std::vector<double>>& contexts() const {
        return contexts_;
    }
    const std::optional<std::vector<double>>& fallback() const { return fallback_; }

private:
    Vocabulary vocabulary_;
    ContextMode mode_;
    bool normalized_;
    std::unordered_map<std::string, std::vector<double>> contexts_;
    std::optional<std::vector<double>> fallback_;
};

} // namespace tad
