#pragma once

// Semantic-information measures, the safe-entropy bound, the risk
// functional, and benchmark statistics. Pure functions over immutable
// inputs; all entropies are in nats.

#include "tad/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tad {

// Total model probability assigned to the safe set at `prefix`.
double safe_mass(const ScoringModel& model, const Trace& prefix,
                 const std::vector<Token>& safe);

// Shannon entropy of the model distribution renormalized over the safe
// set. Throws DegenerateSupportError when the safe mass is zero.
double semantic_entropy(const ScoringModel& model, const Trace& prefix,
                        const std::vector<Token>& safe);

// |safe| / |vocab|.
double semantic_density(const std::vector<Token>& safe, const Vocabulary& vocab);

// Entropy of the full-vocabulary distribution at `prefix`.
double full_entropy(const ScoringModel& model, const Trace& prefix);

// min( H(P(.|prefix))/pi + ln pi , ln |safe| ); an upper bound on
// semantic_entropy. Throws DegenerateSupportError when the mass is zero.
double entropy_bound(const ScoringModel& model, const Trace& prefix,
                     const std::vector<Token>& safe);

struct RiskPolicy {
    double omega = 0.5; // utility weight assigned to abstentions

    void validate() const;
};

// omega * (1 - pi) + (1 - omega) * [prefix inconsistent].
double risk(bool prefix_consistent, double pi, const RiskPolicy& policy);

struct BenchmarkCounts {
    long long n_total = 0;
    long long n_answered = 0;
    long long n_correct = 0;
    long long n_abstained = 0;

    void validate() const;
    long long errors() const { return n_total - n_correct; }
};

struct BenchmarkReport {
    double accuracy = 0.0;
    double error = 0.0;
    double coverage = 0.0;
    std::optional<double> accuracy_given_answered; // absent when nothing answered
    double utility = 0.0;
    std::optional<double> relative_gain;   // vs baseline, absent without one
    std::optional<double> error_reduction; // vs baseline, absent without one
    std::vector<std::string> flags;        // division-by-zero notes etc.
};

BenchmarkReport benchmark_stats(const BenchmarkCounts& counts, const RiskPolicy& policy,
                                const std::optional<BenchmarkCounts>& baseline = std::nullopt);

// Two-parameter logistic calibration sigma(a + b*pi), fitted by gradient
// descent on (pi, label) samples. Utility only; no reported target.
struct LogisticFit {
    double a = 0.0;
    double b = 0.0;
    int iterations = 0;
    double final_loss = 0.0;
};

double logistic(double a, double b, double pi);
LogisticFit fit_logistic(const std::vector<std::pair<double, int>>& samples,
                         double learning_rate = 0.5, int max_iterations = 5000,
                         double tolerance = 1e-10);

} // namespace tad
