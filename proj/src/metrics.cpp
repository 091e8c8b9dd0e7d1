#include "tad/metrics.hpp"

#include <cmath>
#include <limits>

namespace tad {

double safe_mass(const ScoringModel& model, const Trace& prefix,
                 const std::vector<Token>& safe) {
    double mass = 0.0;
    for (const Token& w : safe) mass += model.prob(prefix, w);
    return mass;
}

double semantic_entropy(const ScoringModel& model, const Trace& prefix,
                        const std::vector<Token>& safe) {
    const double pi = safe_mass(model, prefix, safe);
    if (pi <= 0.0) {
        throw DegenerateSupportError("semantic entropy undefined: safe mass is zero");
    }
    double h = 0.0;
    for (const Token& w : safe) {
        const double q = model.prob(prefix, w) / pi;
        if (q > 0.0) h -= q * std::log(q);
    }
    return h;
}

double semantic_density(const std::vector<Token>& safe, const Vocabulary& vocab) {
    if (vocab.empty()) return 0.0;
    return static_cast<double>(safe.size()) / static_cast<double>(vocab.size());
}

double full_entropy(const ScoringModel& model, const Trace& prefix) {
    double h = 0.0;
    for (const Token& w : model.vocabulary()) {
        const double p = model.prob(prefix, w);
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double entropy_bound(const ScoringModel& model, const Trace& prefix,
                     const std::vector<Token>& safe) {
    const double pi = safe_mass(model, prefix, safe);
    if (pi <= 0.0) {
        throw DegenerateSupportError("entropy bound undefined: safe mass is zero");
    }
    const double jensen = full_entropy(model, prefix) / pi + std::log(pi);
    const double cardinality = std::log(static_cast<double>(safe.size()));
    return std::min(jensen, cardinality);
}

void RiskPolicy::validate() const {
    if (!(omega >= 0.0 && omega <= 1.0)) {
        throw ValidationError("risk policy omega must lie in [0, 1]");
    }
}

double risk(bool prefix_consistent, double pi, const RiskPolicy& policy) {
    policy.validate();
    const double indicator = prefix_consistent ? 0.0 : 1.0;
    return policy.omega * (1.0 - pi) + (1.0 - policy.omega) * indicator;
}

void BenchmarkCounts::validate() const {
    if (n_total < 0 || n_answered < 0 || n_correct < 0 || n_abstained < 0) {
        throw ValidationError("benchmark counts must be non-negative");
    }
    if (n_answered + n_abstained != n_total) {
        throw ValidationError("benchmark counts require n_answered + n_abstained == n_total");
    }
    if (n_correct > n_answered) {
        throw ValidationError("benchmark counts require n_correct <= n_answered");
    }
    if (n_total == 0) {
        throw ValidationError("benchmark counts require n_total > 0");
    }
}

BenchmarkReport benchmark_stats(const BenchmarkCounts& counts, const RiskPolicy& policy,
                                const std::optional<BenchmarkCounts>& baseline) {
    counts.validate();
    policy.validate();
    BenchmarkReport report;
    const double total = static_cast<double>(counts.n_total);
    report.accuracy = static_cast<double>(counts.n_correct) / total;
    report.error = 1.0 - report.accuracy;
    report.coverage = static_cast<double>(counts.n_answered) / total;
    if (counts.n_answered > 0) {
        report.accuracy_given_answered =
            static_cast<double>(counts.n_correct) / static_cast<double>(counts.n_answered);
    } else {
        report.flags.push_back("accuracy_given_answered undefined: nothing answered");
    }
    report.utility = (static_cast<double>(counts.n_correct) +
                      policy.omega * static_cast<double>(counts.n_abstained)) /
                     total;
    if (baseline) {
        baseline->validate();
        const double base_acc =
            static_cast<double>(baseline->n_correct) / static_cast<double>(baseline->n_total);
        if (base_acc > 0.0) {
            report.relative_gain = report.accuracy / base_acc - 1.0;
        } else {
            report.flags.push_back("relative_gain undefined: baseline accuracy is zero");
        }
        if (baseline->errors() > 0) {
            report.error_reduction = 1.0 - static_cast<double>(counts.errors()) /
                                               static_cast<double>(baseline->errors());
        } else {
            report.flags.push_back("error_reduction undefined: baseline has zero errors");
        }
    }
    return report;
}

double logistic(double a, double b, double pi) {
    return 1.0 / (1.0 + std::exp(-(a + b * pi)));
}

LogisticFit fit_logistic(const std::vector<std::pair<double, int>>& samples,
                         double learning_rate, int max_iterations, double tolerance) {
    if (samples.empty()) throw ValidationError("logistic fit requires samples");
    LogisticFit fit;
    const double n = static_cast<double>(samples.size());
    double previous_loss = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iterations; ++it) {
        double grad_a = 0.0, grad_b = 0.0, loss = 0.0;
        for (const auto& [pi, label] : samples) {
            const double p = logistic(fit.a, fit.b, pi);
            const double y = label ? 1.0 : 0.0;
            grad_a += (p - y);
            grad_b += (p - y) * pi;
            const double eps = 1e-12;
            loss -= y * std::log(p + eps) + (1.0 - y) * std::log(1.0 - p + eps);
        }
        fit.a -= learning_rate * grad_a / n;
        fit.b -= learning_rate * grad_b / n;
        fit.iterations = it + 1;
        fit.final_loss = loss / n;
        if (std::abs(previous_loss - fit.final_loss) < tolerance) break;
        previous_loss = fit.final_loss;
    }
    return fit;
}

} // namespace tad
