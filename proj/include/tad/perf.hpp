#pragma once

// Analytic performance accounting: additive CPI model, throughput,
// Amdahl-style speedup, complexity estimates, and a pipeline bottleneck
// view. Cycles are abstract units; clock conversion is presentation-only.

#include "tad/decoder.hpp"

#include <string>
#include <vector>

namespace tad {

struct CpiParams {
    double cpi0 = 0.0;      // base cycles per token
    double h_kb = 0.0;      // KB hit rate in [0, 1]
    double c_hit = 0.0;     // cycles per KB hit
    double c_miss = 0.0;    // cycles per KB miss
    double c_agents = 0.0;  // fixed per-token agent overhead, cycles
    double clock_hz = 1.0;

    void validate() const;
};

// cpi0 + h_kb*c_hit + (1 - h_kb)*c_miss + c_agents.
double cpi(const CpiParams& p);

// clock_hz / cpi(p), tokens per second.
double throughput(const CpiParams& p);

// 1 / ((1 - f) + f / s) for an optimization of factor s >= 1 applied to a
// fraction f of time.
double amdahl(double f, double s);

struct ComplexityParams {
    double vocab_size = 0.0;
    double horizon = 0.0;
    double oracle_cost_seconds = 0.0;
    double delta_avg = 1.0;     // mean semantic density in (0, 1]
    double batch_factor = 1.0;  // oracle-call amortization, >= 1

    void validate() const;
};

struct ComplexityEstimate {
    double naive_seconds = 0.0;
    double pruned_seconds = 0.0;
    double speedup = 0.0; // equals batch_factor / delta_avg exactly
};

ComplexityEstimate complexity_estimate(const ComplexityParams& p);

struct PipelineStages {
    double t_lm = 0.0;
    double t_fv = 0.0;
    double t_mr = 0.0;
    double t_cm = 0.0;

    void validate() const;
};

struct PipelineBottleneck {
    std::string stage;      // "LM" | "FV" | "MR" | "CM"; ties pick the first
    double service_time = 0.0;
    double throughput = 0.0; // 1 / service_time
};

// Throws AllZeroError when every stage time is zero.
PipelineBottleneck pipeline_bottleneck(const PipelineStages& stages);

struct MeasuredProfile {
    double delta_avg = 0.0;          // mean per-step density over emitted tokens
    double queries_per_token = 0.0;  // mean oracle judgments per emitted token
    double mean_agent_cost = 0.0;    // mean cohort cost per emitted token
    std::vector<double> per_agent_mean_cost;
    double modeled_cpi = 0.0;        // cpi(p) with c_agents := mean_agent_cost
    std::size_t runs = 0;
    std::size_t tokens = 0;
};

// Aggregates decode runs into the cost model: c_tad is everything in `p`
// except c_agents, which is replaced by the measured cohort mean.
MeasuredProfile measured_profile(const std::vector<DecodeResult>& results,
                                 const CpiParams& p);

} // namespace tad
