#include "tad/perf.hpp"

namespace tad {

void CpiParams::validate() const {
    if (!(cpi0 >= 0.0 && c_hit >= 0.0 && c_miss >= 0.0 && c_agents >= 0.0)) {
        throw ValidationError("CPI cycle costs must be >= 0");
    }
    if (!(h_kb >= 0.0 && h_kb <= 1.0)) {
        throw ValidationError("KB hit rate must lie in [0, 1]");
    }
    if (!(clock_hz > 0.0)) {
        throw ValidationError("clock frequency must be > 0");
    }
}

double cpi(const CpiParams& p) {
    p.validate();
    return p.cpi0 + p.h_kb * p.c_hit + (1.0 - p.h_kb) * p.c_miss + p.c_agents;
}

double throughput(const CpiParams& p) {
    const double cycles = cpi(p);
    if (cycles == 0.0) {
        throw DivisionByZeroError("throughput undefined: CPI is zero");
    }
    return p.clock_hz / cycles;
}

double amdahl(double f, double s) {
    if (!(f >= 0.0 && f <= 1.0)) {
        throw ValidationError("Amdahl fraction must lie in [0, 1]");
    }
    if (!(s >= 1.0)) {
        throw ValidationError("Amdahl factor must be >= 1");
    }
    return 1.0 / ((1.0 - f) + f / s);
}

void ComplexityParams::validate() const {
    if (!(vocab_size > 0.0 && horizon > 0.0 && oracle_cost_seconds > 0.0)) {
        throw ValidationError("complexity parameters must be positive");
    }
    if (!(delta_avg > 0.0 && delta_avg <= 1.0)) {
        throw ValidationError("delta_avg must lie in (0, 1]");
    }
    if (!(batch_factor >= 1.0)) {
        throw ValidationError("batch_factor must be >= 1");
    }
}

ComplexityEstimate complexity_estimate(const ComplexityParams& p) {
    p.validate();
    ComplexityEstimate est;
    est.naive_seconds = p.horizon * p.vocab_size * p.oracle_cost_seconds;
    est.pruned_seconds =
        p.horizon * p.vocab_size * p.delta_avg * (p.oracle_cost_seconds / p.batch_factor);
    est.speedup = p.batch_factor / p.delta_avg;
    return est;
}

void PipelineStages::validate() const {
    if (!(t_lm >= 0.0 && t_fv >= 0.0 && t_mr >= 0.0 && t_cm >= 0.0)) {
        throw ValidationError("pipeline stage times must be >= 0");
    }
}

PipelineBottleneck pipeline_bottleneck(const PipelineStages& stages) {
    stages.validate();
    const std::pair<const char*, double> ordered[] = {
        {"LM", stages.t_lm}, {"FV", stages.t_fv}, {"MR", stages.t_mr}, {"CM", stages.t_cm}};
    PipelineBottleneck result;
    result.stage = ordered[0].first;
    result.service_time = ordered[0].second;
    for (const auto& [name, time] : ordered) {
        if (time > result.service_time) {
            result.stage = name;
            result.service_time = time;
        }
    }
    if (result.service_time == 0.0) {
        throw AllZeroError("pipeline bottleneck undefined: every stage time is zero");
    }
    result.throughput = 1.0 / result.service_time;
    return result;
}

MeasuredProfile measured_profile(const std::vector<DecodeResult>& results,
                                 const CpiParams& p) {
    if (results.empty()) {
        throw ValidationError("measured_profile requires at least one decode result");
    }
    p.validate();
    MeasuredProfile profile;
    profile.runs = results.size();

    double density_sum = 0.0;
    double query_sum = 0.0;
    double cost_sum = 0.0;
    std::vector<double> per_agent_sum;
    for (const DecodeResult& r : results) {
        for (const StepRecord& s : r.steps) {
            if (!s.chosen) continue; // exclude the terminal failing step
            ++profile.tokens;
            density_sum += s.density;
            query_sum += static_cast<double>(s.oracle_queries);
            cost_sum += s.agent_cost;
            if (per_agent_sum.size() < s.agent_costs.size()) {
                per_agent_sum.resize(s.agent_costs.size(), 0.0);
            }
            for (std::size_t i = 0; i < s.agent_costs.size(); ++i) {
                per_agent_sum[i] += s.agent_costs[i];
            }
        }
    }
    if (profile.tokens == 0) {
        throw ValidationError("measured_profile requires at least one emitted token");
    }
    const double n = static_cast<double>(profile.tokens);
    profile.delta_avg = density_sum / n;
    profile.queries_per_token = query_sum / n;
    profile.mean_agent_cost = cost_sum / n;
    profile.per_agent_mean_cost.reserve(per_agent_sum.size());
    for (double total : per_agent_sum) profile.per_agent_mean_cost.push_back(total / n);

    CpiParams measured = p;
    measured.c_agents = profile.mean_agent_cost;
    profile.modeled_cpi = cpi(measured);
    return profile;
}

} // namespace tad
