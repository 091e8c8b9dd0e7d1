#pragma once

// Scenario ingestion: a single JSON document declares the vocabulary,
// scoring model, knowledge base, oracle, agent cohort, decode parameters,
// scripted retrieval, and performance parameters.

#include "tad/agents.hpp"
#include "tad/core.hpp"
#include "tad/decoder.hpp"
#include "tad/metrics.hpp"
#include "tad/model.hpp"
#include "tad/oracle.hpp"
#include "tad/perf.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tad {

struct DecodeSpec {
    std::string algorithm = "tad"; // tad | guarded | abstain | proof
    int horizon = 0;
    double tau = 0.0;
    int retry_budget = 2;
    double omega = 0.5;
    std::vector<std::string> initial; // token surfaces
    bool prune_candidates = false;
};

struct RetrieverSpec {
    std::string kind = "null"; // null | scripted
    std::vector<std::vector<Fact>> script;
};

struct ProofSpec {
    std::string goal_kind = "token_reached"; // token_reached | trace_equals
    std::string goal_token;
    std::vector<std::string> goal_trace;
    int max_steps = 0;
};

struct PerfSpec {
    std::optional<CpiParams> cpi;
    std::optional<CpiParams> cpi_cached;
    std::vector<std::pair<double, double>> amdahl; // (f, s) instances
    std::optional<ComplexityParams> complexity;
    std::optional<PipelineStages> pipeline;
};

// Raw declarations kept alongside the built objects so a scenario can be
// serialized back out canonically.
struct KbSpec {
    std::string realization = "rules"; // rules | triples
    std::vector<Fact> facts;
    std::vector<Rule> rules;
    bool default_allow = true;
    bool require_support = false;
};

struct OracleSpec {
    std::string kind = "kb_backed"; // kb_backed | table
    std::vector<Rule> rules;
    bool default_allow = true;
};

struct AgentSpec {
    std::string kind; // factual | reasoner | monitor | table
    std::string name;
    double cost = 0.0;
    std::vector<Rule> rules;                 // table
    std::vector<ReasonerRule> reasoner_rules; // reasoner
    std::string default_result = "true";     // reasoner
    bool default_allow = true;               // table
    std::optional<std::string> initial_topic; // monitor
    std::optional<std::string> initial_tense; // monitor
};

struct Scenario {
    std::string name;
    Vocabulary vocabulary;
    AnnotationMap annotations;

    KbSpec kb_spec;
    OracleSpec oracle_spec;
    std::vector<AgentSpec> agent_specs;

    std::optional<ScoringModel> model;
    std::optional<KnowledgeBase> kb;
    std::optional<Oracle> oracle;
    std::vector<VerificationAgent> agents;

    DecodeSpec decode;
    RetrieverSpec retriever;
    std::optional<ProofSpec> proof;
    std::optional<PerfSpec> perf;

    nlohmann::json reference_values = nlohmann::json::object();
    nlohmann::json expected = nlohmann::json::object();

    std::unique_ptr<Retriever> make_retriever() const;
    ProofGoal make_proof_goal() const; // requires proof spec
    Trace initial_trace() const;
};

// Parses and validates a scenario document. Throws ParseError for
// malformed JSON and ValidationError (with field diagnostics) for
// structural violations.
Scenario parse_scenario(const nlohmann::json& doc, const std::string& fallback_name = "");
Scenario load_scenario(const std::filesystem::path& path);

// Canonical serialization; parse(serialize(s)) reproduces the scenario.
nlohmann::json serialize_scenario(const Scenario& scenario);

} // namespace tad
