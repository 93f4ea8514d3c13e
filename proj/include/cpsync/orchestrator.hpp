#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpsync/agents.hpp"
#include "cpsync/checking_pipeline.hpp"

namespace cpsync {

/// How Step 5 picks among survivors.
enum class SelectionMode {
    Votes,             ///< selection agents, strict majority
    SolutionMajority,  ///< plurality over identical formatted solutions
    MostCheckers,      ///< survivor passing the most semantic checkers
    FirstSurvivor,     ///< single-trajectory configurations
};
std::string to_string(SelectionMode mode);
SelectionMode selection_mode_from_string(const std::string& text);

struct WorkflowConfig {
    int K = 3;
    int r = 4;
    int R = 1;
    SamplingStrategy strategy = SamplingStrategy::PromptDiverse;
    double tau = 0.7;
    std::string solver = "gecode";
    int solver_timeout_s = 30;
    std::uint64_t seed = 0;
    int worker_limit = 1;
    bool validation_enabled = true;
    SelectionMode selection_mode = SelectionMode::Votes;
};

/// Throws ConfigError when an invariant does not hold.
void validate(const WorkflowConfig& config);
Json to_json(const WorkflowConfig& config);
/// Keys absent from `json` keep the values of `base`.
WorkflowConfig config_from_json(const Json& json, WorkflowConfig base = {});

/// Applies an ablation configuration id (1a, 1b, 1, 2, 3, 4) to `base`.
WorkflowConfig ablation_config(const std::string& id, WorkflowConfig base = {});

struct VoteDecision {
    bool selected = false;
    int index = -1;
};

/// Strict majority over K votes; reject-all majorities and splits abort.
VoteDecision aggregate_votes(const std::vector<SelectionVote>& votes, int agent_count);

/// r + (1 + r) * R <= total.
bool check_budget_identity(long long r, long long R, long long total);
/// Largest R satisfying the identity, or -1 when even R = 0 does not.
long long max_restarts(long long r, long long total);

/// Uniform index in [0, n) from a 64-bit Mersenne Twister by rejection
/// sampling, so picks agree across standard libraries.
std::size_t uniform_pick(std::uint64_t seed, std::size_t n);

enum class OutcomeStatus { Selected, Fallback, Exhausted };
std::string to_string(OutcomeStatus status);

struct CandidateRecord {
    CandidateModel model;
    std::optional<SurvivorSnapshot> survivor;
};

struct IterationRecord {
    int index = 0;
    std::string description;
    bool description_fallback = false;
    std::vector<SampledVariant> variants;
    std::vector<CandidateRecord> candidates;
    std::vector<CheckerProgram> checkers;
    std::vector<SelectionVote> votes;
    /// "selected", "abort: no survivors", "abort: no majority".
    std::string decision;
    /// Agent index of the selected candidate, or -1.
    int selected = -1;
    CallCounts calls;
};

struct Telemetry {
    std::map<std::string, int> gate_failures = {{"G1", 0}, {"G2", 0}, {"G3", 0}, {"G4", 0}};
    CallCounts calls;
};

struct WorkflowOutcome {
    OutcomeStatus status = OutcomeStatus::Exhausted;
    std::optional<std::string> model;
    std::optional<Json> solution;
    int iterations_used = 0;
    /// (iteration, agent index) of the returned candidate.
    std::optional<std::pair<int, int>> chosen;
    Telemetry telemetry;
    std::vector<IterationRecord> iterations;
};

/// Per-iteration call bounds: modeling <= K(r+2), validation <= 2K,
/// selection <= 2K.
bool within_call_bounds(const IterationRecord& iteration, const WorkflowConfig& config);

struct WorkflowServices {
    LlmGateway& gateway;
    const PromptLibrary& prompts;
    Toolchain& toolchain;
    SandboxRunner& sandbox;
};

WorkflowOutcome run_workflow(const ProblemBundle& bundle, const WorkflowConfig& config,
                             const WorkflowServices& services);

/// Runs fn(0..n-1) on up to `workers` threads. Exceptions are rethrown
/// after all tasks finish, lowest index first.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace cpsync
