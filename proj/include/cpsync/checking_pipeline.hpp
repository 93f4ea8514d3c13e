#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpsync/agents.hpp"
#include "cpsync/minizinc.hpp"
#include "cpsync/problem_store.hpp"
#include "cpsync/sandbox.hpp"
#include "cpsync/types.hpp"

namespace cpsync {

struct PipelineConfig {
    int refinement_budget = 4;
    std::string solver = "gecode";
    double solver_timeout_s = 30.0;
    /// When false G4 never runs (checker-free configurations).
    bool semantic_gate = true;
};

/// Last revision of a candidate that passed G1-G3.
struct SurvivorSnapshot {
    int revision = 0;
    std::string source;
    std::string formatter_source;
    Json assignment;
    Json solution;
    /// Most recent G4 result for this revision, if G4 ran.
    std::optional<GateResult> g4;
    std::vector<CheckerVerdict> verdicts;
    /// "G4: pass", "G4: fail (feedback rejected)", ...
    std::string note;
};

Json to_json(const SurvivorSnapshot& snapshot);

struct CascadeResult {
    std::optional<SurvivorSnapshot> survivor;
};

/// Strict majority: 2m > K.
inline bool majority_passes(int passes, int checker_count) { return 2 * passes > checker_count; }

class CheckingPipeline {
  public:
    CheckingPipeline(Toolchain& toolchain, SandboxRunner& sandbox, const ProblemBundle& bundle, PipelineConfig config);

    GateResult g1_syntax(const std::string& source);
    GateResult g2_solve(const std::string& source);
    GateResult g3_format(const FormatterProgram& formatter, const Json& assignment);
    GateResult g4_semantic(const std::vector<CheckerProgram>& checkers, const Json& solution,
                           std::vector<CheckerVerdict>* verdicts = nullptr);

    /// Runs one checker on `solution`.
    CheckerVerdict run_checker(const CheckerProgram& checker, const Json& solution);

    /// Drives `candidate` through G1-G4 with repairs until it survives,
    /// dies, or runs out of budget. Every gate result lands in
    /// candidate.gate_history.
    CascadeResult run_cascade(CandidateModel& candidate, const std::vector<CheckerProgram>& checkers, Agents& agents);

    [[nodiscard]] const PipelineConfig& config() const { return config_; }

  private:
    Toolchain& toolchain_;
    SandboxRunner& sandbox_;
    const ProblemBundle& bundle_;
    PipelineConfig config_;
};

}  // namespace cpsync
