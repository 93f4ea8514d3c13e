#include "cpsync/checking_pipeline.hpp"

#include "cpsync/errors.hpp"
#include "cpsync/output_spec.hpp"

namespace cpsync {
namespace {

GateResult fail(Gate gate, std::string feedback, std::string kind = "") {
    GateResult r;
    r.gate = gate;
    r.status = GateStatus::Fail;
    r.feedback = feedback.empty() ? "unspecified failure" : std::move(feedback);
    r.failure_kind = std::move(kind);
    return r;
}

GateResult pass(Gate gate, std::optional<Json> artifacts = std::nullopt) {
    GateResult r;
    r.gate = gate;
    r.artifacts = std::move(artifacts);
    return r;
}

std::string exec_failure_text(const ExecResponse& response) {
    std::string text = response.message;
    if (!response.traceback.empty() && response.traceback != response.message) text += "\n" + response.traceback;
    return text;
}

}  // namespace

Json to_json(const SurvivorSnapshot& snapshot) {
    Json verdicts = Json::array();
    for (const auto& v : snapshot.verdicts) verdicts.push_back(to_json(v));
    Json out = {{"revision", snapshot.revision},
                {"source", snapshot.source},
                {"formatter_source", snapshot.formatter_source},
                {"assignment", snapshot.assignment},
                {"solution", snapshot.solution},
                {"verdicts", verdicts},
                {"note", snapshot.note}};
    if (snapshot.g4) out["g4"] = to_json(*snapshot.g4);
    return out;
}

CheckingPipeline::CheckingPipeline(Toolchain& toolchain, SandboxRunner& sandbox, const ProblemBundle& bundle,
                                   PipelineConfig config)
    : toolchain_(toolchain), sandbox_(sandbox), bundle_(bundle), config_(std::move(config)) {}

GateResult CheckingPipeline::g1_syntax(const std::string& source) {
    const CompileOutcome outcome = toolchain_.compile_check(source);
    if (outcome.ok) return pass(Gate::G1);
    return fail(Gate::G1, outcome.message, "COMPILE");
}

GateResult CheckingPipeline::g2_solve(const std::string& source) {
    const SolveOutcome outcome = toolchain_.solve(mzn::strip_output_items(source), bundle_.input_data.dzn_text,
                                                  {config_.solver, config_.solver_timeout_s});
    if (outcome.has_solution()) return pass(Gate::G2, outcome.assignment);
    const std::string kind = to_string(outcome.status);
    if (outcome.status == SolveStatus::Error) return fail(Gate::G2, outcome.message, kind);
    return fail(Gate::G2, kind, kind);
}

GateResult CheckingPipeline::g3_format(const FormatterProgram& formatter, const Json& assignment) {
    const ExecResponse response =
        sandbox_.execute({formatter.source, "transformer", bundle_.input_data.builtin_params, assignment});
    if (response.status != ExecStatus::Ok) return fail(Gate::G3, exec_failure_text(response), to_string(response.status));
    const Json& solution = *response.result;
    const auto problems = validate_output(solution, bundle_.output_spec, bundle_.input_data.builtin_params);
    if (problems.empty()) return pass(Gate::G3, solution);
    std::string feedback;
    for (const auto& p : problems) feedback += (feedback.empty() ? "" : "; ") + p;
    return fail(Gate::G3, feedback, "FORMAT");
}

CheckerVerdict CheckingPipeline::run_checker(const CheckerProgram& checker, const Json& solution) {
    CheckerVerdict verdict;
    verdict.checker_index = checker.agent_index;
    if (checker.source.empty() || checker.health == CheckerHealth::Defective) {
        verdict.verdict = VerdictKind::Error;
        verdict.feedback = "checker could not be synthesized: " + (checker.defect.empty() ? "no code" : checker.defect);
        return verdict;
    }
    const ExecResponse response =
        sandbox_.execute({checker.source, "semantic_checker", bundle_.input_data.builtin_params, solution});
    switch (response.status) {
        case ExecStatus::Ok: verdict.verdict = VerdictKind::Pass; break;
        case ExecStatus::Raise:
            verdict.verdict = VerdictKind::Fail;
            verdict.feedback = response.message;
            break;
        case ExecStatus::Error:
            verdict.verdict = VerdictKind::Error;
            verdict.feedback = exec_failure_text(response);
            break;
    }
    return verdict;
}

GateResult CheckingPipeline::g4_semantic(const std::vector<CheckerProgram>& checkers, const Json& solution,
                                         std::vector<CheckerVerdict>* verdicts) {
    std::vector<CheckerVerdict> results;
    for (const auto& checker : checkers) results.push_back(run_checker(checker, solution));
    int passes = 0;
    Json artifacts = Json::array();
    std::string feedback;
    for (const auto& v : results) {
        artifacts.push_back(to_json(v));
        if (v.verdict == VerdictKind::Pass) {
            ++passes;
            continue;
        }
        if (!feedback.empty()) feedback += "\n";
        feedback += "checker " + std::to_string(v.checker_index) + " (" + to_string(v.verdict) + "): " + v.feedback;
    }
    if (verdicts) *verdicts = results;
    GateResult r = majority_passes(passes, static_cast<int>(checkers.size()))
                       ? pass(Gate::G4)
                       : fail(Gate::G4, feedback.empty() ? "no checkers" : feedback, "SEMANTIC");
    if (r.passed()) r.feedback = feedback;
    r.artifacts = std::move(artifacts);
    return r;
}

CascadeResult CheckingPipeline::run_cascade(CandidateModel& candidate, const std::vector<CheckerProgram>& checkers,
                                            Agents& agents) {
    CascadeResult result;
    const int r = config_.refinement_budget;
    auto record = [&](GateResult g) {
        g.revision = candidate.revision;
        candidate.gate_history.push_back(g);
        return g;
    };

    while (candidate.alive) {
        const GateResult g1 = record(g1_syntax(candidate.source));
        if (!g1.passed()) {
            agents.repair_for_gate(candidate, g1, r);
            continue;
        }
        const GateResult g2 = record(g2_solve(candidate.source));
        if (!g2.passed()) {
            agents.repair_for_gate(candidate, g2, r);
            continue;
        }
        const Json& assignment = *g2.artifacts;
        if (!candidate.formatter && !agents.generate_formatter(candidate, bundle_, assignment, r)) break;
        const GateResult g3 = record(g3_format(*candidate.formatter, assignment));
        if (!g3.passed()) {
            agents.repair_for_gate(candidate, g3, r);
            continue;
        }

        SurvivorSnapshot snapshot;
        snapshot.revision = candidate.revision;
        snapshot.source = candidate.source;
        snapshot.formatter_source = candidate.formatter->source;
        snapshot.assignment = assignment;
        snapshot.solution = *g3.artifacts;
        result.survivor = snapshot;

        if (!config_.semantic_gate || checkers.empty()) {
            result.survivor->note = "G4: not run";
            break;
        }
        std::vector<CheckerVerdict> verdicts;
        const GateResult g4 = record(g4_semantic(checkers, snapshot.solution, &verdicts));
        result.survivor->g4 = g4;
        result.survivor->verdicts = verdicts;
        if (g4.passed()) {
            result.survivor->note = "G4: pass";
            break;
        }

        std::vector<CheckerFeedback> failing;
        for (const auto& v : verdicts) {
            if (v.verdict == VerdictKind::Pass) continue;
            for (const auto& c : checkers) {
                if (c.agent_index == v.checker_index) failing.push_back({c, v.verdict, v.feedback});
            }
        }
        const FeedbackDecision decision = agents.decide_semantic_feedback(candidate, verdicts, failing, r);
        if (!decision.accepted) {
            result.survivor->note = decision.reason == "refinement budget exhausted"
                                        ? "G4: fail (refinement budget exhausted)"
                                        : "G4: fail (feedback rejected)";
            break;
        }
        result.survivor->note = "G4: fail (feedback accepted)";
    }
    return result;
}

}  // namespace cpsync
