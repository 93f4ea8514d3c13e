#include "cpsync/types.hpp"

namespace cpsync {

std::string to_string(Gate gate) {
    switch (gate) {
        case Gate::G1: return "G1";
        case Gate::G2: return "G2";
        case Gate::G3: return "G3";
        case Gate::G4: return "G4";
    }
    return "G?";
}

std::string to_string(GateStatus status) { return status == GateStatus::Pass ? "pass" : "fail"; }

std::string to_string(VerdictKind verdict) {
    switch (verdict) {
        case VerdictKind::Pass: return "pass";
        case VerdictKind::Fail: return "fail";
        case VerdictKind::Error: return "error";
    }
    return "error";
}

std::string to_string(VariantKind kind) {
    switch (kind) {
        case VariantKind::Original: return "original";
        case VariantKind::Refined: return "refined";
        case VariantKind::PlanningAugmented: return "planning_augmented";
    }
    return "original";
}

std::string to_string(CheckerHealth health) {
    switch (health) {
        case CheckerHealth::Untested: return "untested";
        case CheckerHealth::Ok: return "ok";
        case CheckerHealth::Defective: return "defective";
    }
    return "untested";
}

Json to_json(const GateResult& result) {
    Json out = {{"gate", to_string(result.gate)},
                {"status", to_string(result.status)},
                {"feedback", result.feedback},
                {"revision", result.revision}};
    if (!result.failure_kind.empty()) out["failure_kind"] = result.failure_kind;
    if (result.artifacts) out["artifacts"] = *result.artifacts;
    return out;
}

Json to_json(const CheckerVerdict& verdict) {
    return {{"checker", verdict.checker_index}, {"verdict", to_string(verdict.verdict)}, {"feedback", verdict.feedback}};
}

Json to_json(const SelectionVote& vote) {
    return {{"agent", vote.agent_index}, {"reason", vote.reason}, {"selection", vote.selection}};
}

}  // namespace cpsync
