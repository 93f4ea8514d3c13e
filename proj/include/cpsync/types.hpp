#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpsync/canonical.hpp"
#include "cpsync/llm_gateway.hpp"

namespace cpsync {

enum class Gate { G1, G2, G3, G4 };
enum class GateStatus { Pass, Fail };

std::string to_string(Gate gate);
std::string to_string(GateStatus status);

/// Outcome of one gate. `failure_kind` refines a failure for routing:
/// G2 uses the solver status (UNSATISFIABLE, UNKNOWN, TIMEOUT, ERROR).
struct GateResult {
    Gate gate = Gate::G1;
    GateStatus status = GateStatus::Pass;
    std::string feedback;
    std::string failure_kind;
    /// G2: assignment. G3: formatted solution. G4: per-checker verdicts.
    std::optional<Json> artifacts;
    /// Revision of the candidate the gate ran on.
    int revision = 0;

    [[nodiscard]] bool passed() const { return status == GateStatus::Pass; }
};

Json to_json(const GateResult& result);

enum class VerdictKind { Pass, Fail, Error };
std::string to_string(VerdictKind verdict);

struct CheckerVerdict {
    int checker_index = 0;
    VerdictKind verdict = VerdictKind::Pass;
    std::string feedback;
};

Json to_json(const CheckerVerdict& verdict);

enum class VariantKind { Original, Refined, PlanningAugmented };
std::string to_string(VariantKind kind);

struct DescriptionVariant {
    VariantKind kind = VariantKind::Original;
    std::string text;
    /// Set when generating this variant failed and the original text stands in.
    bool fallback = false;
};

struct SampledVariant {
    DescriptionVariant variant;
    double temperature = 0.0;
};

/// An ongoing conversation with one agent; repairs append to it.
struct Conversation {
    std::string system_prompt;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::string tag;
};

struct FormatterProgram {
    std::string source;
    Conversation chat;
};

enum class CheckerHealth { Untested, Ok, Defective };
std::string to_string(CheckerHealth health);

struct CheckerProgram {
    int agent_index = 1;
    std::string source;
    CheckerHealth health = CheckerHealth::Untested;
    std::string defect;
};

/// One modeling trajectory.
struct CandidateModel {
    int agent_index = 1;
    int revision = 0;
    std::string source;
    std::vector<GateResult> gate_history;
    bool alive = true;
    std::string death_reason;

    Conversation chat;
    std::optional<FormatterProgram> formatter;
    /// Model source of every revision, index = revision number.
    std::vector<std::string> source_history;
    /// Formatter sources in the order they were produced.
    std::vector<std::string> formatter_history;
    /// LLM calls made on behalf of this trajectory (generation, re-asks,
    /// repairs, formatter, feedback decisions).
    int llm_calls = 0;
};

struct SelectionVote {
    int agent_index = 1;
    std::string reason;
    /// Candidate index, or -1 for reject-all.
    int selection = -1;
};

Json to_json(const SelectionVote& vote);

}  // namespace cpsync
