#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpsync/llm_gateway.hpp"
#include "cpsync/problem_store.hpp"
#include "cpsync/prompts.hpp"
#include "cpsync/types.hpp"

namespace cpsync {

enum class SamplingStrategy { PromptDiverse, Temperature };
std::string to_string(SamplingStrategy strategy);

/// LLM call counters per agent role. Variant generation (refined and
/// planning-augmented descriptions, restart refinements) is tracked apart
/// from the three roles.
struct CallCounters {
    std::atomic<int> modeling{0};
    std::atomic<int> validation{0};
    std::atomic<int> selection{0};
    std::atomic<int> variants{0};
};

/// Snapshot of CallCounters.
struct CallCounts {
    int modeling = 0;
    int validation = 0;
    int selection = 0;
    int variants = 0;

    CallCounts operator-(const CallCounts& other) const {
        return {modeling - other.modeling, validation - other.validation, selection - other.selection,
                variants - other.variants};
    }
};

CallCounts snapshot(const CallCounters& counters);
Json to_json(const CallCounts& counts);

struct EvidenceCandidate {
    int index = 0;
    std::string source;
    Json solution;
    std::string status_line;
};

/// Everything a selection agent sees besides its own description.
struct EvidencePack {
    std::vector<CheckerProgram> checkers;
    std::vector<EvidenceCandidate> candidates;
};

struct RepairResult {
    bool repaired = false;
    /// Set when the trajectory died: "BudgetExhausted", "NoCodeBlock", ...
    std::string failure;
};

struct FeedbackDecision {
    bool accepted = false;
    std::string reason;
};

/// Failing checker together with the message it produced.
struct CheckerFeedback {
    CheckerProgram checker;
    VerdictKind verdict = VerdictKind::Fail;
    std::string message;
};

/// Prompt construction and response parsing for the modeling, validation
/// and selection roles. Holds no per-problem state; all trajectory state
/// lives in the CandidateModel passed in.
///
/// Every malformed response gets exactly one re-ask in the same chat. Each
/// candidate may spend at most `call_budget(r)` LLM calls; a call that would
/// exceed it is not made.
class Agents {
  public:
    Agents(LlmGateway& gateway, const PromptLibrary& prompts, CallCounters& counters);

    static int call_budget(int refinement_budget) { return refinement_budget + 2; }

    std::vector<SampledVariant> make_variants(const ProblemBundle& bundle, const std::string& description,
                                              SamplingStrategy strategy, int count, double temperature);

    /// Throws ParseError when the JSON envelope is still missing after one re-ask.
    DescriptionVariant refine_description(const ProblemBundle& bundle, const std::string& description,
                                          const std::string& tag = "variants/refine");
    DescriptionVariant synthesize_plan(const ProblemBundle& bundle, const std::string& description,
                                       const std::string& tag = "variants/plan");

    CandidateModel generate_model(const SampledVariant& variant, const ProblemBundle& bundle, int agent_index,
                                  int refinement_budget);
    CheckerProgram synthesize_checker(const SampledVariant& variant, const ProblemBundle& bundle, int agent_index);

    /// Generates the output formatter for `candidate` from a G2 assignment and
    /// stores it on the candidate. Returns false (and kills the candidate)
    /// when no usable function comes back.
    bool generate_formatter(CandidateModel& candidate, const ProblemBundle& bundle, const Json& assignment,
                            int refinement_budget);

    /// G1/G2 failures replace the model source, G3 failures the formatter.
    RepairResult repair_for_gate(CandidateModel& candidate, const GateResult& failure, int refinement_budget);

    FeedbackDecision decide_semantic_feedback(CandidateModel& candidate, const std::vector<CheckerVerdict>& verdicts,
                                              const std::vector<CheckerFeedback>& failing, int refinement_budget);

    SelectionVote cast_vote(const SampledVariant& variant, const EvidencePack& evidence, int agent_index);

    static std::string render_checker_section(const std::vector<CheckerProgram>& checkers);
    static std::string render_candidate_section(const std::vector<EvidenceCandidate>& candidates);

  private:
    enum class Role { Modeling, Validation, Selection, Variants };

    ChatResponse send(Conversation& chat, Role role);
    void count(Role role);

    LlmGateway& gateway_;
    const PromptLibrary& prompts_;
    CallCounters& counters_;
};

/// Status overview line shown to selection agents for one candidate.
std::string g4_status_line(int candidate_index, const std::optional<GateResult>& g4, int checker_count);

}  // namespace cpsync
