#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cpsync/minizinc.hpp"
#include "cpsync/problem_store.hpp"
#include "cpsync/sandbox.hpp"

namespace cpsync {

struct EvaluationRecord {
    std::string problem_id;
    bool feasible = false;
    /// COP only; unset when not run or undetermined.
    std::optional<bool> optimal;
    int gamma = 0;
    std::optional<Json> objective;
    /// "optimality undetermined", "feasibility undetermined", "mapping fault", ...
    std::vector<std::string> flags;
    std::string reason;
};

Json to_json(const EvaluationRecord& record);

/// CSP: feasible. COP: feasible and optimal (an undetermined optimality
/// check scores 0).
int score_gamma(ProblemKind kind, bool feasible, const std::optional<bool>& optimal);

/// Mean gamma. Throws EmptyBenchmark.
double compute_sa(const std::vector<int>& gammas);
/// Fraction of problems where some candidate scores 1. Problems with no
/// candidates count as misses. Throws EmptyBenchmark.
double compute_sa_at_1(const std::vector<std::vector<int>>& candidate_gammas);

struct FrrTrial {
    std::string kind = "checker";  ///< "checker" or "critique"
    bool rejected_ground_truth = false;
    /// The component crashed rather than rejecting; still counted as a rejection.
    bool error_counted = false;
};

/// Rejections / trials for each kind present. Throws NoTrials.
std::map<std::string, double> compute_frr(const std::vector<FrrTrial>& trials);

/// Renders `constraint name = value;` for a reference variable, using the
/// declared type from `interface` (see Toolchain::output_interface) when
/// available.
std::string equality_constraint(const std::string& name, const Json& value, const Json& interface);

class Evaluator {
  public:
    Evaluator(Toolchain& toolchain, SandboxRunner& sandbox, SolveOptions options = {});

    /// Throws MappingFault.
    Json map_solution(const EvalAssets& assets, const InputData& input, const Json& solution);

    /// Solves the reference model with the mapped values fixed. Throws
    /// ReferenceModelBroken when the reference model itself does not compile.
    SolveOutcome solve_fixed(const EvalAssets& assets, const InputData& input, const Json& mapped);
    bool check_feasible(const EvalAssets& assets, const InputData& input, const Json& mapped);

    /// True when no strictly better objective than `z` exists; nullopt when
    /// the solver could not decide.
    std::optional<bool> check_optimal(const EvalAssets& assets, const InputData& input, const Json& z);

    EvaluationRecord evaluate(const ProblemBundle& bundle, const Json& solution);

  private:
    void require_reference_compiles(const std::string& model);
    Json interface_of(const std::string& model, const std::string& dzn_text);

    Toolchain& toolchain_;
    SandboxRunner& sandbox_;
    SolveOptions options_;
    std::mutex mutex_;
    std::map<std::string, bool> compiled_;
    std::map<std::string, Json> interfaces_;
};

}  // namespace cpsync
