#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "cpsync/minizinc.hpp"

namespace cptest {

struct CriterionResult {
    std::string name;
    bool passed = true;
    /// False when the run covered less than the full criterion.
    bool complete = true;
    std::string detail;
    std::vector<std::string> violations;

    void violation(std::string text);
};

/// First failing gate of each fixture under `gates_dir` against its
/// expected.txt, with the total wall time under 60 s.
CriterionResult gate_suite(cpsync::Toolchain& toolchain, const std::filesystem::path& gates_dir);

/// Every gate-failure sequence of length up to r+1 for r in {0, 1, 2, 4},
/// recorded and replayed.
CriterionResult reentry_budget(const std::filesystem::path& scratch);

/// G4 over all verdict sequences for K <= 5 and vote aggregation over all
/// vote sequences for K <= 5.
CriterionResult majority_logic();

/// Two cmd_solve runs per committed pack give byte-identical run records.
CriterionResult workflow_determinism(const std::string& minizinc, const std::filesystem::path& scratch);

CriterionResult end_to_end_replay(cpsync::Toolchain& toolchain, const std::string& minizinc,
                                  const std::filesystem::path& scratch);

struct SoundnessScope {
    /// Non-solutions checked per board size; 0 means all of them.
    std::size_t sample_n5 = 250;
    std::size_t sample_n6 = 250;
};

CriterionResult evaluator_soundness(cpsync::Toolchain& toolchain, const SoundnessScope& scope);

CriterionResult budget_identity();

CriterionResult metric_arithmetic();

/// All solutions of the reference N-Queens model for board size n, found by
/// solving repeatedly with earlier solutions excluded.
std::vector<std::vector<int>> solver_solutions(cpsync::Toolchain& toolchain, int n);

}  // namespace cptest
