#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpsync/evaluator.hpp"
#include "cpsync/llm_gateway.hpp"
#include "cpsync/orchestrator.hpp"

namespace cpsync {

/// Flags shared by solve, bench and ablate. Unset optionals leave the value
/// from the config file or manifest in place.
struct CommandOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> provider;  ///< live | record | replay
    std::optional<std::string> fixtures;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> solver;
    std::optional<int> timeout_s;
    std::optional<int> workers;
    std::optional<std::string> out;
    /// Sandbox command line, or "canned:FILE".
    std::optional<std::string> sandbox;
    /// MiniZinc command line, or "service:CMD" for a persistent server.
    std::optional<std::string> minizinc;
    std::optional<std::string> prompts_dir;
    OpenAiSettings llm;
};

struct RunManifest {
    WorkflowConfig config;
    std::vector<std::string> problems;
    std::string provider = "replay";
    std::string fixtures;
    std::string output_dir = "runs";
};

/// Relative problem, fixture and output paths resolve against the manifest's
/// directory. Throws ConfigError.
RunManifest load_manifest(const std::string& path);

/// Exit codes: 0 selected or fallback, 2 exhausted, 1 infrastructure fault.
int cmd_solve(const std::string& bundle_path, const CommandOptions& options, std::ostream& out, std::ostream& err);
/// Exit code 0 once the report is written, 1 when the batch cannot start.
int cmd_bench(const std::string& manifest_path, const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_ablate(const std::string& manifest_path, const std::string& config_id, const CommandOptions& options,
               std::ostream& out, std::ostream& err);

/// Default MiniZinc command: $CPSYNC_MINIZINC, else "minizinc".
std::string default_minizinc_command();

}  // namespace cpsync
