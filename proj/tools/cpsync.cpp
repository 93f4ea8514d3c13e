#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cpsync/commands.hpp"

namespace {

void add_common(CLI::App* cmd, cpsync::CommandOptions& o) {
    cmd->add_option("--config", o.config_path, "Workflow config JSON (K, r, R, strategy, tau, ...)");
    cmd->add_option("--provider", o.provider, "LLM provider mode")->check(CLI::IsMember({"live", "record", "replay"}));
    cmd->add_option("--fixtures", o.fixtures, "Fixture directory for record/replay");
    cmd->add_option("--seed", o.seed, "Seed for the fallback pick");
    cmd->add_option("--solver", o.solver, "MiniZinc solver id");
    cmd->add_option("--timeout", o.timeout_s, "Solver timeout in seconds");
    cmd->add_option("--workers", o.workers, "Worker threads");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--sandbox", o.sandbox, "Sandbox command, or canned:FILE");
    cmd->add_option("--minizinc", o.minizinc, "MiniZinc command, or service:CMD");
    cmd->add_option("--prompts", o.prompts_dir, "Directory of prompt template overrides");
    cmd->add_option("--llm-base-url", o.llm.base_url, "OpenAI-compatible endpoint");
    cmd->add_option("--llm-model", o.llm.model, "Model name sent to the endpoint");
    cmd->add_option("--api-key-env", o.llm.api_key_env, "Environment variable holding the API key");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-agent MiniZinc modeling with synthesized checkers"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

    cpsync::CommandOptions options;
    std::string bundle;
    std::string manifest;
    std::string config_id;

    auto* solve = app.add_subcommand("solve", "Run the workflow on one problem bundle");
    solve->add_option("bundle", bundle, "Problem bundle directory")->required();
    add_common(solve, options);

    auto* bench = app.add_subcommand("bench", "Solve and score every problem of a manifest");
    bench->add_option("manifest", manifest, "Run manifest JSON")->required();
    add_common(bench, options);

    auto* ablate = app.add_subcommand("ablate", "Benchmark one ablation configuration");
    ablate->add_option("manifest", manifest, "Run manifest JSON")->required();
    ablate->add_option("config_id", config_id, "1a, 1b, 1, 2, 3 or 4")
        ->required()
        ->check(CLI::IsMember({"1a", "1b", "1", "2", "3", "4"}));
    add_common(ablate, options);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    spdlog::set_default_logger(spdlog::stderr_color_mt("cpsync"));
    spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

    if (solve->parsed()) return cpsync::cmd_solve(bundle, options, std::cout, std::cerr);
    if (bench->parsed()) return cpsync::cmd_bench(manifest, options, std::cout, std::cerr);
    return cpsync::cmd_ablate(manifest, config_id, options, std::cout, std::cerr);
}
