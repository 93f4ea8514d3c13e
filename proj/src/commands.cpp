#include "cpsync/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>

#include <spdlog/spdlog.h>

#include "cpsync/errors.hpp"
#include "cpsync/run_record.hpp"

namespace cpsync {
namespace fs = std::filesystem;

namespace {

constexpr int kReportSchemaVersion = 1;

std::string resolve(const fs::path& base, const std::string& path) {
    if (path.empty()) return path;
    const fs::path p(path);
    return p.is_absolute() ? p.string() : (base / p).lexically_normal().string();
}

/// Everything a run needs besides the bundle.
struct Environment {
    WorkflowConfig config;
    std::string provider = "replay";
    std::string fixtures;
    std::string out = "runs";
    std::unique_ptr<Toolchain> toolchain;
    std::shared_ptr<SandboxRunner> sandbox;
    std::shared_ptr<RecordingSandbox> sandbox_recorder;
    PromptLibrary prompts = PromptLibrary::builtin();
    OpenAiSettings llm;

    std::unique_ptr<LlmProvider> make_provider() const {
        if (provider == "replay") {
            if (fixtures.empty()) throw ConfigError("replay mode needs --fixtures");
            return std::make_unique<ReplayProvider>(fixtures);
        }
        if (provider == "record") {
            if (fixtures.empty()) throw ConfigError("record mode needs --fixtures");
            return std::make_unique<RecordingProvider>(std::make_unique<OpenAiProvider>(llm), fixtures);
        }
        if (provider == "live") return std::make_unique<OpenAiProvider>(llm);
        throw ConfigError("unknown provider mode: " + provider);
    }

    void save_sandbox_recording() const {
        if (sandbox_recorder && !fixtures.empty()) sandbox_recorder->save((fs::path(fixtures) / "sandbox.json").string());
    }
};

void apply_overrides(Environment& env, const CommandOptions& o) {
    if (o.config_path) env.config = config_from_json(Json::parse(read_text_file(*o.config_path)), env.config);
    if (o.provider) env.provider = *o.provider;
    if (o.fixtures) env.fixtures = *o.fixtures;
    if (o.seed) env.config.seed = *o.seed;
    if (o.solver) env.config.solver = *o.solver;
    if (o.timeout_s) env.config.solver_timeout_s = *o.timeout_s;
    if (o.workers) env.config.worker_limit = *o.workers;
    if (o.out) env.out = *o.out;
    env.llm = o.llm;
}

void finish_setup(Environment& env, const CommandOptions& o) {
    validate(env.config);
    if (env.provider == "replay" && !fs::is_directory(env.fixtures)) {
        throw ConfigError("replay mode needs an existing fixture directory: " + env.fixtures);
    }
    env.toolchain = make_toolchain(o.minizinc.value_or(default_minizinc_command()));

    std::string sandbox = o.sandbox.value_or("");
    const std::string canned_default = env.fixtures.empty() ? "" : (fs::path(env.fixtures) / "sandbox.json").string();
    if (sandbox.empty() && env.provider == "replay" && !canned_default.empty() && fs::exists(canned_default)) {
        sandbox = "canned:" + canned_default;
    }
    if (sandbox.empty()) sandbox = "cpsync-sandbox";
    if (sandbox.rfind("canned:", 0) == 0) {
        env.sandbox = std::make_shared<CannedSandbox>(sandbox.substr(7));
    } else {
        env.sandbox = std::make_shared<ProcessSandbox>(split_command(sandbox));
        if (env.provider == "record") {
            env.sandbox_recorder = std::make_shared<RecordingSandbox>(env.sandbox);
            env.sandbox = env.sandbox_recorder;
        }
    }
    if (o.prompts_dir) env.prompts = PromptLibrary::builtin().with_overrides(*o.prompts_dir);
}

struct ProblemRun {
    ProblemBundle bundle;
    WorkflowOutcome outcome;
    Json record;
};

ProblemRun run_problem(const std::string& bundle_path, const Environment& env) {
    ProblemRun run;
    run.bundle = load_bundle(bundle_path);
    LlmGateway gateway(env.make_provider());
    WorkflowServices services{gateway, env.prompts, *env.toolchain, *env.sandbox};
    run.outcome = run_workflow(run.bundle, env.config, services);
    run.record = make_run_record(run.bundle, env.config, run.outcome);
    const fs::path dir = fs::path(env.out) / run.bundle.id;
    write_text_file((dir / "run_record.json").string(), pretty_dump(run.record));
    if (run.outcome.solution) write_text_file((dir / "solution.json").string(), pretty_dump(*run.outcome.solution));
    if (run.outcome.model) write_text_file((dir / "model.mzn").string(), *run.outcome.model);
    return run;
}

int fault(std::ostream& err, const std::exception& e) {
    if (const auto* typed = dynamic_cast<const Error*>(&e)) {
        err << "error: " << typed->kind() << ": " << typed->what() << "\n";
    } else {
        err << "error: " << e.what() << "\n";
    }
    return 1;
}

/// Per-problem section of a benchmark report.
Json score_problem(const std::string& bundle_path, const Environment& env, Evaluator& evaluator,
                   std::vector<FrrTrial>& trials, std::map<std::string, int>& gate_failures) {
    Json entry = {{"bundle", bundle_path}};
    ProblemRun run;
    try {
        run = run_problem(bundle_path, env);
    } catch (const Error& e) {
        entry["id"] = fs::path(bundle_path).filename().string();
        entry["fault"] = e.kind() + ": " + e.what();
        entry["scored"] = true;
        entry["gamma"] = 0;
        entry["candidate_gammas"] = Json::array();
        return entry;
    }
    entry["id"] = run.bundle.id;
    entry["status"] = to_string(run.outcome.status);
    for (const auto& [gate, count] : run.outcome.telemetry.gate_failures) gate_failures[gate] += count;
    if (!run.bundle.eval_assets) {
        entry["scored"] = false;
        entry["flags"] = {"unscored"};
        return entry;
    }
    entry["scored"] = true;

    std::map<std::string, int> cache;
    auto gamma_of = [&](const Json& solution, Json* detail) {
        const std::string key = canonical_dump(solution);
        const auto it = cache.find(key);
        if (it != cache.end() && !detail) return it->second;
        const EvaluationRecord r = evaluator.evaluate(run.bundle, solution);
        if (detail) *detail = to_json(r);
        return cache[key] = r.gamma;
    };
    try {
        if (run.outcome.solution) {
            Json detail;
            entry["gamma"] = gamma_of(*run.outcome.solution, &detail);
            entry["evaluation"] = detail;
        } else {
            entry["gamma"] = 0;
        }
        Json candidate_gammas = Json::array();
        for (const auto& it : run.outcome.iterations) {
            for (const auto& c : it.candidates) {
                if (c.survivor) candidate_gammas.push_back(gamma_of(c.survivor->solution, nullptr));
            }
        }
        entry["candidate_gammas"] = candidate_gammas;
    } catch (const Error& e) {
        entry["fault"] = e.kind() + ": " + e.what();
        entry["gamma"] = 0;
        if (!entry.contains("candidate_gammas")) entry["candidate_gammas"] = Json::array();
    }

    const auto& reference = run.bundle.eval_assets->reference_solution;
    if (reference) {
        CheckingPipeline pipeline(*env.toolchain, *env.sandbox, run.bundle, {});
        Json frr = Json::array();
        for (const auto& it : run.outcome.iterations) {
            for (const auto& checker : it.checkers) {
                try {
                    const CheckerVerdict v = pipeline.run_checker(checker, *reference);
                    const bool error = v.verdict == VerdictKind::Error;
                    trials.push_back({"checker", v.verdict == VerdictKind::Fail, error});
                    frr.push_back({{"iteration", it.index},
                                   {"checker", checker.agent_index},
                                   {"verdict", to_string(v.verdict)},
                                   {"error_counted", error}});
                } catch (const Error& e) {
                    entry["fault"] = e.kind() + ": " + e.what();
                }
            }
        }
        entry["checker_trials"] = frr;
    }
    return entry;
}

int run_batch(const std::string& manifest_path, const std::optional<std::string>& ablation, const CommandOptions& o,
              std::ostream& out, std::ostream& err) {
    Environment env;
    RunManifest manifest;
    try {
        manifest = load_manifest(manifest_path);
        env.config = manifest.config;
        env.provider = manifest.provider;
        env.fixtures = manifest.fixtures;
        env.out = manifest.output_dir;
        apply_overrides(env, o);
        if (ablation) env.config = ablation_config(*ablation, env.config);
        finish_setup(env, o);
    } catch (const std::exception& e) {
        return fault(err, e);
    }

    Evaluator evaluator(*env.toolchain, *env.sandbox,
                        {env.config.solver, static_cast<double>(env.config.solver_timeout_s)});
    std::vector<Json> entries(manifest.problems.size());
    std::vector<std::vector<FrrTrial>> trials(manifest.problems.size());
    std::vector<std::map<std::string, int>> histograms(manifest.problems.size());
    parallel_for(manifest.problems.size(), env.config.worker_limit, [&](std::size_t i) {
        entries[i] = score_problem(manifest.problems[i], env, evaluator, trials[i], histograms[i]);
    });

    std::sort(entries.begin(), entries.end(),
              [](const Json& a, const Json& b) { return a.value("id", "") < b.value("id", ""); });
    std::vector<int> gammas;
    std::vector<std::vector<int>> candidate_gammas;
    std::vector<FrrTrial> all_trials;
    std::map<std::string, int> histogram = {{"G1", 0}, {"G2", 0}, {"G3", 0}, {"G4", 0}};
    for (std::size_t i = 0; i < entries.size(); ++i) {
        all_trials.insert(all_trials.end(), trials[i].begin(), trials[i].end());
        for (const auto& [gate, count] : histograms[i]) histogram[gate] += count;
    }
    for (const auto& e : entries) {
        if (!e.value("scored", false)) continue;
        gammas.push_back(e.value("gamma", 0));
        candidate_gammas.push_back(e.value("candidate_gammas", Json::array()).get<std::vector<int>>());
    }

    Json report = {{"schema_version", kReportSchemaVersion},
                   {"config", to_json(env.config)},
                   {"problems", entries},
                   {"gate_failures", histogram},
                   {"scored_problems", gammas.size()}};
    if (ablation) report["ablation"] = *ablation;
    report["SA"] = gammas.empty() ? Json(nullptr) : Json(compute_sa(gammas));
    report["SA@1"] = candidate_gammas.empty() ? Json(nullptr) : Json(compute_sa_at_1(candidate_gammas));
    if (all_trials.empty()) {
        report["FRR"] = nullptr;
    } else {
        Json frr = Json::object();
        for (const auto& [kind, value] : compute_frr(all_trials)) frr[kind] = value;
        report["FRR"] = frr;
        report["FRR_flags"] = {"error_counted"};
    }

    const std::string name = ablation ? "ablation_" + *ablation + ".json" : "report.json";
    const std::string path = (fs::path(env.out) / name).string();
    write_text_file(path, pretty_dump(report));
    env.save_sandbox_recording();
    out << "report: " << path << "\n";
    if (!gammas.empty()) out << "SA: " << report["SA"].dump() << "\n";
    return 0;
}

}  // namespace

std::string default_minizinc_command() {
    const char* env = std::getenv("CPSYNC_MINIZINC");
    return env && *env ? env : "minizinc";
}

RunManifest load_manifest(const std::string& path) {
    Json json;
    try {
        json = Json::parse(read_text_file(path));
    } catch (const Json::exception& e) {
        throw ConfigError("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!json.is_object()) throw ConfigError("manifest must be a JSON object");
    const fs::path base = fs::path(path).parent_path();
    RunManifest m;
    if (json.contains("config")) m.config = config_from_json(json["config"]);
    if (!json.contains("problems") || !json["problems"].is_array() || json["problems"].empty()) {
        throw ConfigError("manifest lists no problems");
    }
    for (const auto& p : json["problems"]) m.problems.push_back(resolve(base, p.get<std::string>()));
    m.provider = json.value("provider", m.provider);
    m.fixtures = resolve(base, json.value("fixtures", ""));
    m.output_dir = resolve(base, json.value("output_dir", m.output_dir));
    if (m.provider == "replay" && !fs::is_directory(m.fixtures)) {
        throw ConfigError("replay mode needs an existing fixture directory: " + m.fixtures);
    }
    return m;
}

int cmd_solve(const std::string& bundle_path, const CommandOptions& o, std::ostream& out, std::ostream& err) {
    try {
        Environment env;
        apply_overrides(env, o);
        finish_setup(env, o);
        const ProblemRun run = run_problem(bundle_path, env);
        env.save_sandbox_recording();
        const fs::path dir = fs::path(env.out) / run.bundle.id;
        out << "status: " << to_string(run.outcome.status) << "\n";
        out << "run record: " << (dir / "run_record.json").string() << "\n";
        if (run.outcome.solution) out << "solution: " << (dir / "solution.json").string() << "\n";
        return run.outcome.status == OutcomeStatus::Exhausted ? 2 : 0;
    } catch (const std::exception& e) {
        return fault(err, e);
    }
}

int cmd_bench(const std::string& manifest_path, const CommandOptions& options, std::ostream& out, std::ostream& err) {
    return run_batch(manifest_path, std::nullopt, options, out, err);
}

int cmd_ablate(const std::string& manifest_path, const std::string& config_id, const CommandOptions& options,
               std::ostream& out, std::ostream& err) {
    return run_batch(manifest_path, config_id, options, out, err);
}

}  // namespace cpsync
