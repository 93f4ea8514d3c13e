#include "cpsync/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

#include "cpsync/errors.hpp"

namespace cpsync {

std::string to_string(SelectionMode mode) {
    switch (mode) {
        case SelectionMode::Votes: return "votes";
        case SelectionMode::SolutionMajority: return "solution_majority";
        case SelectionMode::MostCheckers: return "most_checkers";
        case SelectionMode::FirstSurvivor: return "first_survivor";
    }
    return "votes";
}

SelectionMode selection_mode_from_string(const std::string& text) {
    for (auto mode : {SelectionMode::Votes, SelectionMode::SolutionMajority, SelectionMode::MostCheckers,
                      SelectionMode::FirstSurvivor}) {
        if (to_string(mode) == text) return mode;
    }
    throw ConfigError("unknown selection mode: " + text);
}

std::string to_string(OutcomeStatus status) {
    switch (status) {
        case OutcomeStatus::Selected: return "selected";
        case OutcomeStatus::Fallback: return "fallback";
        case OutcomeStatus::Exhausted: return "exhausted";
    }
    return "exhausted";
}

void validate(const WorkflowConfig& c) {
    if (c.K < 1) throw ConfigError("K must be at least 1");
    if (c.r < 0) throw ConfigError("r must be nonnegative");
    if (c.R < 0) throw ConfigError("R must be nonnegative");
    if (c.tau < 0 || c.tau > 2) throw ConfigError("tau must lie in [0, 2]");
    if (c.strategy == SamplingStrategy::Temperature && c.tau <= 0) {
        throw ConfigError("temperature sampling needs tau > 0");
    }
    if (c.solver.empty()) throw ConfigError("solver id is empty");
    if (c.solver_timeout_s < 1) throw ConfigError("solver timeout must be at least 1 s");
    if (c.worker_limit < 1) throw ConfigError("worker limit must be at least 1");
    if (c.selection_mode == SelectionMode::MostCheckers && !c.validation_enabled) {
        throw ConfigError("most_checkers selection needs validation agents");
    }
}

Json to_json(const WorkflowConfig& c) {
    return {{"K", c.K},
            {"r", c.r},
            {"R", c.R},
            {"strategy", to_string(c.strategy)},
            {"tau", c.tau},
            {"solver", c.solver},
            {"solver_timeout_s", c.solver_timeout_s},
            {"seed", c.seed},
            {"worker_limit", c.worker_limit},
            {"validation_enabled", c.validation_enabled},
            {"selection_mode", to_string(c.selection_mode)}};
}

WorkflowConfig config_from_json(const Json& json, WorkflowConfig c) {
    if (!json.is_object()) throw ConfigError("workflow config must be a JSON object");
    try {
        for (const auto& [key, value] : json.items()) {
            if (key == "K") {
                c.K = value.get<int>();
            } else if (key == "r") {
                c.r = value.get<int>();
            } else if (key == "R") {
                c.R = value.get<int>();
            } else if (key == "strategy") {
                const auto s = value.get<std::string>();
                if (s == "prompt_diverse") {
                    c.strategy = SamplingStrategy::PromptDiverse;
                } else if (s == "temperature") {
                    c.strategy = SamplingStrategy::Temperature;
                } else {
                    throw ConfigError("unknown strategy: " + s);
                }
            } else if (key == "tau") {
                c.tau = value.get<double>();
            } else if (key == "solver") {
                c.solver = value.get<std::string>();
            } else if (key == "solver_timeout_s") {
                c.solver_timeout_s = value.get<int>();
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else if (key == "worker_limit") {
                c.worker_limit = value.get<int>();
            } else if (key == "validation_enabled") {
                c.validation_enabled = value.get<bool>();
            } else if (key == "selection_mode") {
                c.selection_mode = selection_mode_from_string(value.get<std::string>());
            } else {
                throw ConfigError("unknown config key: " + key);
            }
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return c;
}

WorkflowConfig ablation_config(const std::string& id, WorkflowConfig c) {
    if (id == "1a" || id == "1b") {
        c.K = 1;
        c.r = id == "1a" ? 0 : 4;
        c.R = 0;
        c.validation_enabled = false;
        c.selection_mode = SelectionMode::FirstSurvivor;
    } else if (id == "1") {
        c.validation_enabled = false;
        c.selection_mode = SelectionMode::SolutionMajority;
    } else if (id == "2") {
        c.validation_enabled = true;
        c.selection_mode = SelectionMode::MostCheckers;
    } else if (id == "3") {
        c.validation_enabled = false;
        c.selection_mode = SelectionMode::Votes;
    } else if (id == "4") {
        c.validation_enabled = true;
        c.selection_mode = SelectionMode::Votes;
    } else {
        throw ConfigError("unknown ablation config: " + id + " (expected 1a, 1b, 1, 2, 3 or 4)");
    }
    return c;
}

VoteDecision aggregate_votes(const std::vector<SelectionVote>& votes, int agent_count) {
    std::map<int, int> tally;
    for (const auto& v : votes) ++tally[v.selection];
    for (const auto& [index, count] : tally) {
        if (2 * count > agent_count) {
            if (index == -1) return {};
            return {true, index};
        }
    }
    return {};
}

bool check_budget_identity(long long r, long long R, long long total) { return r + (1 + r) * R <= total; }

long long max_restarts(long long r, long long total) {
    if (r > total) return -1;
    return (total - r) / (1 + r);
}

std::size_t uniform_pick(std::uint64_t seed, std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_pick over an empty range");
    std::mt19937_64 rng(seed);
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return static_cast<std::size_t>(x % bound);
}

bool within_call_bounds(const IterationRecord& it, const WorkflowConfig& c) {
    return it.calls.modeling <= c.K * (c.r + 2) && it.calls.validation <= 2 * c.K && it.calls.selection <= 2 * c.K;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

namespace {

void update_checker_health(std::vector<CheckerProgram>& checkers, const std::vector<CandidateRecord>& candidates) {
    for (auto& checker : checkers) {
        if (checker.health == CheckerHealth::Defective) continue;
        int runs = 0;
        int errors = 0;
        for (const auto& c : candidates) {
            for (const auto& g : c.model.gate_history) {
                if (g.gate != Gate::G4 || !g.artifacts) continue;
                for (const auto& v : *g.artifacts) {
                    if (v.value("checker", 0) != checker.agent_index) continue;
                    ++runs;
                    if (v.value("verdict", "") == "error") ++errors;
                }
            }
        }
        if (runs == 0) continue;
        if (errors == runs) {
            checker.health = CheckerHealth::Defective;
            checker.defect = "raised an execution error on every solution";
        } else {
            checker.health = CheckerHealth::Ok;
        }
    }
}

int checker_passes(const SurvivorSnapshot& s) {
    return static_cast<int>(std::count_if(s.verdicts.begin(), s.verdicts.end(),
                                          [](const CheckerVerdict& v) { return v.verdict == VerdictKind::Pass; }));
}

/// Returns the agent index of the chosen survivor, or -1.
int select_without_votes(SelectionMode mode, const std::vector<const CandidateRecord*>& survivors) {
    if (survivors.empty()) return -1;
    if (mode == SelectionMode::FirstSurvivor) return survivors.front()->model.agent_index;
    if (mode == SelectionMode::MostCheckers) {
        const CandidateRecord* best = survivors.front();
        for (const auto* s : survivors) {
            if (checker_passes(*s->survivor) > checker_passes(*best->survivor)) best = s;
        }
        return best->model.agent_index;
    }
    std::vector<std::pair<std::string, int>> groups;
    std::map<std::string, int> counts;
    for (const auto* s : survivors) {
        const std::string key = canonical_dump(s->survivor->solution);
        if (counts[key]++ == 0) groups.emplace_back(key, s->model.agent_index);
    }
    int best = groups.front().second;
    int best_count = counts[groups.front().first];
    for (const auto& [key, first] : groups) {
        if (counts[key] > best_count) {
            best = first;
            best_count = counts[key];
        }
    }
    return best;
}

class Workflow {
  public:
    Workflow(const ProblemBundle& bundle, const WorkflowConfig& config, const WorkflowServices& services)
        : bundle_(bundle),
          config_(config),
          services_(services),
          agents_(services.gateway, services.prompts, counters_),
          pipeline_(services.toolchain, services.sandbox, bundle,
                    {config.r, config.solver, static_cast<double>(config.solver_timeout_s), config.validation_enabled}) {}

    WorkflowOutcome run() {
        validate(config_);
        WorkflowOutcome outcome;
        std::string description = bundle_.description_nl;
        bool description_fallback = false;
        for (int iteration = 0; iteration <= config_.R; ++iteration) {
            if (iteration > 0) {
                try {
                    description = agents_.refine_description(bundle_, bundle_.description_nl,
                                                             "variants/restart" + std::to_string(iteration))
                                      .text;
                    description_fallback = false;
                } catch (const ParseError&) {
                    description = bundle_.description_nl;
                    description_fallback = true;
                }
            }
            IterationRecord record = run_iteration(iteration, description);
            record.description_fallback = description_fallback;
            outcome.iterations.push_back(std::move(record));
            outcome.iterations_used = iteration + 1;
            const IterationRecord& done = outcome.iterations.back();
            spdlog::info("{}: iteration {} -> {}", bundle_.id, iteration, done.decision);
            if (done.selected >= 0) {
                const auto& chosen = find(done, done.selected);
                outcome.status = OutcomeStatus::Selected;
                outcome.model = chosen.survivor->source;
                outcome.solution = chosen.survivor->solution;
                outcome.chosen = std::make_pair(iteration, done.selected);
                break;
            }
        }

        if (outcome.status != OutcomeStatus::Selected) {
            std::vector<std::pair<int, const CandidateRecord*>> pool;
            for (const auto& it : outcome.iterations) {
                for (const auto& c : it.candidates) {
                    if (c.survivor) pool.emplace_back(it.index, &c);
                }
            }
            if (!pool.empty()) {
                const auto& [iteration, chosen] = pool[uniform_pick(config_.seed, pool.size())];
                outcome.status = OutcomeStatus::Fallback;
                outcome.model = chosen->survivor->source;
                outcome.solution = chosen->survivor->solution;
                outcome.chosen = std::make_pair(iteration, chosen->model.agent_index);
            }
        }

        for (const auto& it : outcome.iterations) {
            for (const auto& c : it.candidates) {
                for (const auto& g : c.model.gate_history) {
                    if (!g.passed()) ++outcome.telemetry.gate_failures[to_string(g.gate)];
                }
            }
        }
        outcome.telemetry.calls = snapshot(counters_);
        return outcome;
    }

  private:
    static const CandidateRecord& find(const IterationRecord& it, int agent_index) {
        for (const auto& c : it.candidates) {
            if (c.model.agent_index == agent_index) return c;
        }
        throw std::logic_error("selected candidate not in iteration");
    }

    IterationRecord run_iteration(int index, const std::string& description) {
        IterationRecord it;
        it.index = index;
        it.description = description;
        const CallCounts before = snapshot(counters_);
        const auto K = static_cast<std::size_t>(config_.K);
        const int workers = config_.worker_limit;

        // Step 1: one description variant per agent slot, shared by the roles.
        it.variants = agents_.make_variants(bundle_, description, config_.strategy, config_.K, config_.tau);

        // Steps 2 and 3.
        it.candidates.resize(K);
        parallel_for(K, workers, [&](std::size_t k) {
            it.candidates[k].model = agents_.generate_model(it.variants[k], bundle_, static_cast<int>(k) + 1, config_.r);
        });
        if (config_.validation_enabled) {
            it.checkers.resize(K);
            parallel_for(K, workers, [&](std::size_t k) {
                it.checkers[k] = agents_.synthesize_checker(it.variants[k], bundle_, static_cast<int>(k) + 1);
            });
        }

        // Step 4.
        parallel_for(K, workers, [&](std::size_t k) {
            auto& c = it.candidates[k];
            if (c.model.alive) c.survivor = pipeline_.run_cascade(c.model, it.checkers, agents_).survivor;
        });
        update_checker_health(it.checkers, it.candidates);

        std::vector<const CandidateRecord*> survivors;
        for (const auto& c : it.candidates) {
            if (c.survivor) survivors.push_back(&c);
        }
        if (survivors.empty()) {
            it.decision = "abort: no survivors";
            it.calls = snapshot(counters_) - before;
            return it;
        }

        // Step 5.
        if (config_.selection_mode == SelectionMode::Votes) {
            EvidencePack evidence;
            evidence.checkers = it.checkers;
            for (const auto* s : survivors) {
                const int checker_count = static_cast<int>(it.checkers.size());
                evidence.candidates.push_back({s->model.agent_index, s->survivor->source, s->survivor->solution,
                                               g4_status_line(s->model.agent_index, s->survivor->g4, checker_count)});
            }
            it.votes.resize(K);
            parallel_for(K, workers, [&](std::size_t k) {
                it.votes[k] = agents_.cast_vote(it.variants[k], evidence, static_cast<int>(k) + 1);
            });
            const VoteDecision decision = aggregate_votes(it.votes, config_.K);
            it.selected = decision.selected ? decision.index : -1;
        } else {
            it.selected = select_without_votes(config_.selection_mode, survivors);
        }
        it.decision = it.selected >= 0 ? "selected" : "abort: no majority";
        it.calls = snapshot(counters_) - before;
        return it;
    }

    const ProblemBundle& bundle_;
    WorkflowConfig config_;
    const WorkflowServices& services_;
    CallCounters counters_;
    Agents agents_;
    CheckingPipeline pipeline_;
};

}  // namespace

WorkflowOutcome run_workflow(const ProblemBundle& bundle, const WorkflowConfig& config,
                             const WorkflowServices& services) {
    Workflow workflow(bundle, config, services);
    return workflow.run();
}

}  // namespace cpsync
