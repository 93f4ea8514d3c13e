#include "cpsync/evaluator.hpp"

#include "cpsync/dzn.hpp"
#include "cpsync/errors.hpp"

namespace cpsync {
namespace {

int depth_of(const Json& value) {
    int depth = 0;
    const Json* v = &value;
    while (v->is_array() && !v->empty()) {
        ++depth;
        v = &(*v)[0];
    }
    return v->is_array() ? depth + 1 : depth;
}

void flatten(const Json& value, std::vector<Json>& out) {
    if (!value.is_array()) {
        out.push_back(value);
        return;
    }
    for (const auto& v : value) flatten(v, out);
}

std::string render_scalar(const Json& v) {
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) return v.get<std::string>();
    return dzn::render_literal(v);
}

std::string render_flat(const std::vector<Json>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += render_scalar(items[i]);
    }
    return out + "]";
}

}  // namespace

Json to_json(const EvaluationRecord& r) {
    return {{"problem", r.problem_id},
            {"feasible", r.feasible},
            {"optimal", r.optimal ? Json(*r.optimal) : Json(nullptr)},
            {"gamma", r.gamma},
            {"objective", r.objective ? *r.objective : Json(nullptr)},
            {"flags", r.flags},
            {"reason", r.reason}};
}

int score_gamma(ProblemKind kind, bool feasible, const std::optional<bool>& optimal) {
    if (!feasible) return 0;
    if (kind == ProblemKind::CSP) return 1;
    return optimal.value_or(false) ? 1 : 0;
}

double compute_sa(const std::vector<int>& gammas) {
    if (gammas.empty()) throw EmptyBenchmark("no problems to score");
    long long sum = 0;
    for (int g : gammas) sum += g;
    return static_cast<double>(sum) / static_cast<double>(gammas.size());
}

double compute_sa_at_1(const std::vector<std::vector<int>>& candidate_gammas) {
    if (candidate_gammas.empty()) throw EmptyBenchmark("no problems to score");
    long long hits = 0;
    for (const auto& problem : candidate_gammas) {
        for (int g : problem) {
            if (g == 1) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(candidate_gammas.size());
}

std::map<std::string, double> compute_frr(const std::vector<FrrTrial>& trials) {
    if (trials.empty()) throw NoTrials("no false-rejection trials");
    std::map<std::string, std::pair<long long, long long>> tally;
    for (const auto& t : trials) {
        auto& [rejected, total] = tally[t.kind];
        ++total;
        if (t.rejected_ground_truth || t.error_counted) ++rejected;
    }
    std::map<std::string, double> out;
    for (const auto& [kind, counts] : tally) {
        out[kind] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    return out;
}

std::string equality_constraint(const std::string& name, const Json& value, const Json& interface) {
    const Json declared = interface.is_object() && interface.contains(name) ? interface[name] : Json::object();
    if (declared.value("set", false) && value.is_array()) {
        std::string out = "{";
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (i) out += ", ";
            out += render_scalar(value[i]);
        }
        return "constraint " + name + " = " + out + "};";
    }
    const int dims = declared.contains("dim") ? declared["dim"].get<int>() : depth_of(value);
    if (dims == 0) return "constraint " + name + " = " + render_scalar(value) + ";";
    std::vector<Json> items;
    flatten(value, items);
    if (dims == 1) return "constraint " + name + " = array1d(index_set(" + name + "), " + render_flat(items) + ");";
    std::string call = "array" + std::to_string(dims) + "d(";
    for (int d = 1; d <= dims; ++d) {
        call += "index_set_" + std::to_string(d) + "of" + std::to_string(dims) + "(" + name + "), ";
    }
    return "constraint " + name + " = " + call + render_flat(items) + ");";
}

Evaluator::Evaluator(Toolchain& toolchain, SandboxRunner& sandbox, SolveOptions options)
    : toolchain_(toolchain), sandbox_(sandbox), options_(std::move(options)) {}

Json Evaluator::map_solution(const EvalAssets& assets, const InputData& input, const Json& solution) {
    Json mapped = solution;
    if (!assets.mapping_program.empty()) {
        const ExecResponse response =
            sandbox_.execute({assets.mapping_program, "transformer", input.builtin_params, solution});
        if (response.status != ExecStatus::Ok) throw MappingFault(response.message);
        mapped = *response.result;
    }
    if (!mapped.is_object()) throw MappingFault("mapping did not produce a key-value map");
    Json restricted = Json::object();
    for (const auto& name : assets.mapped_vars) {
        if (!mapped.contains(name)) throw MappingFault("mapping result lacks reference variable " + name);
        restricted[name] = mapped[name];
    }
    return restricted;
}

void Evaluator::require_reference_compiles(const std::string& model) {
    {
        std::lock_guard lock(mutex_);
        const auto it = compiled_.find(model);
        if (it != compiled_.end()) {
            if (!it->second) throw ReferenceModelBroken("reference model does not compile");
            return;
        }
    }
    const CompileOutcome outcome = toolchain_.compile_check(model);
    std::lock_guard lock(mutex_);
    compiled_[model] = outcome.ok;
    if (!outcome.ok) throw ReferenceModelBroken("reference model does not compile: " + outcome.message);
}

Json Evaluator::interface_of(const std::string& model, const std::string& dzn_text) {
    const std::string key = model + '\0' + dzn_text;
    {
        std::lock_guard lock(mutex_);
        const auto it = interfaces_.find(key);
        if (it != interfaces_.end()) return it->second;
    }
    Json interface = toolchain_.output_interface(model, dzn_text);
    std::lock_guard lock(mutex_);
    interfaces_[key] = interface;
    return interface;
}

SolveOutcome Evaluator::solve_fixed(const EvalAssets& assets, const InputData& input, const Json& mapped) {
    require_reference_compiles(assets.reference_model);
    const std::string base = mzn::strip_output_items(assets.reference_model);
    const Json interface = interface_of(base, input.dzn_text);
    std::string augmented = base + "\n";
    for (const auto& [name, value] : mapped.items()) augmented += equality_constraint(name, value, interface) + "\n";
    return toolchain_.solve(augmented, input.dzn_text, options_);
}

bool Evaluator::check_feasible(const EvalAssets& assets, const InputData& input, const Json& mapped) {
    return solve_fixed(assets, input, mapped).has_solution();
}

std::optional<bool> Evaluator::check_optimal(const EvalAssets& assets, const InputData& input, const Json& z) {
    require_reference_compiles(assets.reference_model);
    const std::string base = mzn::strip_output_items(assets.reference_model);
    const auto item = mzn::find_solve_item(base);
    if (!item || item->kind == mzn::SolveItem::Kind::Satisfy) {
        throw ReferenceModelBroken("reference model of an optimization problem has no objective");
    }
    const bool minimize = assets.objective_sense ? *assets.objective_sense == ObjectiveSense::Minimize
                                                 : item->kind == mzn::SolveItem::Kind::Minimize;
    const char* op = minimize ? " < " : " > ";
    const std::string model = mzn::replace_solve_item(base, "solve satisfy;") + "\nconstraint (" + item->objective +
                              ")" + op + render_scalar(z) + ";\n";
    const SolveOutcome outcome = toolchain_.solve(model, input.dzn_text, options_);
    if (outcome.status == SolveStatus::Unsatisfiable) return true;
    if (outcome.has_solution()) return false;
    return std::nullopt;
}

EvaluationRecord Evaluator::evaluate(const ProblemBundle& bundle, const Json& solution) {
    EvaluationRecord record;
    record.problem_id = bundle.id;
    if (!bundle.eval_assets) {
        record.flags.push_back("unscored");
        record.reason = "no evaluation assets";
        return record;
    }
    const EvalAssets& assets = *bundle.eval_assets;
    Json mapped;
    try {
        mapped = map_solution(assets, bundle.input_data, solution);
    } catch (const MappingFault& e) {
        record.flags.push_back("mapping fault");
        record.reason = e.what();
        return record;
    }

    const SolveOutcome fixed = solve_fixed(assets, bundle.input_data, mapped);
    record.feasible = fixed.has_solution();
    if (!record.feasible) {
        if (fixed.status == SolveStatus::Timeout || fixed.status == SolveStatus::Unknown) {
            record.flags.push_back("feasibility undetermined");
        } else if (fixed.status == SolveStatus::Error) {
            record.flags.push_back("equality injection rejected");
            record.reason = fixed.message;
        }
        return record;
    }
    if (assets.problem_kind == ProblemKind::COP) {
        if (!fixed.objective) {
            record.flags.push_back("objective missing");
            record.reason = "reference model reported no objective value";
            return record;
        }
        record.objective = fixed.objective;
        record.optimal = check_optimal(assets, bundle.input_data, *fixed.objective);
        if (!record.optimal) record.flags.push_back("optimality undetermined");
    }
    record.gamma = score_gamma(assets.problem_kind, record.feasible, record.optimal);
    return record;
}

}  // namespace cpsync
