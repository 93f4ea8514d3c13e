#include "cpsync/agents.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cpsync/errors.hpp"
#include "cpsync/response_parsing.hpp"

namespace cpsync {
namespace {

constexpr const char* kReaskCode =
    "Your reply did not contain a code block. Please provide the complete code in a single markdown code block.";
constexpr const char* kReaskJson =
    "Your reply could not be parsed. Return your answer only as JSON in the requested format.";
constexpr const char* kReaskTasks =
    "Your reply did not contain any sub-tasks. Wrap each sub-task description in tags of the form "
    "<task{id}> ... </task{id}>.";

std::string reask_function(const std::string& name, const std::string& second_arg) {
    return "The code must define a Python function `" + name + "(data_dict, " + second_arg +
           ")`. Please provide only that function in a single markdown code block.";
}

std::string tag_for(const std::string& role, VariantKind kind, int agent_index) {
    return role + "/" + to_string(kind) + "/agent" + std::to_string(agent_index);
}

std::string first_line(const std::string& text) {
    const auto end = text.find('\n');
    return end == std::string::npos ? text : text.substr(0, end);
}

bool has_budget(const CandidateModel& candidate, int refinement_budget) {
    return candidate.llm_calls < Agents::call_budget(refinement_budget);
}

std::optional<std::string> function_block(const std::string& response, const std::string& name) {
    auto code = parsing::first_code_block(response);
    if (code && parsing::defines_function(*code, name, 2)) return code;
    return std::nullopt;
}

std::optional<int> selection_value(const Json& envelope) {
    if (!envelope.contains("selection")) return std::nullopt;
    const Json& s = envelope["selection"];
    if (s.is_number_integer()) return s.get<int>();
    if (s.is_number_float() && s.get<double>() == static_cast<int>(s.get<double>())) {
        return static_cast<int>(s.get<double>());
    }
    if (s.is_string()) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s.get<std::string>(), &used);
            if (used == s.get<std::string>().size()) return v;
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

}  // namespace

std::string to_string(SamplingStrategy strategy) {
    return strategy == SamplingStrategy::PromptDiverse ? "prompt_diverse" : "temperature";
}

CallCounts snapshot(const CallCounters& counters) {
    return {counters.modeling.load(), counters.validation.load(), counters.selection.load(),
            counters.variants.load()};
}

Json to_json(const CallCounts& counts) {
    return {{"modeling", counts.modeling},
            {"validation", counts.validation},
            {"selection", counts.selection},
            {"variants", counts.variants}};
}

Agents::Agents(LlmGateway& gateway, const PromptLibrary& prompts, CallCounters& counters)
    : gateway_(gateway), prompts_(prompts), counters_(counters) {}

void Agents::count(Role role) {
    switch (role) {
        case Role::Modeling: ++counters_.modeling; break;
        case Role::Validation: ++counters_.validation; break;
        case Role::Selection: ++counters_.selection; break;
        case Role::Variants: ++counters_.variants; break;
    }
}

ChatResponse Agents::send(Conversation& chat, Role role) {
    ChatRequest request{chat.system_prompt, chat.messages, chat.temperature, std::nullopt, chat.tag};
    count(role);
    ChatResponse response = gateway_.complete(request);
    chat.messages.push_back({ChatRole::Assistant, response.content});
    return response;
}

std::vector<SampledVariant> Agents::make_variants(const ProblemBundle& bundle, const std::string& description,
                                                  SamplingStrategy strategy, int count, double temperature) {
    if (count < 1) throw ConfigError("variant count must be at least 1");
    std::vector<SampledVariant> out;
    const DescriptionVariant original{VariantKind::Original, description, false};
    for (int k = 0; k < count; ++k) {
        if (strategy == SamplingStrategy::Temperature) {
            out.push_back({original, temperature});
            continue;
        }
        const int slot = k % 3;
        if (slot == 0) {
            out.push_back({original, 0.0});
            continue;
        }
        try {
            out.push_back({slot == 1 ? refine_description(bundle, description) : synthesize_plan(bundle, description),
                           0.0});
        } catch (const ParseError&) {
            DescriptionVariant fallback = original;
            fallback.fallback = true;
            out.push_back({fallback, 0.0});
        }
    }
    return out;
}

DescriptionVariant Agents::refine_description(const ProblemBundle& bundle, const std::string& description,
                                              const std::string& tag) {
    Conversation chat;
    chat.system_prompt = prompts_.render("refine_description", {{slot::kProblemDescription, description},
                                                                {slot::kInputSpec, bundle.input_spec}});
    chat.messages.push_back({ChatRole::User, "Analyze the problem context above and return your answer as JSON."});
    chat.tag = tag;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1) chat.messages.push_back({ChatRole::User, kReaskJson});
        const ChatResponse response = send(chat, Role::Variants);
        const auto envelope = parsing::first_json_object(response.content);
        if (envelope && envelope->contains("refined_description") && (*envelope)["refined_description"].is_string()) {
            const std::string text = (*envelope)["refined_description"].get<std::string>();
            if (!text.empty()) return {VariantKind::Refined, text, false};
        }
    }
    throw ParseError("refined_description missing from response after one re-ask");
}

DescriptionVariant Agents::synthesize_plan(const ProblemBundle& bundle, const std::string& description,
                                           const std::string& tag) {
    Conversation chat;
    chat.system_prompt = prompts_.render("plan_synthesis", {{slot::kProblemDescription, description},
                                                            {slot::kInputSpec, bundle.input_spec},
                                                            {slot::kOutputSpec, describe_output_spec(bundle.output_spec)}});
    chat.messages.push_back({ChatRole::User, "Generate the step-by-step modeling strategy for the problem above."});
    chat.tag = tag;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1) chat.messages.push_back({ChatRole::User, kReaskTasks});
        const ChatResponse response = send(chat, Role::Variants);
        const auto tasks = parsing::tagged_tasks(response.content);
        if (!tasks.empty()) {
            std::string text = description;
            text += "\n\nModeling plan:\n";
            for (const auto& [id, body] : tasks) {
                text += "<task" + std::to_string(id) + ">" + body + "</task" + std::to_string(id) + ">\n";
            }
            return {VariantKind::PlanningAugmented, text, false};
        }
    }
    throw ParseError("no <task> tags in response after one re-ask");
}

CandidateModel Agents::generate_model(const SampledVariant& variant, const ProblemBundle& bundle, int agent_index,
                                      int refinement_budget) {
    CandidateModel candidate;
    candidate.agent_index = agent_index;
    candidate.chat.system_prompt =
        prompts_.render("modeling_system", {{slot::kProblemDescription, variant.variant.text},
                                            {slot::kInputSpec, bundle.input_spec},
                                            {slot::kOutputSpec, describe_output_spec(bundle.output_spec)}});
    candidate.chat.messages.push_back(
        {ChatRole::User, "Write the MiniZinc model for the problem context above in a markdown code block."});
    candidate.chat.temperature = variant.temperature;
    candidate.chat.tag = tag_for("modeling", variant.variant.kind, agent_index);

    std::optional<std::string> code;
    for (int attempt = 0; attempt < 2 && !code && has_budget(candidate, refinement_budget); ++attempt) {
        if (attempt == 1) candidate.chat.messages.push_back({ChatRole::User, kReaskCode});
        ++candidate.llm_calls;
        code = parsing::first_code_block(send(candidate.chat, Role::Modeling).content);
    }
    if (!code) {
        candidate.alive = false;
        candidate.death_reason = "NoCodeBlock";
        return candidate;
    }
    candidate.source = *code;
    candidate.source_history.push_back(*code);
    return candidate;
}

CheckerProgram Agents::synthesize_checker(const SampledVariant& variant, const ProblemBundle& bundle,
                                          int agent_index) {
    Conversation chat;
    chat.system_prompt =
        prompts_.render("validation_system", {{slot::kProblemDescription, variant.variant.text},
                                              {slot::kInputSpec, bundle.input_spec},
                                              {slot::kOutputVariables, describe_output_spec(bundle.output_spec)}});
    chat.messages.push_back({ChatRole::User, "Write the semantic_checker function for the problem context above."});
    chat.temperature = variant.temperature;
    chat.tag = tag_for("validation", variant.variant.kind, agent_index);

    CheckerProgram checker;
    checker.agent_index = agent_index;
    std::string last_response;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1) {
            chat.messages.push_back({ChatRole::User, parsing::first_code_block(last_response)
                                                         ? reask_function("semantic_checker", "decision_var_dict")
                                                         : std::string(kReaskCode)});
        }
        last_response = send(chat, Role::Validation).content;
        if (auto code = function_block(last_response, "semantic_checker")) {
            checker.source = *code;
            return checker;
        }
    }
    checker.health = CheckerHealth::Defective;
    const auto code = parsing::first_code_block(last_response);
    checker.defect = code ? "missing semantic_checker(data_dict, output_dict) definition" : "NoCodeBlock";
    if (code) checker.source = *code;
    return checker;
}

bool Agents::generate_formatter(CandidateModel& candidate, const ProblemBundle& bundle, const Json& assignment,
                                int refinement_budget) {
    if (!candidate.alive) throw std::logic_error("formatter requested for a dead candidate");
    FormatterProgram formatter;
    formatter.chat.system_prompt =
        prompts_.render("formatting_system", {{slot::kDvarInfo, canonical_dump(assignment)},
                                              {slot::kOutputSpec, describe_output_spec(bundle.output_spec)}});
    std::string keys;
    for (const auto& [name, value] : bundle.input_data.builtin_params.items()) {
        keys += keys.empty() ? name : ", " + name;
    }
    formatter.chat.messages.push_back(
        {ChatRole::User, "The MiniZinc model:\n```MiniZinc\n" + candidate.source +
                             "```\nParameters available in data_dict: " + keys +
                             "\nWrite the transformer function in a markdown code block."});
    formatter.chat.temperature = candidate.chat.temperature;
    formatter.chat.tag = "modeling/formatter/agent" + std::to_string(candidate.agent_index);

    std::string last_response;
    for (int attempt = 0; attempt < 2 && has_budget(candidate, refinement_budget); ++attempt) {
        if (attempt == 1) {
            formatter.chat.messages.push_back({ChatRole::User, parsing::first_code_block(last_response)
                                                                   ? reask_function("transformer", "decision_var_dict")
                                                                   : std::string(kReaskCode)});
        }
        ++candidate.llm_calls;
        last_response = send(formatter.chat, Role::Modeling).content;
        if (auto code = function_block(last_response, "transformer")) {
            formatter.source = *code;
            candidate.formatter_history.push_back(*code);
            candidate.formatter = std::move(formatter);
            return true;
        }
    }
    candidate.alive = false;
    candidate.death_reason = has_budget(candidate, refinement_budget) ? "NoFormatter" : "CallBudgetExhausted";
    return false;
}

RepairResult Agents::repair_for_gate(CandidateModel& candidate, const GateResult& failure, int refinement_budget) {
    if (!candidate.alive) throw std::logic_error("repair requested for a dead candidate");
    if (failure.gate == Gate::G4 || failure.passed()) throw std::logic_error("repair_for_gate needs a G1-G3 failure");
    auto die = [&](const std::string& why) {
        candidate.alive = false;
        candidate.death_reason = why;
        return RepairResult{false, why};
    };
    if (candidate.revision >= refinement_budget) return die("BudgetExhausted");
    if (!has_budget(candidate, refinement_budget)) return die("CallBudgetExhausted");

    const bool formatter_repair = failure.gate == Gate::G3;
    if (formatter_repair && !candidate.formatter) throw std::logic_error("G3 repair without a formatter");
    Conversation& chat = formatter_repair ? candidate.formatter->chat : candidate.chat;

    std::string message;
    if (formatter_repair) {
        message = prompts_.render("repair_output_format", {{slot::kErrorMessage, failure.feedback}});
    } else if (failure.gate == Gate::G2 && failure.failure_kind != "ERROR") {
        message = prompts_.render("repair_solver_status", {{slot::kCurrentModel, candidate.source}});
    } else {
        message = prompts_.render("repair_runtime_error", {{slot::kErrorMessage, failure.feedback}});
    }
    chat.messages.push_back({ChatRole::User, message});

    std::optional<std::string> code;
    std::string last_response;
    for (int attempt = 0; attempt < 2 && !code && has_budget(candidate, refinement_budget); ++attempt) {
        if (attempt == 1) {
            chat.messages.push_back({ChatRole::User, formatter_repair && parsing::first_code_block(last_response)
                                                         ? reask_function("transformer", "decision_var_dict")
                                                         : std::string(kReaskCode)});
        }
        ++candidate.llm_calls;
        last_response = send(chat, Role::Modeling).content;
        code = formatter_repair ? function_block(last_response, "transformer") : parsing::first_code_block(last_response);
    }
    if (!code) return die("NoCodeBlock");

    if (formatter_repair) {
        candidate.formatter->source = *code;
        candidate.formatter_history.push_back(*code);
    } else {
        candidate.source = *code;
    }
    ++candidate.revision;
    candidate.source_history.push_back(candidate.source);
    return {true, ""};
}

FeedbackDecision Agents::decide_semantic_feedback(CandidateModel& candidate, const std::vector<CheckerVerdict>& verdicts,
                                                  const std::vector<CheckerFeedback>& failing, int refinement_budget) {
    if (!candidate.alive) throw std::logic_error("feedback decision requested for a dead candidate");
    if (!has_budget(candidate, refinement_budget)) return {false, "refinement budget exhausted"};

    std::string summary;
    for (const auto& v : verdicts) {
        summary += "Checker " + std::to_string(v.checker_index) + ": " + to_string(v.verdict);
        if (v.verdict != VerdictKind::Pass) summary += " - " + v.feedback;
        summary += "\n";
    }
    if (!failing.empty()) {
        summary += "\nCode of the failing checkers:\n";
        for (const auto& f : failing) {
            const std::string id = std::to_string(f.checker.agent_index);
            summary += "<checker " + id + ">\n" + f.checker.source + "</checker " + id + ">\n";
        }
    }
    candidate.chat.messages.push_back(
        {ChatRole::User, prompts_.render("semantic_feedback", {{slot::kSemanticFeedback, summary}})});

    std::optional<Json> envelope;
    for (int attempt = 0; attempt < 2 && has_budget(candidate, refinement_budget); ++attempt) {
        if (attempt == 1) candidate.chat.messages.push_back({ChatRole::User, kReaskJson});
        ++candidate.llm_calls;
        auto parsed = parsing::first_json_object(send(candidate.chat, Role::Modeling).content);
        if (!parsed || !parsed->contains("decision") || !(*parsed)["decision"].is_string()) continue;
        const std::string decision = (*parsed)["decision"].get<std::string>();
        if (decision == "reject") {
            envelope = std::move(parsed);
            break;
        }
        if (decision == "accept" && parsed->contains("revised_code") && (*parsed)["revised_code"].is_string() &&
            !(*parsed)["revised_code"].get<std::string>().empty()) {
            envelope = std::move(parsed);
            break;
        }
    }
    if (!envelope) return {false, "unparseable decision"};

    const std::string reason = envelope->value("reason", "");
    if ((*envelope)["decision"] == "reject") return {false, reason.empty() ? "feedback rejected" : reason};
    if (candidate.revision >= refinement_budget) return {false, "refinement budget exhausted"};

    const std::string revised = (*envelope)["revised_code"].get<std::string>();
    candidate.source = parsing::first_code_block(revised).value_or(revised);
    if (candidate.source.back() != '\n') candidate.source += "\n";
    ++candidate.revision;
    candidate.source_history.push_back(candidate.source);
    return {true, reason};
}

std::string Agents::render_checker_section(const std::vector<CheckerProgram>& checkers) {
    if (checkers.empty()) return "(no semantic checkers were synthesized)\n";
    std::string out;
    for (const auto& c : checkers) {
        const std::string id = std::to_string(c.agent_index);
        out += "<checker " + id + ">\n";
        if (c.source.empty()) {
            out += "(checker could not be synthesized: " + c.defect + ")\n";
        } else {
            out += "```Python\n" + c.source + "```\n";
        }
        out += "</checker " + id + ">\n";
    }
    return out;
}

std::string Agents::render_candidate_section(const std::vector<EvidenceCandidate>& candidates) {
    std::string out;
    for (const auto& c : candidates) {
        const std::string id = std::to_string(c.index);
        out += "<candidate " + id + ">\n```MiniZinc\n" + c.source + "```\n</candidate " + id + ">\n";
        out += "Output solution of candidate " + id + ": " + canonical_dump(c.solution) + "\n";
    }
    return out;
}

SelectionVote Agents::cast_vote(const SampledVariant& variant, const EvidencePack& evidence, int agent_index) {
    if (evidence.candidates.empty()) throw std::logic_error("cast_vote needs at least one candidate");
    std::string outcomes;
    std::set<int> allowed;
    for (const auto& c : evidence.candidates) {
        outcomes += c.status_line + "\n";
        allowed.insert(c.index);
    }
    Conversation chat;
    chat.system_prompt =
        prompts_.render("selection_system", {{slot::kProblemDescription, variant.variant.text},
                                             {slot::kCheckerCode, render_checker_section(evidence.checkers)},
                                             {slot::kCandidateCode, render_candidate_section(evidence.candidates)},
                                             {slot::kCheckerOutcomes, outcomes}});
    chat.messages.push_back({ChatRole::User, "Review the candidates above and return your selection as JSON."});
    chat.temperature = variant.temperature;
    chat.tag = tag_for("selection", variant.variant.kind, agent_index);

    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1) chat.messages.push_back({ChatRole::User, kReaskJson});
        const auto envelope = parsing::first_json_object(send(chat, Role::Selection).content);
        if (!envelope) continue;
        const auto selection = selection_value(*envelope);
        if (!selection) continue;
        if (*selection != -1 && !allowed.contains(*selection)) return {agent_index, "invalid vote", -1};
        std::string reason = envelope->contains("reason") && (*envelope)["reason"].is_string()
                                 ? (*envelope)["reason"].get<std::string>()
                                 : "";
        return {agent_index, reason, *selection};
    }
    return {agent_index, "invalid vote", -1};
}

std::string g4_status_line(int candidate_index, const std::optional<GateResult>& g4, int checker_count) {
    const std::string head = "candidate " + std::to_string(candidate_index) + ": ";
    if (!g4 || checker_count == 0 || !g4->artifacts) return head + "no semantic checks were run";
    int passed = 0;
    std::string failing;
    for (const auto& v : *g4->artifacts) {
        const std::string verdict = v.value("verdict", "error");
        if (verdict == "pass") {
            ++passed;
            continue;
        }
        if (!failing.empty()) failing += "; ";
        failing += std::to_string(v.value("checker", 0)) + ": ";
        if (verdict == "error") failing += "error: ";
        failing += first_line(v.value("feedback", ""));
    }
    return head + "passed " + std::to_string(passed) + "/" + std::to_string(checker_count) + " checkers; failing: " +
           (failing.empty() ? std::string("none") : "[" + failing + "]");
}

}  // namespace cpsync
