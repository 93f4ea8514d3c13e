#include "cpsync/run_record.hpp"

namespace cpsync {

Json to_json(const CandidateModel& c) {
    Json gates = Json::array();
    for (const auto& g : c.gate_history) gates.push_back(to_json(g));
    Json out = {{"agent", c.agent_index},
                {"revision", c.revision},
                {"alive", c.alive},
                {"death_reason", c.death_reason},
                {"llm_calls", c.llm_calls},
                {"sources", c.source_history},
                {"formatter_sources", c.formatter_history},
                {"gate_history", gates},
                {"temperature", c.chat.temperature}};
    return out;
}

Json to_json(const CheckerProgram& checker) {
    return {{"agent", checker.agent_index},
            {"source", checker.source},
            {"health", to_string(checker.health)},
            {"defect", checker.defect}};
}

Json to_json(const IterationRecord& it) {
    Json variants = Json::array();
    for (const auto& v : it.variants) {
        variants.push_back({{"kind", to_string(v.variant.kind)},
                            {"text", v.variant.text},
                            {"fallback", v.variant.fallback},
                            {"temperature", v.temperature}});
    }
    Json candidates = Json::array();
    for (const auto& c : it.candidates) {
        Json entry = to_json(c.model);
        entry["survivor"] = c.survivor ? to_json(*c.survivor) : Json(nullptr);
        candidates.push_back(entry);
    }
    Json checkers = Json::array();
    for (const auto& c : it.checkers) checkers.push_back(to_json(c));
    Json votes = Json::array();
    for (const auto& v : it.votes) votes.push_back(to_json(v));
    return {{"index", it.index},
            {"description", it.description},
            {"description_fallback", it.description_fallback},
            {"variants", variants},
            {"candidates", candidates},
            {"checkers", checkers},
            {"votes", votes},
            {"decision", it.decision},
            {"selected", it.selected},
            {"calls", to_json(it.calls)}};
}

Json to_json(const Telemetry& t) {
    return {{"gate_failures", t.gate_failures}, {"calls", to_json(t.calls)}};
}

Json make_run_record(const ProblemBundle& bundle, const WorkflowConfig& config, const WorkflowOutcome& outcome) {
    Json iterations = Json::array();
    Json per_iteration = Json::array();
    for (const auto& it : outcome.iterations) {
        iterations.push_back(to_json(it));
        per_iteration.push_back(to_json(it.calls));
    }
    Json result = {{"status", to_string(outcome.status)},
                   {"iterations_used", outcome.iterations_used},
                   {"model", outcome.model ? Json(*outcome.model) : Json(nullptr)},
                   {"solution", outcome.solution ? *outcome.solution : Json(nullptr)},
                   {"chosen", outcome.chosen ? Json{{"iteration", outcome.chosen->first},
                                                    {"agent", outcome.chosen->second}}
                                             : Json(nullptr)}};
    Json telemetry = to_json(outcome.telemetry);
    telemetry["per_iteration_calls"] = per_iteration;
    return {{"schema_version", kRunRecordSchemaVersion},
            {"problem", bundle.id},
            {"config", to_json(config)},
            {"iterations", iterations},
            {"outcome", result},
            {"telemetry", telemetry}};
}

}  // namespace cpsync
