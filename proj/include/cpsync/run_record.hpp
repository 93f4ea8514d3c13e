#pragma once

#include "cpsync/orchestrator.hpp"

namespace cpsync {

inline constexpr int kRunRecordSchemaVersion = 1;

/// Full audit trail of one workflow run. Contains no timestamps or other
/// ambient data, so identical runs serialize identically.
Json make_run_record(const ProblemBundle& bundle, const WorkflowConfig& config, const WorkflowOutcome& outcome);

Json to_json(const IterationRecord& iteration);
Json to_json(const CandidateModel& candidate);
Json to_json(const CheckerProgram& checker);
Json to_json(const Telemetry& telemetry);

}  // namespace cpsync
