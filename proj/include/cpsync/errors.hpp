#pragma once

#include <stdexcept>
#include <string>

namespace cpsync {

/// Base of every error the library throws. `kind()` is a stable short name
/// used in run records and CLI diagnostics.
class Error : public std::runtime_error {
  public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

  private:
    std::string kind_;
};

#define CPSYNC_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
      public:                                                                  \
        explicit Name(const std::string& message) : Error(#Name, message) {}   \
    }

// Problem store.
CPSYNC_DEFINE_ERROR(MissingField);
CPSYNC_DEFINE_ERROR(DataMismatch);
CPSYNC_DEFINE_ERROR(DznParseError);

// LLM gateway.
CPSYNC_DEFINE_ERROR(ProviderError);
CPSYNC_DEFINE_ERROR(FixtureMiss);

// Agents.
CPSYNC_DEFINE_ERROR(ParseError);
CPSYNC_DEFINE_ERROR(BudgetExhausted);
CPSYNC_DEFINE_ERROR(TemplateError);

// Execution infrastructure.
CPSYNC_DEFINE_ERROR(ToolchainMissing);
CPSYNC_DEFINE_ERROR(SandboxUnavailable);

// Evaluation.
CPSYNC_DEFINE_ERROR(MappingFault);
CPSYNC_DEFINE_ERROR(ReferenceModelBroken);
CPSYNC_DEFINE_ERROR(EmptyBenchmark);
CPSYNC_DEFINE_ERROR(NoTrials);

// Configuration and CLI.
CPSYNC_DEFINE_ERROR(ConfigError);

#undef CPSYNC_DEFINE_ERROR

}  // namespace cpsync
