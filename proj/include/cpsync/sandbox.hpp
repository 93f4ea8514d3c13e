#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cpsync/canonical.hpp"

namespace cpsync {

struct ExecRequest {
    std::string function_source;
    std::string function_name;
    Json data_dict = Json::object();
    Json arg_dict = Json::object();
};

enum class ExecStatus { Ok, Raise, Error };
std::string to_string(ExecStatus status);

struct ExecResponse {
    ExecStatus status = ExecStatus::Error;
    std::optional<Json> result;
    std::string message;
    std::string traceback;
};

Json to_json(const ExecRequest& request);
Json to_json(const ExecResponse& response);
/// Lenient: anything that does not satisfy the response invariants becomes
/// an Error response describing the problem.
ExecResponse exec_response_from_json(const Json& json);

std::string request_hash(const ExecRequest& request);

/// Executes synthesized checker and formatter functions.
class SandboxRunner {
  public:
    virtual ~SandboxRunner() = default;
    virtual ExecResponse execute(const ExecRequest& request) = 0;
};

/// Spawns `command` once per request: one JSON line on stdin, one on stdout.
/// The process is killed after `timeout_s`, which yields an Error response.
class ProcessSandbox : public SandboxRunner {
  public:
    explicit ProcessSandbox(std::vector<std::string> command, double timeout_s = 10.0);
    ExecResponse execute(const ExecRequest& request) override;

  private:
    std::vector<std::string> command_;
    double timeout_s_;
};

/// Serves responses recorded earlier, keyed by request hash.
///
/// File layout: {"<hash>": {"request": ..., "response": ...}, ...}.
/// Unknown requests throw SandboxUnavailable naming the hash.
class CannedSandbox : public SandboxRunner {
  public:
    explicit CannedSandbox(const std::string& path);
    explicit CannedSandbox(Json entries);
    ExecResponse execute(const ExecRequest& request) override;

  private:
    std::map<std::string, ExecResponse> responses_;
};

/// Forwards to `inner` and keeps every exchange for `save`.
class RecordingSandbox : public SandboxRunner {
  public:
    explicit RecordingSandbox(std::shared_ptr<SandboxRunner> inner);
    ExecResponse execute(const ExecRequest& request) override;

    [[nodiscard]] Json entries() const;
    /// Merges with entries already present at `path`.
    void save(const std::string& path) const;

  private:
    std::shared_ptr<SandboxRunner> inner_;
    mutable std::mutex mutex_;
    Json entries_ = Json::object();
};

}  // namespace cpsync
