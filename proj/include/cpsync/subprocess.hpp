#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cpsync {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string out;
    std::string err;
};

/// Runs `argv` (argv[0] looked up on PATH), feeding `stdin_text` and
/// collecting both output streams. The process group is killed once
/// `timeout_s` of wall-clock time has elapsed.
///
/// Throws ToolchainMissing when argv[0] cannot be executed.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& stdin_text,
                          double timeout_s, const std::optional<std::string>& working_dir = std::nullopt);

/// A long-running child that answers one stdout line per stdin line.
/// Started lazily; a timed-out or dead child is killed and started afresh on
/// the next exchange. Not thread-safe.
class PersistentProcess {
  public:
    explicit PersistentProcess(std::vector<std::string> argv);
    ~PersistentProcess();
    PersistentProcess(const PersistentProcess&) = delete;
    PersistentProcess& operator=(const PersistentProcess&) = delete;

    /// Sends `line` (a newline is appended) and returns the reply line, or
    /// nullopt when no reply arrived within `timeout_s`.
    std::optional<std::string> exchange(const std::string& line, double timeout_s);

  private:
    void start();
    void stop();

    std::vector<std::string> argv_;
    int pid_ = -1;
    int in_fd_ = -1;
    int out_fd_ = -1;
    std::string pending_;
};

/// Whether `program` resolves to an executable file (absolute path or PATH).
bool executable_exists(const std::string& program);

/// Splits a command line on whitespace, honouring single and double quotes.
std::vector<std::string> split_command(const std::string& command);

}  // namespace cpsync
