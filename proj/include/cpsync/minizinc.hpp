#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>
#include <string>

#include "cpsync/canonical.hpp"
#include "cpsync/subprocess.hpp"

namespace cpsync {

enum class SolveStatus { Satisfied, Optimal, Unsatisfiable, Unknown, Timeout, Error };
std::string to_string(SolveStatus status);

struct CompileOutcome {
    bool ok = false;
    std::string message;
};

struct SolveOptions {
    std::string solver = "gecode";
    double timeout_s = 30.0;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::Error;
    /// Last solution printed, with sets as sorted arrays.
    Json assignment = Json::object();
    std::optional<Json> objective;
    /// Solver diagnostics (stderr, error text).
    std::string message;

    [[nodiscard]] bool has_solution() const {
        return status == SolveStatus::Satisfied || status == SolveStatus::Optimal;
    }
};

/// The constraint toolchain as the pipeline and evaluator see it.
class Toolchain {
  public:
    virtual ~Toolchain() = default;
    virtual CompileOutcome compile_check(const std::string& model_source) = 0;
    /// Solves `model_source` with `dzn_text` as data. Output items must
    /// already be stripped by the caller.
    virtual SolveOutcome solve(const std::string& model_source, const std::string& dzn_text,
                               const SolveOptions& options) = 0;
    /// Declared output variables: name -> {"type", "dim"?, "set"?}. Empty
    /// when the toolchain cannot tell.
    virtual Json output_interface(const std::string& /*model_source*/, const std::string& /*dzn_text*/) {
        return Json::object();
    }
};

/// Drives a MiniZinc command line. `command` is the executable plus any
/// leading arguments; one process is spawned per call.
class MiniZincCli : public Toolchain {
  public:
    explicit MiniZincCli(std::vector<std::string> command = {"minizinc"});

    CompileOutcome compile_check(const std::string& model_source) override;
    SolveOutcome solve(const std::string& model_source, const std::string& dzn_text,
                       const SolveOptions& options) override;
    Json output_interface(const std::string& model_source, const std::string& dzn_text) override;

    /// Throws ToolchainMissing when the executable is not found.
    void require_available() const;

  protected:
    /// Runs MiniZinc with `args`; `files` (name -> text) are made available
    /// under their names in the working directory.
    virtual ProcessResult invoke(const std::vector<std::string>& args, const std::map<std::string, std::string>& files,
                                 double timeout_s);

    std::vector<std::string> command_;
};

/// Like MiniZincCli but keeps one server process alive (`command --serve`,
/// JSON lines in and out), which avoids paying the start-up cost per call.
class MiniZincService : public MiniZincCli {
  public:
    explicit MiniZincService(std::vector<std::string> command);

  protected:
    ProcessResult invoke(const std::vector<std::string>& args, const std::map<std::string, std::string>& files,
                         double timeout_s) override;

  private:
    std::mutex mutex_;
    PersistentProcess process_;
};

/// "service:CMD" selects MiniZincService, anything else MiniZincCli.
std::unique_ptr<Toolchain> make_toolchain(const std::string& spec);

namespace mzn {

/// Removes every top-level `output` item.
std::string strip_output_items(const std::string& source);

struct SolveItem {
    enum class Kind { Satisfy, Minimize, Maximize } kind = Kind::Satisfy;
    std::string objective;
    std::size_t begin = 0;
    /// One past the terminating `;` (or end of source).
    std::size_t end = 0;
};

std::optional<SolveItem> find_solve_item(const std::string& source);

/// Replaces the solve item with `replacement` (which carries its own `;`).
std::string replace_solve_item(const std::string& source, const std::string& replacement);

/// Parses the text the solver prints in JSON output mode.
SolveOutcome parse_solver_output(const std::string& out, const std::string& err, int exit_code);

/// Converts one solver JSON value to the assignment representation:
/// `{"set": [...]}` becomes a sorted array with ranges expanded.
Json normalize_value(const Json& value);

}  // namespace mzn
}  // namespace cpsync
