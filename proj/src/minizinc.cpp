#include "cpsync/minizinc.hpp"

#include <stdlib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <set>
#include <sstream>

#include "cpsync/errors.hpp"
#include "cpsync/subprocess.hpp"

namespace cpsync {
namespace fs = std::filesystem;

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Satisfied: return "SATISFIED";
        case SolveStatus::Optimal: return "OPTIMAL";
        case SolveStatus::Unsatisfiable: return "UNSATISFIABLE";
        case SolveStatus::Unknown: return "UNKNOWN";
        case SolveStatus::Timeout: return "TIMEOUT";
        case SolveStatus::Error: return "ERROR";
    }
    return "ERROR";
}

namespace {

/// Scratch directory removed on scope exit.
class TempDir {
  public:
    TempDir() {
        std::string pattern = (fs::temp_directory_path() / "cpsync-XXXXXX").string();
        if (!::mkdtemp(pattern.data())) throw Error("SubprocessError", "cannot create temporary directory");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] std::string path() const { return path_.string(); }

    [[nodiscard]] std::string file(const std::string& name, const std::string& content) const {
        const std::string p = (path_ / name).string();
        write_text_file(p, content);
        return p;
    }

  private:
    fs::path path_;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Top-level item boundaries: [begin, end) where end includes the `;`.
struct Item {
    std::size_t begin;
    std::size_t end;
};

/// Skips a comment or string starting at `i`; returns the index after it, or
/// `i` when nothing was skipped.
std::size_t skip_trivia(const std::string& s, std::size_t i) {
    if (s[i] == '%') {
        const auto e = s.find('\n', i);
        return e == std::string::npos ? s.size() : e + 1;
    }
    if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '*') {
        const auto e = s.find("*/", i + 2);
        return e == std::string::npos ? s.size() : e + 2;
    }
    if (s[i] == '"') {
        std::size_t j = i + 1;
        while (j < s.size() && s[j] != '"') j += s[j] == '\\' ? 2 : 1;
        return std::min(j + 1, s.size());
    }
    return i;
}

std::vector<Item> split_items(const std::string& s) {
    std::vector<Item> items;
    std::size_t begin = 0;
    int depth = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t skipped = skip_trivia(s, i);
        if (skipped != i) {
            i = skipped;
            continue;
        }
        const char c = s[i];
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') depth = std::max(0, depth - 1);
        if (c == ';' && depth == 0) {
            items.push_back({begin, i + 1});
            begin = i + 1;
        }
        ++i;
    }
    items.push_back({begin, s.size()});
    return items;
}

/// First identifier of an item, skipping whitespace and comments.
std::string leading_word(const std::string& s, const Item& item, std::size_t* at = nullptr) {
    std::size_t i = item.begin;
    while (i < item.end) {
        if (std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        const std::size_t skipped = skip_trivia(s, i);
        if (skipped != i && s[i] != '"') {
            i = skipped;
            continue;
        }
        break;
    }
    std::size_t j = i;
    while (j < item.end && ident_char(s[j])) ++j;
    if (at) *at = i;
    return s.substr(i, j - i);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

namespace mzn {

std::string strip_output_items(const std::string& source) {
    std::string out;
    for (const auto& item : split_items(source)) {
        if (leading_word(source, item) == "output") continue;
        out += source.substr(item.begin, item.end - item.begin);
    }
    return out;
}

std::optional<SolveItem> find_solve_item(const std::string& source) {
    for (const auto& item : split_items(source)) {
        std::size_t start = 0;
        if (leading_word(source, item, &start) != "solve") continue;
        int depth = 0;
        std::size_t i = start + 5;
        while (i < item.end) {
            const std::size_t skipped = skip_trivia(source, i);
            if (skipped != i) {
                i = skipped;
                continue;
            }
            const char c = source[i];
            if (c == '(' || c == '[' || c == '{') ++depth;
            if (c == ')' || c == ']' || c == '}') --depth;
            if (depth == 0 && ident_char(c) && !ident_char(source[i - 1])) {
                std::size_t j = i;
                while (j < item.end && ident_char(source[j])) ++j;
                const std::string word = source.substr(i, j - i);
                if (word == "satisfy" || word == "minimize" || word == "maximize") {
                    SolveItem found;
                    found.kind = word == "satisfy"    ? SolveItem::Kind::Satisfy
                                 : word == "minimize" ? SolveItem::Kind::Minimize
                                                      : SolveItem::Kind::Maximize;
                    std::string rest = source.substr(j, item.end - j);
                    if (!rest.empty() && rest.back() == ';') rest.pop_back();
                    found.objective = trim(rest);
                    found.begin = start;
                    found.end = item.end;
                    return found;
                }
                i = j;
                continue;
            }
            ++i;
        }
    }
    return std::nullopt;
}

std::string replace_solve_item(const std::string& source, const std::string& replacement) {
    const auto item = find_solve_item(source);
    if (!item) return source + "\n" + replacement + "\n";
    return source.substr(0, item->begin) + replacement + source.substr(item->end);
}

Json normalize_value(const Json& value) {
    if (value.is_array()) {
        Json out = Json::array();
        for (const auto& v : value) out.push_back(normalize_value(v));
        return out;
    }
    if (!value.is_object()) return value;
    if (value.size() == 1 && value.contains("set") && value["set"].is_array()) {
        std::set<Json> members;
        for (const auto& m : value["set"]) {
            if (m.is_array() && m.size() == 2 && m[0].is_number_integer() && m[1].is_number_integer()) {
                for (auto k = m[0].get<long long>(); k <= m[1].get<long long>(); ++k) members.insert(k);
            } else {
                members.insert(normalize_value(m));
            }
        }
        return Json(std::vector<Json>(members.begin(), members.end()));
    }
    if (value.size() == 1 && value.contains("e")) return value["e"];
    Json out = Json::object();
    for (const auto& [k, v] : value.items()) out[k] = normalize_value(v);
    return out;
}

SolveOutcome parse_solver_output(const std::string& out, const std::string& err, int exit_code) {
    SolveOutcome outcome;
    bool have_solution = false;
    bool complete = false;
    bool unsat = false;
    bool unknown = false;
    bool error = false;
    std::string chunk;
    std::string parse_problem;

    std::istringstream lines(out);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == "----------") {
            try {
                Json solution = Json::parse(chunk);
                Json assignment = Json::object();
                outcome.objective.reset();
                for (const auto& [k, v] : solution.items()) {
                    if (k == "_objective") {
                        outcome.objective = v;
                    } else if (!k.empty() && k[0] != '_') {
                        assignment[k] = normalize_value(v);
                    }
                }
                outcome.assignment = std::move(assignment);
                have_solution = true;
            } catch (const Json::exception& e) {
                parse_problem = std::string("unreadable solver output: ") + e.what();
            }
            chunk.clear();
        } else if (line == "==========") {
            complete = true;
        } else if (line == "=====UNSATISFIABLE=====" || line == "=====UNSATorUNBOUNDED=====") {
            unsat = true;
        } else if (line == "=====UNKNOWN=====" || line == "=====UNBOUNDED=====") {
            unknown = true;
        } else if (line == "=====ERROR=====") {
            error = true;
        } else if (!line.empty() && line[0] == '%') {
            continue;
        } else {
            chunk += line + "\n";
        }
    }

    const std::string diagnostics = trim(err.empty() ? chunk : err);
    if (error || (exit_code != 0 && !have_solution && !unsat)) {
        outcome.status = SolveStatus::Error;
        outcome.message = diagnostics.empty() ? "solver exited with code " + std::to_string(exit_code) : diagnostics;
    } else if (unsat) {
        outcome.status = SolveStatus::Unsatisfiable;
    } else if (have_solution) {
        outcome.status = complete && outcome.objective ? SolveStatus::Optimal : SolveStatus::Satisfied;
    } else if (!parse_problem.empty()) {
        outcome.status = SolveStatus::Error;
        outcome.message = parse_problem;
    } else {
        outcome.status = SolveStatus::Unknown;
        (void)unknown;
    }
    if (outcome.message.empty()) outcome.message = trim(err);
    return outcome;
}

}  // namespace mzn

MiniZincCli::MiniZincCli(std::vector<std::string> command) : command_(std::move(command)) {
    if (command_.empty()) throw ToolchainMissing("empty MiniZinc command");
}

void MiniZincCli::require_available() const {
    if (!executable_exists(command_[0])) throw ToolchainMissing("MiniZinc executable not found: " + command_[0]);
}

ProcessResult MiniZincCli::invoke(const std::vector<std::string>& args, const std::map<std::string, std::string>& files,
                                  double timeout_s) {
    TempDir dir;
    for (const auto& [name, text] : files) (void)dir.file(name, text);
    std::vector<std::string> argv = command_;
    argv.insert(argv.end(), args.begin(), args.end());
    return run_process(argv, "", timeout_s, dir.path());
}

CompileOutcome MiniZincCli::compile_check(const std::string& model_source) {
    require_available();
    if (trim(model_source).empty()) return {false, "empty model"};
    const ProcessResult r = invoke({"--model-check-only", "model.mzn"}, {{"model.mzn", model_source}}, 60.0);
    if (r.timed_out) return {false, "compile check timed out"};
    if (r.exit_code == 0) return {true, ""};
    std::string message = trim(r.err + "\n" + r.out);
    if (message.empty()) message = "compiler exited with code " + std::to_string(r.exit_code);
    return {false, message};
}

SolveOutcome MiniZincCli::solve(const std::string& model_source, const std::string& dzn_text,
                                const SolveOptions& options) {
    require_available();
    std::vector<std::string> args = {"--solver",
                                     options.solver,
                                     "--time-limit",
                                     std::to_string(static_cast<long long>(options.timeout_s * 1000)),
                                     "--output-mode",
                                     "json",
                                     "--output-objective",
                                     "model.mzn"};
    std::map<std::string, std::string> files = {{"model.mzn", model_source}};
    if (!trim(dzn_text).empty()) {
        args.push_back("data.dzn");
        files["data.dzn"] = dzn_text;
    }

    const auto started = std::chrono::steady_clock::now();
    const ProcessResult r = invoke(args, files, options.timeout_s + 10.0);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (r.timed_out) {
        SolveOutcome outcome;
        outcome.status = SolveStatus::Timeout;
        outcome.message = "solver killed after " + std::to_string(static_cast<int>(elapsed)) + " s";
        return outcome;
    }
    SolveOutcome outcome = mzn::parse_solver_output(r.out, r.err, r.exit_code);
    if (outcome.status == SolveStatus::Unknown && elapsed >= 0.95 * options.timeout_s) {
        outcome.status = SolveStatus::Timeout;
    }
    return outcome;
}

Json MiniZincCli::output_interface(const std::string& model_source, const std::string& dzn_text) {
    require_available();
    std::vector<std::string> args = {"--model-interface-only", "model.mzn"};
    std::map<std::string, std::string> files = {{"model.mzn", model_source}};
    if (!trim(dzn_text).empty()) {
        args.push_back("data.dzn");
        files["data.dzn"] = dzn_text;
    }
    const ProcessResult r = invoke(args, files, 60.0);
    if (r.timed_out || r.exit_code != 0) return Json::object();
    try {
        const Json parsed = Json::parse(r.out);
        if (parsed.contains("output") && parsed["output"].is_object()) return parsed["output"];
    } catch (const Json::exception&) {
    }
    return Json::object();
}

MiniZincService::MiniZincService(std::vector<std::string> command)
    : MiniZincCli(command), process_([&] {
          command.push_back("--serve");
          return command;
      }()) {}

ProcessResult MiniZincService::invoke(const std::vector<std::string>& args,
                                      const std::map<std::string, std::string>& files, double timeout_s) {
    Json files_json = Json::object();
    for (const auto& [name, text] : files) files_json[name] = text;
    const Json request = {{"args", args}, {"files", files_json}};
    std::lock_guard lock(mutex_);
    const auto reply = process_.exchange(canonical_dump(request), timeout_s);
    ProcessResult result;
    if (!reply) {
        result.timed_out = true;
        return result;
    }
    try {
        const Json parsed = Json::parse(*reply);
        result.exit_code = parsed.value("code", 1);
        result.out = parsed.value("stdout", "");
        result.err = parsed.value("stderr", "");
    } catch (const Json::exception& e) {
        result.exit_code = 1;
        result.err = std::string("malformed reply from MiniZinc service: ") + e.what();
    }
    return result;
}

std::unique_ptr<Toolchain> make_toolchain(const std::string& spec) {
    const std::string prefix = "service:";
    if (spec.rfind(prefix, 0) == 0) return std::make_unique<MiniZincService>(split_command(spec.substr(prefix.size())));
    return std::make_unique<MiniZincCli>(split_command(spec));
}

}  // namespace cpsync
