#include "cpsync/sandbox.hpp"

#include <filesystem>
#include <sstream>

#include "cpsync/errors.hpp"
#include "cpsync/subprocess.hpp"

namespace cpsync {

std::string to_string(ExecStatus status) {
    switch (status) {
        case ExecStatus::Ok: return "ok";
        case ExecStatus::Raise: return "raise";
        case ExecStatus::Error: return "error";
    }
    return "error";
}

Json to_json(const ExecRequest& request) {
    return {{"function_source", request.function_source},
            {"function_name", request.function_name},
            {"data_dict", request.data_dict},
            {"arg_dict", request.arg_dict}};
}

Json to_json(const ExecResponse& response) {
    Json out = {{"status", to_string(response.status)}};
    if (response.result) out["result"] = *response.result;
    if (!response.message.empty()) out["message"] = response.message;
    if (!response.traceback.empty()) out["traceback"] = response.traceback;
    return out;
}

ExecResponse exec_response_from_json(const Json& json) {
    ExecResponse response;
    if (!json.is_object() || !json.contains("status") || !json["status"].is_string()) {
        response.message = "malformed sandbox response";
        return response;
    }
    const std::string status = json["status"].get<std::string>();
    if (json.contains("message") && json["message"].is_string()) response.message = json["message"];
    if (json.contains("traceback") && json["traceback"].is_string()) response.traceback = json["traceback"];
    if (json.contains("result")) response.result = json["result"];
    if (status == "ok") {
        response.status = ExecStatus::Ok;
        if (!response.result) response.result = Json(nullptr);
    } else if (status == "raise") {
        response.status = ExecStatus::Raise;
    } else {
        response.status = ExecStatus::Error;
        if (status != "error") response.message = "unknown sandbox status: " + status;
    }
    if (response.status != ExecStatus::Ok && response.message.empty()) {
        response.message = response.traceback.empty() ? "no message" : response.traceback;
    }
    return response;
}

std::string request_hash(const ExecRequest& request) { return canonical_hash(to_json(request)); }

ProcessSandbox::ProcessSandbox(std::vector<std::string> command, double timeout_s)
    : command_(std::move(command)), timeout_s_(timeout_s) {
    if (command_.empty()) throw SandboxUnavailable("empty sandbox command");
}

ExecResponse ProcessSandbox::execute(const ExecRequest& request) {
    ProcessResult r;
    try {
        r = run_process(command_, canonical_dump(to_json(request)) + "\n", timeout_s_);
    } catch (const ToolchainMissing& e) {
        throw SandboxUnavailable(e.what());
    }
    ExecResponse response;
    if (r.timed_out) {
        response.message = "timeout after " + std::to_string(static_cast<int>(timeout_s_)) + " s";
        return response;
    }
    if (r.exit_code != 0) {
        response.message = "sandbox exited with code " + std::to_string(r.exit_code);
        response.traceback = r.err;
        return response;
    }
    std::istringstream lines(r.out);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            return exec_response_from_json(Json::parse(line));
        } catch (const Json::exception&) {
            break;
        }
    }
    response.message = "malformed sandbox output";
    response.traceback = r.out + r.err;
    return response;
}

CannedSandbox::CannedSandbox(const std::string& path) : CannedSandbox(Json::parse(read_text_file(path))) {}

CannedSandbox::CannedSandbox(Json entries) {
    if (!entries.is_object()) throw SandboxUnavailable("canned sandbox file must hold a JSON object");
    for (const auto& [hash, entry] : entries.items()) {
        responses_[hash] = exec_response_from_json(entry.value("response", Json::object()));
    }
}

ExecResponse CannedSandbox::execute(const ExecRequest& request) {
    const std::string hash = request_hash(request);
    const auto it = responses_.find(hash);
    if (it == responses_.end()) throw SandboxUnavailable("no canned sandbox response for request " + hash);
    return it->second;
}

RecordingSandbox::RecordingSandbox(std::shared_ptr<SandboxRunner> inner) : inner_(std::move(inner)) {}

ExecResponse RecordingSandbox::execute(const ExecRequest& request) {
    ExecResponse response = inner_->execute(request);
    std::lock_guard lock(mutex_);
    entries_[request_hash(request)] = {{"request", to_json(request)}, {"response", to_json(response)}};
    return response;
}

Json RecordingSandbox::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

void RecordingSandbox::save(const std::string& path) const {
    Json merged = Json::object();
    if (std::filesystem::exists(path)) merged = Json::parse(read_text_file(path));
    const Json recorded = entries();
    for (const auto& [hash, entry] : recorded.items()) merged[hash] = entry;
    write_text_file(path, pretty_dump(merged));
}

}  // namespace cpsync
