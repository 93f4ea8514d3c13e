#include "cpsync/llm_gateway.hpp"

#include <filesystem>

#include "cpsync/errors.hpp"

namespace fs = std::filesystem;

namespace cpsync {
namespace {

std::string role_name(ChatRole role) { return role == ChatRole::User ? "user" : "assistant"; }

std::string fixture_name(const std::string& hash, int ordinal) {
    return hash + "-" + std::to_string(ordinal) + ".json";
}

}  // namespace

Json to_json(const ChatRequest& request) {
    Json messages = Json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    }
    Json out = {{"system_prompt", request.system_prompt},
                {"messages", std::move(messages)},
                {"temperature", request.temperature},
                {"tag", request.tag}};
    if (request.seed) out["seed"] = *request.seed;
    return out;
}

Json to_json(const ChatResponse& response) {
    return {{"content", response.content},
            {"provider_id", response.provider_id},
            {"usage", {{"prompt_tokens", response.usage.prompt_tokens},
                       {"completion_tokens", response.usage.completion_tokens}}}};
}

ChatResponse chat_response_from_json(const Json& json) {
    ChatResponse r;
    r.content = json.value("content", "");
    r.provider_id = json.value("provider_id", "");
    if (json.contains("usage")) {
        r.usage.prompt_tokens = json["usage"].value("prompt_tokens", 0);
        r.usage.completion_tokens = json["usage"].value("completion_tokens", 0);
    }
    return r;
}

std::string request_hash(const ChatRequest& request) {
    Json keyed = to_json(request);
    keyed.erase("seed");
    return canonical_hash(keyed);
}

ReplayProvider::ReplayProvider(std::string fixture_dir) : dir_(std::move(fixture_dir)) {
    if (!fs::is_directory(dir_)) throw ConfigError("fixture directory does not exist: " + dir_);
}

ChatResponse ReplayProvider::complete(const ChatRequest& request, const std::string& hash, int ordinal) {
    const fs::path path = fs::path(dir_) / fixture_name(hash, ordinal);
    if (!fs::is_regular_file(path)) {
        throw FixtureMiss("no recorded response for request " + hash + " ordinal " + std::to_string(ordinal) +
                          " (tag " + request.tag + ")");
    }
    const Json fixture = Json::parse(read_text_file(path.string()));
    ChatResponse response = chat_response_from_json(fixture.at("response"));
    response.provider_id = "replay:" + response.provider_id;
    return response;
}

RecordingProvider::RecordingProvider(std::unique_ptr<LlmProvider> inner, std::string fixture_dir)
    : inner_(std::move(inner)), dir_(std::move(fixture_dir)) {
    fs::create_directories(dir_);
}

ChatResponse RecordingProvider::complete(const ChatRequest& request, const std::string& hash, int ordinal) {
    ChatResponse response = inner_->complete(request, hash, ordinal);
    const Json fixture = {{"hash", hash},
                          {"ordinal", ordinal},
                          {"tag", request.tag},
                          {"request", to_json(request)},
                          {"response", to_json(response)}};
    std::lock_guard lock(write_mutex_);
    write_text_file((fs::path(dir_) / fixture_name(hash, ordinal)).string(), pretty_dump(fixture));
    return response;
}

ScriptedProvider::ScriptedProvider(Script script, std::string provider_id)
    : script_(std::move(script)), provider_id_(std::move(provider_id)) {}

ChatResponse ScriptedProvider::complete(const ChatRequest& request, const std::string&, int ordinal) {
    ChatResponse response;
    response.content = script_(request, ordinal);
    response.provider_id = provider_id_;
    return response;
}

LlmGateway::LlmGateway(std::unique_ptr<LlmProvider> provider) : provider_(std::move(provider)) {
    if (!provider_) throw ConfigError("gateway needs a provider");
}

ChatResponse LlmGateway::complete(const ChatRequest& request) {
    if (request.messages.empty()) throw ProviderError("request has no messages (tag " + request.tag + ")");
    if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
        throw ProviderError("temperature out of range [0, 2] (tag " + request.tag + ")");
    }
    const std::string hash = request_hash(request);
    int ordinal = 0;
    {
        std::lock_guard lock(mutex_);
        ordinal = ordinals_[hash]++;
        log_.push_back({request, hash, ordinal});
    }
    return provider_->complete(request, hash, ordinal);
}

std::vector<GatewayCall> LlmGateway::calls() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::size_t LlmGateway::call_count() const {
    std::lock_guard lock(mutex_);
    return log_.size();
}

}  // namespace cpsync
