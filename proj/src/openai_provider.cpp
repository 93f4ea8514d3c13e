#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "cpsync/errors.hpp"
#include "cpsync/llm_gateway.hpp"

namespace cpsync {

OpenAiProvider::OpenAiProvider(OpenAiSettings settings) : settings_(std::move(settings)) {
    const char* key = std::getenv(settings_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw ProviderError("environment variable " + settings_.api_key_env + " is not set");
    }
    api_key_ = key;
}

ChatResponse OpenAiProvider::complete(const ChatRequest& request, const std::string&, int) {
    Json messages = Json::array();
    messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
    for (const auto& m : request.messages) {
        messages.push_back({{"role", m.role == ChatRole::User ? "user" : "assistant"}, {"content", m.content}});
    }
    Json body = {{"model", settings_.model}, {"messages", messages}, {"temperature", request.temperature}};
    if (request.seed) body["seed"] = *request.seed;
    const std::string payload = body.dump();

    httplib::Client client(settings_.base_url);
    client.set_read_timeout(settings_.request_timeout_s, 0);
    client.set_bearer_token_auth(api_key_);

    int backoff_ms = settings_.initial_backoff_ms;
    std::string last_error;
    for (int attempt = 0; attempt <= settings_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
        auto result = client.Post("/v1/chat/completions", payload, "application/json");
        if (!result) {
            last_error = "transport: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status == 429 || result->status >= 500) {
            last_error = "HTTP " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200) {
            throw ProviderError("HTTP " + std::to_string(result->status) + ": " + result->body.substr(0, 500));
        }
        Json reply;
        try {
            reply = Json::parse(result->body);
        } catch (const Json::parse_error& e) {
            throw ProviderError(std::string("malformed provider reply: ") + e.what());
        }
        ChatResponse response;
        response.provider_id = "openai:" + settings_.model;
        try {
            const auto& content = reply.at("choices").at(0).at("message").at("content");
            response.content = content.is_string() ? content.get<std::string>() : "";
        } catch (const Json::exception& e) {
            throw ProviderError(std::string("provider reply has no message content: ") + e.what());
        }
        if (response.content.empty()) throw ProviderError("provider returned empty content");
        if (reply.contains("usage")) {
            response.usage.prompt_tokens = reply["usage"].value("prompt_tokens", 0);
            response.usage.completion_tokens = reply["usage"].value("completion_tokens", 0);
        }
        return response;
    }
    throw ProviderError("giving up after " + std::to_string(settings_.max_retries + 1) + " attempts: " + last_error);
}

}  // namespace cpsync
