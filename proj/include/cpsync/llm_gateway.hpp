#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cpsync/canonical.hpp"

namespace cpsync {

enum class ChatRole { User, Assistant };

struct ChatMessage {
    ChatRole role = ChatRole::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string system_prompt;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::optional<std::int64_t> seed;
    /// Agent role and variant, e.g. "modeling/refined/agent2".
    std::string tag;
};

struct TokenUsage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

struct ChatResponse {
    std::string content;
    std::string provider_id;
    TokenUsage usage;
};

Json to_json(const ChatRequest& request);
Json to_json(const ChatResponse& response);
ChatResponse chat_response_from_json(const Json& json);

/// Hash over system prompt, messages, temperature and tag. The call ordinal
/// is kept separately so repeated identical requests stay distinguishable.
std::string request_hash(const ChatRequest& request);

/// A backend that turns a request into text. `ordinal` counts earlier calls
/// with the same request hash in this gateway session.
class LlmProvider {
  public:
    virtual ~LlmProvider() = default;
    virtual ChatResponse complete(const ChatRequest& request, const std::string& hash, int ordinal) = 0;
};

/// Reads responses from a fixture directory of `<hash>-<ordinal>.json` files.
class ReplayProvider : public LlmProvider {
  public:
    explicit ReplayProvider(std::string fixture_dir);
    ChatResponse complete(const ChatRequest& request, const std::string& hash, int ordinal) override;

  private:
    std::string dir_;
};

/// Forwards to another provider and stores every exchange as a fixture file.
class RecordingProvider : public LlmProvider {
  public:
    RecordingProvider(std::unique_ptr<LlmProvider> inner, std::string fixture_dir);
    ChatResponse complete(const ChatRequest& request, const std::string& hash, int ordinal) override;

  private:
    std::unique_ptr<LlmProvider> inner_;
    std::string dir_;
    std::mutex write_mutex_;
};

/// Answers from a callback; used to author fixture packs and in tests.
class ScriptedProvider : public LlmProvider {
  public:
    using Script = std::function<std::string(const ChatRequest&, int ordinal)>;
    explicit ScriptedProvider(Script script, std::string provider_id = "scripted");
    ChatResponse complete(const ChatRequest& request, const std::string& hash, int ordinal) override;

  private:
    Script script_;
    std::string provider_id_;
};

struct OpenAiSettings {
    std::string base_url = "https://api.openai.com";
    std::string model = "gpt-4o";
    /// Name of the environment variable holding the API key.
    std::string api_key_env = "OPENAI_API_KEY";
    int max_retries = 3;
    int initial_backoff_ms = 500;
    int request_timeout_s = 300;
};

/// OpenAI-compatible chat-completions client. Transport failures, HTTP 429
/// and 5xx are retried with exponential backoff; everything else surfaces as
/// ProviderError at once.
class OpenAiProvider : public LlmProvider {
  public:
    explicit OpenAiProvider(OpenAiSettings settings);
    ChatResponse complete(const ChatRequest& request, const std::string& hash, int ordinal) override;

  private:
    OpenAiSettings settings_;
    std::string api_key_;
};

struct GatewayCall {
    ChatRequest request;
    std::string hash;
    int ordinal = 0;
};

/// Entry point every agent uses. Validates requests, assigns per-hash call
/// ordinals and keeps a log of outgoing requests.
class LlmGateway {
  public:
    explicit LlmGateway(std::unique_ptr<LlmProvider> provider);

    ChatResponse complete(const ChatRequest& request);

    [[nodiscard]] std::vector<GatewayCall> calls() const;
    [[nodiscard]] std::size_t call_count() const;

  private:
    std::unique_ptr<LlmProvider> provider_;
    mutable std::mutex mutex_;
    std::map<std::string, int> ordinals_;
    std::vector<GatewayCall> log_;
};

}  // namespace cpsync
