#include <filesystem>

#include <gtest/gtest.h>

#include "cpsync/errors.hpp"
#include "cpsync/llm_gateway.hpp"
#include "environment.hpp"

using namespace cpsync;

namespace {

ChatRequest request(const std::string& text, const std::string& tag = "modeling/original/agent1") {
    ChatRequest r;
    r.system_prompt = "system";
    r.messages = {{ChatRole::User, text}};
    r.tag = tag;
    return r;
}

std::unique_ptr<LlmProvider> echo() {
    return std::make_unique<ScriptedProvider>([](const ChatRequest& r, int ordinal) {
        return r.messages.back().content + "#" + std::to_string(ordinal);
    });
}

}  // namespace

TEST(RequestHash, DependsOnEveryField) {
    const ChatRequest base = request("hi");
    const std::string h = request_hash(base);
    EXPECT_EQ(h, request_hash(request("hi")));
    ChatRequest r = base;
    r.system_prompt = "other";
    EXPECT_NE(request_hash(r), h);
    r = base;
    r.temperature = 0.7;
    EXPECT_NE(request_hash(r), h);
    r = base;
    r.tag = "modeling/original/agent2";
    EXPECT_NE(request_hash(r), h);
    r = base;
    r.messages.push_back({ChatRole::Assistant, "x"});
    EXPECT_NE(request_hash(r), h);
}

TEST(Gateway, OrdinalsCountPerHash) {
    LlmGateway gateway(echo());
    EXPECT_EQ(gateway.complete(request("a")).content, "a#0");
    EXPECT_EQ(gateway.complete(request("b")).content, "b#0");
    EXPECT_EQ(gateway.complete(request("a")).content, "a#1");
    EXPECT_EQ(gateway.call_count(), 3u);
    EXPECT_EQ(gateway.calls()[2].ordinal, 1);
}

TEST(Gateway, RejectsMalformedRequests) {
    LlmGateway gateway(echo());
    ChatRequest empty = request("x");
    empty.messages.clear();
    EXPECT_THROW(gateway.complete(empty), ProviderError);
    ChatRequest hot = request("x");
    hot.temperature = 2.5;
    EXPECT_THROW(gateway.complete(hot), ProviderError);
}

TEST(Gateway, RecordThenReplay) {
    const auto dir = cptest::scratch_dir("fixtures");
    {
        LlmGateway recorder(std::make_unique<RecordingProvider>(echo(), dir.string()));
        recorder.complete(request("a"));
        recorder.complete(request("a"));
        recorder.complete(request("b"));
    }
    LlmGateway replay(std::make_unique<ReplayProvider>(dir.string()));
    EXPECT_EQ(replay.complete(request("a")).content, "a#0");
    EXPECT_EQ(replay.complete(request("a")).content, "a#1");
    EXPECT_EQ(replay.complete(request("b")).content, "b#0");
    EXPECT_THROW(replay.complete(request("a")), FixtureMiss);
    EXPECT_THROW(replay.complete(request("c")), FixtureMiss);
}

TEST(Gateway, ReplayNeedsDirectory) {
    EXPECT_THROW(ReplayProvider("/nonexistent/cpsync/fixtures"), ConfigError);
}

TEST(Gateway, ResponseJsonRoundTrip) {
    ChatResponse r{"text", "provider", {12, 34}};
    const ChatResponse back = chat_response_from_json(to_json(r));
    EXPECT_EQ(back.content, "text");
    EXPECT_EQ(back.provider_id, "provider");
    EXPECT_EQ(back.usage.prompt_tokens, 12);
    EXPECT_EQ(back.usage.completion_tokens, 34);
}

TEST(OpenAi, MissingKeyIsProviderError) {
    OpenAiSettings s;
    s.api_key_env = "CPSYNC_TEST_UNSET_KEY_VARIABLE";
    ::unsetenv(s.api_key_env.c_str());
    EXPECT_THROW({ OpenAiProvider p(s); p.complete(request("x"), "h", 0); }, ProviderError);
}
