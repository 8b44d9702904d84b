#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "modchat/detection/detection.hpp"

namespace modchat::detection {

struct RemoteConfig {
    std::string base_url = "https://api.openai.com";
    std::string api_key;
    std::string model = "gpt-3.5-turbo";
    std::chrono::milliseconds timeout = std::chrono::seconds(10);
    int max_retries = 2;

    /// Reads MODCHAT_LLM_BASE_URL, MODCHAT_LLM_API_KEY, MODCHAT_LLM_MODEL and
    /// MODCHAT_LLM_TIMEOUT_MS; unset variables keep the defaults. Throws
    /// ConfigurationError when the key is missing or the timeout is invalid.
    static RemoteConfig from_env();
};

/// Sends one prompt to a language model and returns the raw completion.
/// Throws BackendError on transport failure or timeout.
class CompletionTransport {
public:
    virtual ~CompletionTransport() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

/// OpenAI-compatible `/v1/chat/completions` client.
class ChatCompletionsTransport : public CompletionTransport {
public:
    explicit ChatCompletionsTransport(RemoteConfig config) : config_(std::move(config)) {}
    std::string complete(const std::string& prompt) override;

private:
    RemoteConfig config_;
};

/// Classification and counter speech by prompting a language model. Each
/// call makes at most 1 + max_retries transport attempts; an unparseable
/// classification reply is not retried.
class RemoteBackend : public DetectionBackend {
public:
    RemoteBackend(std::shared_ptr<CompletionTransport> transport, int max_retries = 2);

    Classification classify(const std::string& text) override;
    CounterSpeech generate_counter(const CounterRequest& request) override;

private:
    std::string complete_with_retries(const std::string& prompt);

    std::shared_ptr<CompletionTransport> transport_;
    int max_retries_;
};

} // namespace modchat::detection
