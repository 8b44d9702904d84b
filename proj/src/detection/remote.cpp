#include "modchat/detection/remote.hpp"

#include <cstdlib>

#include "modchat/common/http_json.hpp"
#include "modchat/detection/prompts.hpp"

namespace modchat::detection {

namespace {

using http::Json;

std::string env_or(const char* name, std::string fallback)
{
    const char* value = std::getenv(name);
    return value && *value ? std::string(value) : std::move(fallback);
}

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return {};
    return s.substr(begin, s.find_last_not_of(" \t\r\n") - begin + 1);
}

} // namespace

RemoteConfig RemoteConfig::from_env()
{
    RemoteConfig config;
    config.base_url = env_or("MODCHAT_LLM_BASE_URL", config.base_url);
    config.api_key = env_or("MODCHAT_LLM_API_KEY", "");
    config.model = env_or("MODCHAT_LLM_MODEL", config.model);
    if (config.api_key.empty())
        throw ConfigurationError("MODCHAT_LLM_API_KEY is not set");
    const std::string timeout = env_or("MODCHAT_LLM_TIMEOUT_MS", "");
    if (!timeout.empty()) {
        char* end = nullptr;
        const long ms = std::strtol(timeout.c_str(), &end, 10);
        if (*end != '\0' || ms <= 0)
            throw ConfigurationError("MODCHAT_LLM_TIMEOUT_MS must be a positive integer");
        config.timeout = std::chrono::milliseconds(ms);
    }
    return config;
}

std::string ChatCompletionsTransport::complete(const std::string& prompt)
{
    const Json body{{"model", config_.model},
                    {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})}};
    auto client = http::make_client(config_.base_url, config_.timeout);
    const auto res = http::checked(client->Post("/v1/chat/completions",
                                                 {{"Authorization", "Bearer " + config_.api_key}},
                                                 body.dump(), "application/json"),
                                    "chat completion");
    const Json reply = Json::parse(res.body, nullptr, false);
    if (reply.is_discarded())
        throw BackendError("chat completion: response is not JSON");
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const Json::exception&) {
        throw BackendError("chat completion: response has no choices[0].message.content");
    }
}

RemoteBackend::RemoteBackend(std::shared_ptr<CompletionTransport> transport, int max_retries)
    : transport_(std::move(transport)), max_retries_(max_retries)
{
    if (!transport_)
        throw PreconditionError("remote backend needs a transport");
    if (max_retries_ < 0)
        throw PreconditionError("max_retries must be non-negative");
}

std::string RemoteBackend::complete_with_retries(const std::string& prompt)
{
    for (int attempt = 0;; ++attempt) {
        try {
            return transport_->complete(prompt);
        } catch (const BackendError&) {
            if (attempt >= max_retries_)
                throw;
        }
    }
}

Classification RemoteBackend::classify(const std::string& text)
{
    return parse_detection_reply(complete_with_retries(build_detection_prompt(text)));
}

CounterSpeech RemoteBackend::generate_counter(const CounterRequest& request)
{
    validate(request);
    std::string text = trim(complete_with_retries(build_counter_prompt(request)));
    if (text.empty())
        throw BackendError("language model returned an empty counter speech");
    auto warnings = length_warnings(text);
    return CounterSpeech{std::move(text), std::move(warnings)};
}

} // namespace modchat::detection
