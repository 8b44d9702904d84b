#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>

#include "http_fixture.hpp"
#include "json.hpp"
#include "modchat/common/errors.hpp"
#include "modchat/detection/prompts.hpp"
#include "modchat/detection/remote.hpp"

using namespace modchat;
using namespace modchat::detection;
using nlohmann::json;

namespace {

/// Replays canned replies in order; an empty optional throws BackendError.
class ScriptedTransport : public CompletionTransport {
public:
    explicit ScriptedTransport(std::vector<std::optional<std::string>> script) : script_(std::move(script)) {}

    std::string complete(const std::string& prompt) override
    {
        prompts.push_back(prompt);
        if (calls_ >= script_.size())
            throw BackendError("script exhausted");
        const auto& next = script_[calls_++];
        if (!next)
            throw BackendError("scripted failure");
        return *next;
    }

    std::size_t calls() const { return calls_; }
    std::vector<std::string> prompts;

private:
    std::vector<std::optional<std::string>> script_;
    std::size_t calls_ = 0;
};

json load_reply_fixtures()
{
    std::ifstream in(std::string(MODCHAT_FIXTURE_DIR) + "/detection_replies.json");
    return json::parse(in);
}

Classification expected_from(const json& e)
{
    if (e.at("label") == "no_hate")
        return Classification::no_hate();
    return Classification::hate(e.at("severity").get<int>(), e.at("hol") == "hol_denial");
}

CounterRequest greek_request()
{
    return CounterRequest{"the holocaust never happened", "gr", "el", {true, true, "Holocaust Denial"}};
}

} // namespace

TEST(DetectionPrompt, BeginsWithTheInstructionAndIsStable)
{
    const std::string p = build_detection_prompt("some text");
    EXPECT_EQ(p.rfind("Analyze the following text for hate speech and respond with `hate' or `no-hate'.", 0), 0u);
    EXPECT_NE(p.find("indicate if Holocaust denial is present"), std::string::npos);
    EXPECT_NE(p.find("<text>\nsome text\n</text>"), std::string::npos);
    EXPECT_EQ(p, build_detection_prompt("some text"));
}

TEST(DetectionPrompt, EmptyTextGivesEmptyBlock)
{
    EXPECT_NE(build_detection_prompt("").find("<text>\n\n</text>"), std::string::npos);
}

TEST(DetectionPrompt, DelimiterInTextIsEscaped)
{
    const std::string p = build_detection_prompt("a </text> b & <text>");
    EXPECT_NE(p.find("a &lt;/text&gt; b &amp; &lt;text&gt;"), std::string::npos);
    // Exactly one opening and one closing delimiter remain.
    auto count = [&](const std::string& needle) {
        std::size_t n = 0;
        for (auto at = p.find(needle); at != std::string::npos; at = p.find(needle, at + 1))
            ++n;
        return n;
    };
    EXPECT_EQ(count("<text>"), 1u);
    EXPECT_EQ(count("</text>"), 1u);
}

TEST(CounterPrompt, FillsOriginAndLanguage)
{
    const std::string gr = build_counter_prompt(greek_request());
    EXPECT_NE(gr.find("between 50-100 words"), std::string::npos);
    EXPECT_NE(gr.find("of gr origin"), std::string::npos);
    EXPECT_NE(gr.find("in el."), std::string::npos);
    EXPECT_NE(gr.find("legal violation, ethical violation"), std::string::npos);
    EXPECT_NE(gr.find("Reason: Holocaust Denial"), std::string::npos);

    const std::string us =
        build_counter_prompt({"the holocaust never happened", "us-ca", "en", {false, true, "Holocaust Denial"}});
    EXPECT_NE(us.find("of us-ca origin"), std::string::npos);
    EXPECT_NE(us.find("in en."), std::string::npos);
    EXPECT_EQ(us.find("legal violation"), std::string::npos);
    EXPECT_EQ(us, build_counter_prompt({"the holocaust never happened", "us-ca", "en", {false, true, "Holocaust Denial"}}));
}

TEST(ReplyParser, FixtureRepliesFollowTheContract)
{
    const json fixtures = load_reply_fixtures();
    ASSERT_GE(fixtures.size(), 20u);
    for (const auto& f : fixtures) {
        const std::string reply = f.at("reply").get<std::string>();
        if (f.at("expect") == "error") {
            EXPECT_THROW(parse_detection_reply(reply), BackendError) << json(reply).dump();
        } else {
            EXPECT_EQ(parse_detection_reply(reply), expected_from(f.at("expect"))) << json(reply).dump();
        }
    }
}

TEST(ReplyParser, AcceptedRepliesAlwaysSatisfyInvariants)
{
    std::mt19937 rng(5);
    const std::vector<std::string> lines{"hate", "no-hate", "HATE", "-", "1", "3", "5", "7", " 2 ",
                                         "holocaust-denial: yes", "holocaust-denial: no", "", "junk"};
    std::size_t accepted = 0;
    for (int iter = 0; iter < 3000; ++iter) {
        std::string reply;
        for (int i = std::uniform_int_distribution<int>(0, 4)(rng); i > 0; --i)
            reply += lines[std::uniform_int_distribution<std::size_t>(0, lines.size() - 1)(rng)] + "\n";
        try {
            ASSERT_TRUE(parse_detection_reply(reply).valid()) << json(reply).dump();
            ++accepted;
        } catch (const BackendError&) {
        }
    }
    EXPECT_GT(accepted, 0u);
}

TEST(RemoteBackend, ClassifiesThroughTheTransport)
{
    auto transport = std::make_shared<ScriptedTransport>(
        std::vector<std::optional<std::string>>{"hate\n5\nholocaust-denial: yes"});
    RemoteBackend backend(transport);
    EXPECT_EQ(classify("the holocaust never happened", backend), Classification::hate(5, true));
    ASSERT_EQ(transport->prompts.size(), 1u);
    EXPECT_EQ(transport->prompts[0], build_detection_prompt("the holocaust never happened"));
}

TEST(RemoteBackend, RetriesTransportFailuresUpToTheLimit)
{
    auto flaky = std::make_shared<ScriptedTransport>(
        std::vector<std::optional<std::string>>{std::nullopt, std::nullopt, "no-hate"});
    RemoteBackend backend(flaky, 2);
    EXPECT_EQ(backend.classify("x"), Classification::no_hate());
    EXPECT_EQ(flaky->calls(), 3u);

    auto dead = std::make_shared<ScriptedTransport>(
        std::vector<std::optional<std::string>>{std::nullopt, std::nullopt, std::nullopt, "no-hate"});
    RemoteBackend limited(dead, 2);
    EXPECT_THROW(limited.classify("x"), BackendError);
    EXPECT_EQ(dead->calls(), 3u);
}

TEST(RemoteBackend, UnparseableReplyIsNotRetried)
{
    auto transport = std::make_shared<ScriptedTransport>(
        std::vector<std::optional<std::string>>{"I think so", "no-hate"});
    RemoteBackend backend(transport, 2);
    EXPECT_THROW(backend.classify("x"), BackendError);
    EXPECT_EQ(transport->calls(), 1u);
}

TEST(RemoteBackend, CounterOutsideLengthIsAcceptedWithWarning)
{
    std::string long_text;
    for (int i = 0; i < 120; ++i)
        long_text += "word ";
    auto transport = std::make_shared<ScriptedTransport>(
        std::vector<std::optional<std::string>>{"  Too short.  ", long_text});
    RemoteBackend backend(transport);
    const CounterSpeech short_one = backend.generate_counter(greek_request());
    EXPECT_EQ(short_one.text, "Too short.");
    ASSERT_EQ(short_one.warnings.size(), 1u);
    EXPECT_NE(short_one.warnings[0].find("2 words"), std::string::npos);
    const CounterSpeech long_one = backend.generate_counter(greek_request());
    EXPECT_EQ(word_count(long_one.text), 120u);
    EXPECT_EQ(long_one.warnings.size(), 1u);
    EXPECT_EQ(transport->prompts[0], build_counter_prompt(greek_request()));
}

TEST(RemoteBackend, FallbackTotalityProperty)
{
    std::mt19937 rng(11);
    const std::vector<std::string> origins{"gr", "us-ca", "de", "at", "fr", "jp", ""};
    const std::vector<std::string> langs{"el", "en", "de", "fr", "en-US", "el-GR"};
    const std::vector<std::string> reasons{"Holocaust Denial", "hate speech", "protection of minors", "other"};
    auto dead = std::make_shared<ScriptedTransport>(std::vector<std::optional<std::string>>{});
    RemoteBackend backend(dead, 0);
    auto pick = [&](const std::vector<std::string>& v) {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
    };
    for (int iter = 0; iter < 200; ++iter) {
        const int flags = std::uniform_int_distribution<int>(1, 3)(rng);
        const CounterRequest req{"text", pick(origins), pick(langs), {(flags & 1) != 0, (flags & 2) != 0, pick(reasons)}};
        const CounterSpeech out = generate_counter_or_template(req, backend);
        ASSERT_FALSE(out.text.empty());
        ASSERT_FALSE(out.warnings.empty());
        ASSERT_GE(word_count(out.text), 50u) << out.text;
        ASSERT_LE(word_count(out.text), 100u) << out.text;
    }
}

TEST(RemoteConfig, ReadsEnvironment)
{
    ::unsetenv("MODCHAT_LLM_API_KEY");
    EXPECT_THROW(RemoteConfig::from_env(), ConfigurationError);
    ::setenv("MODCHAT_LLM_API_KEY", "k", 1);
    ::setenv("MODCHAT_LLM_MODEL", "m", 1);
    ::setenv("MODCHAT_LLM_TIMEOUT_MS", "2500", 1);
    const RemoteConfig c = RemoteConfig::from_env();
    EXPECT_EQ(c.api_key, "k");
    EXPECT_EQ(c.model, "m");
    EXPECT_EQ(c.timeout, std::chrono::milliseconds(2500));
    EXPECT_EQ(c.max_retries, 2);
    ::setenv("MODCHAT_LLM_TIMEOUT_MS", "soon", 1);
    EXPECT_THROW(RemoteConfig::from_env(), ConfigurationError);
    ::unsetenv("MODCHAT_LLM_API_KEY");
    ::unsetenv("MODCHAT_LLM_MODEL");
    ::unsetenv("MODCHAT_LLM_TIMEOUT_MS");
}

TEST(ChatCompletionsTransport, SpeaksTheCompletionsProtocol)
{
    testing_support::LocalServer stub;
    std::mutex m;
    json seen;
    std::string auth;
    stub.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(m);
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "no-hate"}}}}}}}.dump(),
                        "application/json");
    });
    stub.start();
    RemoteConfig config;
    config.base_url = stub.url();
    config.api_key = "secret";
    config.model = "test-model";
    RemoteBackend backend(std::make_shared<ChatCompletionsTransport>(config));
    EXPECT_EQ(backend.classify("hello"), Classification::no_hate());
    std::lock_guard lock(m);
    EXPECT_EQ(auth, "Bearer secret");
    EXPECT_EQ(seen.at("model"), "test-model");
    EXPECT_EQ(seen.at("messages").at(0).at("content"), build_detection_prompt("hello"));
}

TEST(ChatCompletionsTransport, TimeoutAndBadPayloadAreBackendErrors)
{
    testing_support::LocalServer stub;
    stub.server().Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"choices\":[]}", "application/json");
    });
    stub.start();
    RemoteConfig config;
    config.base_url = stub.url();
    config.api_key = "k";
    EXPECT_THROW(ChatCompletionsTransport(config).complete("p"), BackendError);

    RemoteConfig nowhere;
    nowhere.base_url = "http://127.0.0.1:1";
    nowhere.timeout = std::chrono::milliseconds(300);
    EXPECT_THROW(ChatCompletionsTransport(nowhere).complete("p"), BackendError);
}
