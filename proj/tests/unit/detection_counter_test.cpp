#include <gtest/gtest.h>

#include "http_fixture.hpp"
#include "json.hpp"
#include "modchat/common/errors.hpp"
#include "modchat/detection/http.hpp"
#include "modchat/detection/lexicon.hpp"
#include "modchat/detection/templates.hpp"

using namespace modchat;
using namespace modchat::detection;

namespace {

bool contains(const std::string& haystack, const std::string& needle)
{
    return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST(CounterTemplate, GreekLegalAndEthical)
{
    LexiconBackend backend;
    const CounterSpeech c =
        generate_counter({"the holocaust never happened", "gr", "el", {true, true, "Holocaust Denial"}}, backend);
    EXPECT_TRUE(contains(c.text, "Άρνηση του Ολοκαυτώματος"));
    EXPECT_TRUE(contains(c.text, "νομοθεσία της Ελλάδας"));
    EXPECT_TRUE(contains(c.text, "κοινότητάς μας"));
    EXPECT_TRUE(c.warnings.empty()) << c.warnings[0];
}

TEST(CounterTemplate, UsEthicalOnlyCitesGuidelinesOnly)
{
    LexiconBackend backend;
    const CounterSpeech c =
        generate_counter({"the holocaust never happened", "us-ca", "en", {false, true, "Holocaust Denial"}}, backend);
    EXPECT_TRUE(contains(c.text, "community guidelines"));
    EXPECT_TRUE(contains(c.text, "Holocaust Denial"));
    EXPECT_FALSE(contains(c.text, "law"));
    EXPECT_TRUE(c.warnings.empty());
}

TEST(CounterTemplate, GermanAndUnknownLanguageFallback)
{
    const std::string de = template_counter({"x", "de", "de-AT", {true, false, "hate speech"}});
    EXPECT_TRUE(contains(de, "Recht in Deutschland"));
    EXPECT_TRUE(contains(de, "Hassrede"));
    EXPECT_FALSE(contains(de, "Community-Richtlinien"));
    const std::string fr = template_counter({"x", "fr", "fr", {true, true, "hate speech"}});
    EXPECT_TRUE(contains(fr, "the law of France"));
    EXPECT_TRUE(contains(template_counter({"x", "zz", "en", {true, false, "r"}}), "the law of your country"));
}

TEST(CounterTemplate, EveryCombinationStaysWithinFiftyToHundredWords)
{
    for (const char* lang : {"en", "de", "el"})
        for (const char* origin : {"gr", "de", "at", "fr", "us-ca", "jp"})
            for (const char* reason : {"Holocaust Denial", "hate speech", "protection of minors", "spam"})
                for (int flags = 1; flags <= 3; ++flags) {
                    const ViolationSummary v{(flags & 1) != 0, (flags & 2) != 0, reason};
                    const std::string text = template_counter({"x", origin, lang, v});
                    EXPECT_TRUE(length_warnings(text).empty()) << lang << " " << origin << " " << reason;
                    EXPECT_TRUE(contains(text, localized_reason(reason, lang))) << text;
                }
    EXPECT_TRUE(length_warnings(generic_counter({true, true, "Holocaust Denial"})).empty());
}

TEST(CounterTemplate, CategoriesAreLocalized)
{
    EXPECT_EQ(localized_category({true, true, ""}, "en"), "legal and ethical violation");
    EXPECT_EQ(localized_category({false, true, ""}, "en"), "ethical violation");
    EXPECT_EQ(localized_category({true, false, ""}, "el"), "νομική παραβίαση");
    EXPECT_EQ(localized_reason("Holocaust Denial", "de"), "Holocaustleugnung");
    EXPECT_EQ(localized_reason("something else", "de"), "something else");
}

TEST(GenerateCounter, BothFlagsFalseIsPreconditionError)
{
    LexiconBackend backend;
    EXPECT_THROW(generate_counter({"x", "gr", "el", {false, false, "r"}}, backend), PreconditionError);
    EXPECT_THROW(generate_counter({"x", "gr", "", {true, false, "r"}}, backend), PreconditionError);
    EXPECT_THROW(generate_counter_or_template({"x", "gr", "el", {false, false, "r"}}, backend), PreconditionError);
}

TEST(WordCount, SplitsOnWhitespace)
{
    EXPECT_EQ(word_count(""), 0u);
    EXPECT_EQ(word_count("  one\ttwo\nthree  "), 3u);
    EXPECT_EQ(word_count("Το μήνυμά σας"), 3u);
}

class DetectionHttp : public ::testing::Test {
protected:
    void SetUp() override
    {
        mount_detection_routes(server.server(), backend);
        server.start();
    }

    LexiconBackend backend;
    testing_support::LocalServer server;
};

TEST_F(DetectionHttp, ClientMatchesLocalBackend)
{
    HttpDetectionBackend remote(server.url());
    for (const char* text : {"the holocaust never happened", "nice weather today", "shut up, idiots"})
        EXPECT_EQ(classify(text, remote), backend.classify(text)) << text;
    const CounterRequest req{"the holocaust never happened", "gr", "el", {true, true, "Holocaust Denial"}};
    EXPECT_EQ(generate_counter(req, remote).text, backend.generate_counter(req).text);
}

TEST_F(DetectionHttp, WireFormat)
{
    httplib::Client client(server.url());
    auto res = client.Post("/detect", R"({"text":"the holocaust never happened"})", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(nlohmann::json::parse(res->body),
              nlohmann::json::parse(R"({"label":"hate","severity":5,"hol":"hol_denial"})"));
    res = client.Post("/detect", R"({"text":"hello"})", "application/json");
    EXPECT_EQ(nlohmann::json::parse(res->body), nlohmann::json::parse(R"({"label":"no_hate","hol":"none"})"));

    EXPECT_EQ(client.Post("/detect", R"({"text":"  "})", "application/json")->status, 400);
    EXPECT_EQ(client.Post("/detect", "not json", "application/json")->status, 400);
    EXPECT_EQ(client.Post("/counter", R"({"text":"x","language":"el"})", "application/json")->status, 400);
    res = client.Post("/counter",
                      R"({"text":"x","national_origin":"gr","language":"el","legal":true,"ethical":false,"reason":"hate speech"})",
                      "application/json");
    ASSERT_EQ(res->status, 200);
    EXPECT_TRUE(contains(nlohmann::json::parse(res->body).at("counter").get<std::string>(), "ρητορική μίσους"));
}

TEST_F(DetectionHttp, BackendFailureIs502AndClientRaisesBackendError)
{
    struct Failing : DetectionBackend {
        Classification classify(const std::string&) override { throw BackendError("model down"); }
        CounterSpeech generate_counter(const CounterRequest&) override { throw BackendError("model down"); }
    } failing;
    testing_support::LocalServer down;
    mount_detection_routes(down.server(), failing);
    down.start();
    httplib::Client client(down.url());
    EXPECT_EQ(client.Post("/detect", R"({"text":"x"})", "application/json")->status, 502);
    HttpDetectionBackend remote(down.url());
    EXPECT_THROW(classify("x", remote), BackendError);
    HttpDetectionBackend unreachable("http://127.0.0.1:1", std::chrono::milliseconds(300));
    EXPECT_THROW(classify("x", unreachable), BackendError);
}
