#include <gtest/gtest.h>

#include "http_fixture.hpp"
#include "json.hpp"
#include "modchat/common/errors.hpp"
#include "modchat/pod/gateway.hpp"
#include "modchat/pod/http_service.hpp"

using namespace modchat;
using namespace modchat::pod;

namespace {

class PodHttp : public ::testing::Test {
protected:
    void SetUp() override
    {
        mount_pod_routes(server.server(), store, {{"platform-key", "platform"}});
        server.start();
    }

    PodStore store;
    testing_support::LocalServer server;
};

} // namespace

TEST_F(PodHttp, GatewayRoundTrip)
{
    HttpPodGateway gw(server.url(), "platform-key");
    const std::string id = gw.create_pod("anna-pw", Profile{"Anna", 14, "de", "de"});
    EXPECT_TRUE(store.contains(id));

    EXPECT_TRUE(std::holds_alternative<Denied>(gw.is_minor(id, "platform", Purpose::MinorCheck)));
    const std::string g = gw.grant_consent(id, "anna-pw", "platform", Purpose::MinorCheck,
                                           {std::string(kAge), std::string(kCountry)});
    EXPECT_EQ(gw.grant_consent(id, "anna-pw", "platform", Purpose::MinorCheck,
                               {std::string(kAge), std::string(kCountry)}),
              g);
    EXPECT_EQ(std::get<bool>(gw.is_minor(id, "platform", Purpose::MinorCheck)), true);

    gw.grant_consent(id, "anna-pw", "platform", Purpose::CounterSpeech, {std::string(kLanguage), std::string(kName)});
    EXPECT_EQ(std::get<Object>(gw.read_attribute(id, "platform", Purpose::CounterSpeech, std::string(kLanguage))),
              Object{Symbol{"de"}});
    EXPECT_EQ(std::get<Object>(gw.read_attribute(id, "platform", Purpose::CounterSpeech, std::string(kName))),
              Object{std::string("Anna")});

    gw.revoke_consent(id, "anna-pw", g);
    EXPECT_TRUE(std::holds_alternative<Denied>(gw.is_minor(id, "platform", Purpose::MinorCheck)));

    const std::string doc = gw.export_pod(id, "anna-pw");
    EXPECT_EQ(doc, store.export_pod(id, "anna-pw"));
}

TEST_F(PodHttp, ErrorsMapToDomainExceptions)
{
    HttpPodGateway gw(server.url(), "platform-key");
    EXPECT_THROW(gw.create_pod("pw", Profile{"Old", 200, "de", "de"}), ValidationError);
    const std::string id = gw.create_pod("pw", Profile{"Nikos", 34, "gr", "el"});
    EXPECT_THROW(gw.grant_consent(id, "wrong", "platform", Purpose::Moderation, {std::string(kAge)}),
                 AuthenticationError);
    EXPECT_THROW(gw.revoke_consent(id, "pw", "grant-none"), NotFoundError);
    EXPECT_THROW(gw.read_attribute("pod-none", "platform", Purpose::Moderation, std::string(kAge)), NotFoundError);

    HttpPodGateway impostor(server.url(), "stolen-key");
    EXPECT_THROW(impostor.read_attribute(id, "platform", Purpose::Moderation, std::string(kAge)),
                 AuthenticationError);
    HttpPodGateway other(server.url(), "platform-key");
    EXPECT_THROW(other.is_minor(id, "someone-else", Purpose::MinorCheck), AuthenticationError);
}

TEST_F(PodHttp, UnreachableServiceIsBackendError)
{
    const std::string url = server.url();
    server.stop();
    HttpPodGateway gw(url, "platform-key", std::chrono::milliseconds(300));
    EXPECT_THROW(gw.is_minor("pod-x", "platform", Purpose::MinorCheck), BackendError);
}

TEST_F(PodHttp, MinorResponseDisclosesOnlyTheBoolean)
{
    // Minimization: the serialized is_minor response carries a single boolean
    // and none of the raw age or country.
    httplib::Client client(server.url());
    struct Case {
        Profile profile;
        bool minor;
    };
    for (const Case& c : {Case{{"Anna", 14, "de", "de"}, true}, Case{{"Nikos", 34, "gr", "el"}, false},
                          Case{{"Cal", 16, "us-ca", "en"}, true}, Case{{"Ben", 15, "de", "de"}, false}}) {
        const std::string id = store.create_pod("pw", c.profile);
        store.grant_consent(id, "pw", "platform", Purpose::MinorCheck, {std::string(kAge), std::string(kCountry)});
        auto res = client.Get("/pods/" + id + "/minor", {{"requester", "platform"}, {"purpose", "minor_check"}},
                              {{"X-Api-Key", "platform-key"}});
        ASSERT_TRUE(res);
        ASSERT_EQ(res->status, 200);
        const auto body = nlohmann::json::parse(res->body);
        ASSERT_EQ(body, (nlohmann::json{{"minor", c.minor}}));
        EXPECT_EQ(res->body.find(std::to_string(c.profile.age)), std::string::npos);
        EXPECT_EQ(res->body.find(c.profile.country), std::string::npos);
    }
}

TEST_F(PodHttp, DeniedReadIs403WithStatusBody)
{
    const std::string id = store.create_pod("pw", Profile{"Nikos", 34, "gr", "el"});
    httplib::Client client(server.url());
    auto res = client.Get("/pods/" + id + "/attr/profile:age", {{"requester", "platform"}, {"purpose", "moderation"}},
                          {{"X-Api-Key", "platform-key"}});
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 403);
    EXPECT_EQ(nlohmann::json::parse(res->body), (nlohmann::json{{"status", "denied"}}));
    EXPECT_EQ(store.audit_log(id).size(), 1u);
}
