#include "modchat/common/http_json.hpp"
#include "modchat/pod/gateway.hpp"

namespace modchat::pod {

namespace {

using http::Json;

httplib::Params requester_params(const std::string& requester, Purpose purpose)
{
    return {{"requester", requester}, {"purpose", std::string(to_string(purpose))}};
}

} // namespace

HttpPodGateway::HttpPodGateway(std::string base_url, std::string api_key, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), timeout_(timeout)
{
}

std::string HttpPodGateway::create_pod(const std::string& owner_credential, const Profile& profile)
{
    const Json body{{"credential", owner_credential},
                    {"profile",
                     {{"name", profile.name},
                      {"age", profile.age},
                      {"country", profile.country},
                      {"language", profile.language}}}};
    auto client = http::make_client(base_url_, timeout_);
    const auto res = http::checked(client->Post("/pods", body.dump(), "application/json"), "create pod");
    return Json::parse(res.body).at("pod_id").get<std::string>();
}

std::string HttpPodGateway::export_pod(const std::string& pod_id, const std::string& owner_credential)
{
    auto client = http::make_client(base_url_, timeout_);
    return http::checked(client->Get("/pods/" + pod_id + "/export",
                                     {{"X-Owner-Credential", owner_credential}}),
                         "export pod")
        .body;
}

std::string HttpPodGateway::grant_consent(const std::string& pod_id, const std::string& owner_credential,
                                          const std::string& requester, Purpose purpose,
                                          const std::set<std::string>& attributes)
{
    const Json body{{"requester", requester},
                    {"purpose", std::string(to_string(purpose))},
                    {"attributes", attributes}};
    auto client = http::make_client(base_url_, timeout_);
    const auto res = http::checked(client->Post("/pods/" + pod_id + "/grants",
                                                 {{"X-Owner-Credential", owner_credential}},
                                                 body.dump(), "application/json"),
                                    "grant consent");
    return Json::parse(res.body).at("grant_id").get<std::string>();
}

void HttpPodGateway::revoke_consent(const std::string& pod_id, const std::string& owner_credential,
                                    const std::string& grant_id)
{
    auto client = http::make_client(base_url_, timeout_);
    http::checked(client->Delete("/pods/" + pod_id + "/grants/" + grant_id,
                                 {{"X-Owner-Credential", owner_credential}}),
                  "revoke consent");
}

std::variant<Object, Denied> HttpPodGateway::read_attribute(const std::string& pod_id,
                                                            const std::string& requester,
                                                            Purpose purpose, const std::string& predicate)
{
    auto client = http::make_client(base_url_, timeout_);
    auto result = client->Get("/pods/" + pod_id + "/attr/" + predicate, requester_params(requester, purpose),
                              {{"X-Api-Key", api_key_}});
    if (result && result->status == 403)
        return Denied{};
    const Json body = Json::parse(http::checked(result, "read attribute").body);
    const std::string kind = body.at("kind").get<std::string>();
    if (kind == "text")
        return Object{body.at("value").get<std::string>()};
    if (kind == "integer")
        return Object{body.at("value").get<std::int64_t>()};
    if (kind == "symbol")
        return Object{Symbol{body.at("value").get<std::string>()}};
    throw BackendError("read attribute: unknown value kind " + kind);
}

std::variant<bool, Denied> HttpPodGateway::is_minor(const std::string& pod_id, const std::string& requester,
                                                    Purpose purpose)
{
    auto client = http::make_client(base_url_, timeout_);
    auto result = client->Get("/pods/" + pod_id + "/minor", requester_params(requester, purpose),
                              {{"X-Api-Key", api_key_}});
    if (result && result->status == 403)
        return Denied{};
    return Json::parse(http::checked(result, "is minor").body).at("minor").get<bool>();
}

} // namespace modchat::pod
