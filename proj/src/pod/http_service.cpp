#include "modchat/pod/http_service.hpp"

#include "modchat/common/http_json.hpp"

namespace modchat::pod {

namespace {

using http::Json;

Json object_json(const Object& o)
{
    if (const auto* text = std::get_if<std::string>(&o))
        return Json{{"value", *text}, {"kind", "text"}};
    if (const auto* n = std::get_if<std::int64_t>(&o))
        return Json{{"value", *n}, {"kind", "integer"}};
    return Json{{"value", std::get<Symbol>(o).name}, {"kind", "symbol"}};
}

std::string owner_credential(const httplib::Request& req)
{
    if (!req.has_header("X-Owner-Credential"))
        throw AuthenticationError("missing X-Owner-Credential header");
    return req.get_header_value("X-Owner-Credential");
}

Purpose purpose_param(const httplib::Request& req)
{
    auto p = parse_purpose(req.get_param_value("purpose"));
    if (!p)
        throw ValidationError("unknown purpose '" + req.get_param_value("purpose") + "'");
    return *p;
}

} // namespace

void mount_pod_routes(httplib::Server& server, PodStore& store,
                      std::map<std::string, std::string> api_keys)
{
    // The requester named in the query must be the party owning the API key.
    auto requester_of = [keys = std::move(api_keys)](const httplib::Request& req) {
        const std::string requester = req.get_param_value("requester");
        auto it = keys.find(req.get_header_value("X-Api-Key"));
        if (it == keys.end() || it->second != requester)
            throw AuthenticationError("API key does not belong to requester '" + requester + "'");
        return requester;
    };

    server.Post("/pods", http::guarded([&store](const httplib::Request& req, httplib::Response& res) {
        const Json body = http::parse_body(req);
        const Json& p = body.at("profile");
        Profile profile{p.at("name").get<std::string>(), p.at("age").get<std::int64_t>(),
                        p.at("country").get<std::string>(), p.at("language").get<std::string>()};
        http::reply(res, 201,
                    Json{{"pod_id", store.create_pod(body.at("credential").get<std::string>(), profile)}});
    }));

    server.Post("/pods/import", http::guarded([&store](const httplib::Request& req, httplib::Response& res) {
        http::reply(res, 201, Json{{"pod_id", store.import_pod(req.body, owner_credential(req))}});
    }));

    server.Post("/pods/:id/grants",
                http::guarded([&store](const httplib::Request& req, httplib::Response& res) {
                    const Json body = http::parse_body(req);
                    auto purpose = parse_purpose(body.at("purpose").get<std::string>());
                    if (!purpose)
                        throw ValidationError("unknown purpose " + body.at("purpose").dump());
                    const auto attributes = body.at("attributes").get<std::set<std::string>>();
                    const std::string id =
                        store.grant_consent(req.path_params.at("id"), owner_credential(req),
                                            body.at("requester").get<std::string>(), *purpose, attributes);
                    http::reply(res, 201, Json{{"grant_id", id}});
                }));

    server.Delete("/pods/:id/grants/:gid",
                  http::guarded([&store](const httplib::Request& req, httplib::Response& res) {
                      store.revoke_consent(req.path_params.at("id"), owner_credential(req),
                                           req.path_params.at("gid"));
                      http::reply(res, 200, Json{{"revoked", true}});
                  }));

    server.Get("/pods/:id/attr/:predicate",
               http::guarded([&store, requester_of](const httplib::Request& req, httplib::Response& res) {
                   auto result = store.read_attribute(req.path_params.at("id"), requester_of(req),
                                                      purpose_param(req), req.path_params.at("predicate"));
                   if (std::holds_alternative<Denied>(result))
                       http::reply(res, 403, Json{{"status", "denied"}});
                   else
                       http::reply(res, 200, object_json(std::get<Object>(result)));
               }));

    server.Get("/pods/:id/minor",
               http::guarded([&store, requester_of](const httplib::Request& req, httplib::Response& res) {
                   auto result = store.is_minor(req.path_params.at("id"), requester_of(req), purpose_param(req));
                   if (std::holds_alternative<Denied>(result))
                       http::reply(res, 403, Json{{"status", "denied"}});
                   else
                       http::reply(res, 200, Json{{"minor", std::get<bool>(result)}});
               }));

    server.Get("/pods/:id/export", http::guarded([&store](const httplib::Request& req, httplib::Response& res) {
        res.status = 200;
        res.set_content(store.export_pod(req.path_params.at("id"), owner_credential(req)),
                        "text/plain; charset=utf-8");
    }));
}

} // namespace modchat::pod
