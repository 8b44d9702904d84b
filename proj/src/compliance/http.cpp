#include "modchat/compliance/http.hpp"

#include "modchat/common/http_json.hpp"

namespace modchat::compliance {

using http::Json;

void mount_compliance_routes(httplib::Server& server, ComplianceService& service)
{
    server.Post("/compliance/check",
                http::guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    const Verdict verdict = service.check(request_from_json(http::parse_body(req)));
                    res.status = 200;
                    res.set_content(render(verdict), "application/json");
                }));
}

HttpComplianceClient::HttpComplianceClient(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout)
{
}

Verdict HttpComplianceClient::check(const ComplianceRequest& request)
{
    validate(request);
    auto client = http::make_client(base_url_, timeout_);
    const auto res = http::checked(
        client->Post("/compliance/check", to_json(request).dump(), "application/json"), "compliance check");
    try {
        return parse_verdict(res.body);
    } catch (const ValidationError& e) {
        throw BackendError(std::string("compliance service: ") + e.what());
    }
}

} // namespace modchat::compliance
