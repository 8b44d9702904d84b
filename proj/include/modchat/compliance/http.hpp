#pragma once

#include <chrono>
#include <string>

#include "modchat/compliance/compliance.hpp"

namespace httplib {
class Server;
}

namespace modchat::compliance {

/// POST /compliance/check with the flat five-parameter document; answers
/// with the compact rendered verdict. Malformed requests answer 400.
void mount_compliance_routes(httplib::Server& server, ComplianceService& service);

class HttpComplianceClient : public ComplianceService {
public:
    explicit HttpComplianceClient(std::string base_url,
                                  std::chrono::milliseconds timeout = std::chrono::seconds(5));
    Verdict check(const ComplianceRequest& request) override;

private:
    std::string base_url_;
    std::chrono::milliseconds timeout_;
};

} // namespace modchat::compliance
