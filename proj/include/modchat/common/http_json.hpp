#pragma once

// JSON-over-HTTP helpers shared by the REST services and their clients.
// Requires the modchat_httplib target.

#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "modchat/common/errors.hpp"

namespace modchat::http {

using Json = nlohmann::json;

inline void reply(httplib::Response& res, int status, const Json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

inline void reply_error(httplib::Response& res, int status, const std::string& message)
{
    reply(res, status, Json{{"error", message}});
}

/// Wraps a handler so domain exceptions become JSON error responses:
/// validation 400, authentication 401, not found 404, backend 502, else 500.
inline httplib::Server::Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> f)
{
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Json::exception& e) {
            reply_error(res, 400, std::string("malformed JSON: ") + e.what());
        } catch (const ValidationError& e) {
            reply_error(res, 400, e.what());
        } catch (const PreconditionError& e) {
            reply_error(res, 400, e.what());
        } catch (const AuthenticationError& e) {
            reply_error(res, 401, e.what());
        } catch (const NotFoundError& e) {
            reply_error(res, 404, e.what());
        } catch (const BackendError& e) {
            reply_error(res, 502, e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, e.what());
        }
    };
}

inline Json parse_body(const httplib::Request& req)
{
    return Json::parse(req.body);
}

/// A client bound to `base_url` (scheme://host[:port]) with both connect and
/// read timeouts set.
inline std::unique_ptr<httplib::Client> make_client(const std::string& base_url,
                                                    std::chrono::milliseconds timeout)
{
    auto client = std::make_unique<httplib::Client>(base_url);
    if (!client->is_valid())
        throw ConfigurationError("invalid service URL " + base_url);
    client->set_connection_timeout(timeout);
    client->set_read_timeout(timeout);
    client->set_write_timeout(timeout);
    return client;
}

/// Rethrows the domain exception matching an error response; throws
/// BackendError when there was no response at all.
inline httplib::Response checked(const httplib::Result& result, const std::string& what)
{
    if (!result)
        throw BackendError(what + ": " + httplib::to_string(result.error()));
    const auto& res = *result;
    if (res.status >= 200 && res.status < 300)
        return res;
    std::string message = what + ": HTTP " + std::to_string(res.status);
    if (auto body = Json::parse(res.body, nullptr, false); body.is_object() && body.contains("error"))
        message += ": " + body["error"].get<std::string>();
    switch (res.status) {
    case 400: throw ValidationError(message);
    case 401: throw AuthenticationError(message);
    case 404: throw NotFoundError(message);
    default: throw BackendError(message);
    }
}

} // namespace modchat::http
