#include "modchat/detection/http.hpp"

#include "modchat/common/http_json.hpp"

namespace modchat::detection {

namespace {

using http::Json;

Json to_json(const Classification& c)
{
    Json out{{"label", to_string(c.label)}, {"hol", to_string(c.hol)}};
    if (c.severity)
        out["severity"] = *c.severity;
    return out;
}

Classification classification_from_json(const Json& j)
{
    const std::string label = j.at("label").get<std::string>();
    const std::string hol = j.value("hol", std::string("none"));
    if (hol != "none" && hol != "hol_denial")
        throw BackendError("detection service: unknown hol value " + hol);
    if (label == "no_hate") {
        if (j.contains("severity") || hol != "none")
            throw BackendError("detection service: no_hate with severity or denial");
        return Classification::no_hate();
    }
    if (label != "hate")
        throw BackendError("detection service: unknown label " + label);
    const int severity = j.at("severity").get<int>();
    if (severity < 1 || severity > 5)
        throw BackendError("detection service: severity out of range");
    return Classification::hate(severity, hol == "hol_denial");
}

CounterRequest counter_request_from_json(const Json& j)
{
    return CounterRequest{j.at("text").get<std::string>(),
                          j.value("national_origin", std::string()),
                          j.at("language").get<std::string>(),
                          ViolationSummary{j.value("legal", false), j.value("ethical", false),
                                           j.value("reason", std::string())}};
}

} // namespace

void mount_detection_routes(httplib::Server& server, DetectionBackend& backend)
{
    server.Post("/detect", http::guarded([&backend](const httplib::Request& req, httplib::Response& res) {
                    const Json body = http::parse_body(req);
                    http::reply(res, 200, to_json(classify(body.at("text").get<std::string>(), backend)));
                }));
    server.Post("/counter", http::guarded([&backend](const httplib::Request& req, httplib::Response& res) {
                    const CounterSpeech counter =
                        generate_counter(counter_request_from_json(http::parse_body(req)), backend);
                    http::reply(res, 200, Json{{"counter", counter.text}, {"warnings", counter.warnings}});
                }));
}

HttpDetectionBackend::HttpDetectionBackend(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout)
{
}

Classification HttpDetectionBackend::classify(const std::string& text)
{
    auto client = http::make_client(base_url_, timeout_);
    const auto res = http::checked(client->Post("/detect", Json{{"text", text}}.dump(), "application/json"),
                                   "detect");
    try {
        return classification_from_json(Json::parse(res.body));
    } catch (const Json::exception& e) {
        throw BackendError(std::string("detection service: malformed reply: ") + e.what());
    }
}

CounterSpeech HttpDetectionBackend::generate_counter(const CounterRequest& request)
{
    const Json body{{"text", request.original_text},
                    {"national_origin", request.national_origin},
                    {"language", request.language},
                    {"legal", request.violation.legal},
                    {"ethical", request.violation.ethical},
                    {"reason", request.violation.reason}};
    auto client = http::make_client(base_url_, timeout_);
    const auto res = http::checked(client->Post("/counter", body.dump(), "application/json"), "counter");
    try {
        const Json reply = Json::parse(res.body);
        return CounterSpeech{reply.at("counter").get<std::string>(),
                             reply.value("warnings", std::vector<std::string>{})};
    } catch (const Json::exception& e) {
        throw BackendError(std::string("detection service: malformed reply: ") + e.what());
    }
}

} // namespace modchat::detection
