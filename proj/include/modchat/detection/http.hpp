#pragma once

#include <chrono>
#include <string>

#include "modchat/detection/detection.hpp"

namespace httplib {
class Server;
}

namespace modchat::detection {

/// POST /detect  {"text"} -> {"label", "severity"?, "hol"}
/// POST /counter {"text", "national_origin", "language", "legal", "ethical",
///                "reason"} -> {"counter", "warnings"}
/// Backend failures answer 502.
void mount_detection_routes(httplib::Server& server, DetectionBackend& backend);

/// DetectionBackend that forwards to a detection service.
class HttpDetectionBackend : public DetectionBackend {
public:
    explicit HttpDetectionBackend(std::string base_url,
                                  std::chrono::milliseconds timeout = std::chrono::seconds(15));

    Classification classify(const std::string& text) override;
    CounterSpeech generate_counter(const CounterRequest& request) override;

private:
    std::string base_url_;
    std::chrono::milliseconds timeout_;
};

} // namespace modchat::detection
