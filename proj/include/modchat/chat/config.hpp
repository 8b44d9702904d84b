#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modchat/chat/server.hpp"
#include "modchat/chat/service.hpp"
#include "modchat/pod/pod_store.hpp"

namespace modchat::chat {

/// Configuration of a chat server process, read from a JSON document:
///
///   {
///     "listen":     {"address": "127.0.0.1", "port": 8080,
///                    "io_threads": 2, "worker_threads": 4},
///     "requester":  "platform",
///     "pod":        {"base_url": "", "api_key": "", "timeout_ms": 5000,
///                    "revocation_retry_ms": 5000},
///     "detection":  {"base_url": "", "timeout_ms": 15000},
///     "compliance": {"base_url": "", "timeout_ms": 5000,
///                    "rulebase_dir": "", "ethical_threshold": 3},
///     "rooms":      [{"id": "...", "title": "...", "minor_severity_threshold": 4}],
///     "demo_partners": true
///   }
///
/// Every key is optional. An empty base_url selects the in-process
/// implementation: a local pod store, the lexicon classifier, the embedded
/// (or `rulebase_dir`) rulebases. Omitted `rooms` means the four demo rooms.
/// `ethical_threshold` only applies to the in-process compliance checker.
struct ChatConfig {
    ServerOptions server;
    std::string requester = "platform";

    std::string pod_base_url;
    std::string pod_api_key;
    std::chrono::milliseconds pod_timeout{5000};

    std::string detection_base_url;
    std::chrono::milliseconds detection_timeout{15000};

    std::string compliance_base_url;
    std::chrono::milliseconds compliance_timeout{5000};
    std::string rulebase_dir;
    std::optional<int> ethical_threshold;

    std::vector<RoomInfo> rooms;
    bool demo_partners = true;
};

/// ConfigurationError on unknown keys, wrong types or out-of-range values.
ChatConfig parse_config(const Json& document);
ChatConfig load_config(const std::string& path);

std::vector<RoomInfo> demo_rooms();

/// A virtual chat partner seated in one demo room.
struct DemoPartner {
    std::string room;
    std::string user_id;
    pod::Profile profile;
};

std::vector<DemoPartner> demo_partners();

/// Creates a pod per partner through `create_pod(credential, profile)`,
/// opens a fully consenting session and joins the partner's room when that
/// room exists. Returns the session ids.
std::vector<std::string> install_demo_partners(
    ChatService& service,
    const std::function<std::string(const std::string&, const pod::Profile&)>& create_pod);

/// The assembled chat server: backends chosen by the configuration, the
/// service, its socket hub and the network front end.
class ChatPlatform {
public:
    explicit ChatPlatform(ChatConfig config);
    ~ChatPlatform();
    ChatPlatform(const ChatPlatform&) = delete;
    ChatPlatform& operator=(const ChatPlatform&) = delete;

    /// Installs the demo partners (when configured) and starts serving.
    void start();
    void stop();
    unsigned short port() const;

    ChatService& service();
    SocketHub& hub();
    /// The in-process pod store, or null when pods are remote.
    pod::PodStore* local_pods();
    const ChatConfig& config() const;

private:
    struct Parts;
    std::unique_ptr<Parts> parts_;
};

} // namespace modchat::chat
