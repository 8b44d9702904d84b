#include "modchat/chat/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "modchat/common/errors.hpp"
#include "modchat/compliance/http.hpp"
#include "modchat/detection/http.hpp"
#include "modchat/detection/lexicon.hpp"
#include "modchat/pod/gateway.hpp"

namespace modchat::chat {

namespace {

void require_object(const Json& j, const std::string& where, const std::set<std::string>& keys)
{
    if (!j.is_object())
        throw ConfigurationError(where + " must be an object");
    for (const auto& [key, _] : j.items())
        if (!keys.count(key))
            throw ConfigurationError("unknown key " + where + "." + key);
}

template <typename T>
T field(const Json& j, const std::string& where, const char* key, T fallback)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw ConfigurationError(where + "." + key + " has the wrong type");
    }
}

std::chrono::milliseconds millis(const Json& j, const std::string& where, const char* key,
                                 std::chrono::milliseconds fallback)
{
    if (j.contains(key) && !j.at(key).is_number_integer())
        throw ConfigurationError(where + "." + key + " must be an integer");
    const auto ms = field<std::int64_t>(j, where, key, fallback.count());
    if (ms <= 0)
        throw ConfigurationError(where + "." + key + " must be positive");
    return std::chrono::milliseconds(ms);
}

int threads(const Json& j, const char* key, int fallback)
{
    const int n = field<int>(j, "listen", key, fallback);
    if (n < 1 || n > 64)
        throw ConfigurationError(std::string("listen.") + key + " must be within 1..64");
    return n;
}

} // namespace

ChatConfig parse_config(const Json& doc)
{
    require_object(doc, "config", {"listen", "requester", "pod", "detection", "compliance", "rooms", "demo_partners"});
    ChatConfig c;
    const Json empty = Json::object();

    const Json& listen = doc.contains("listen") ? doc.at("listen") : empty;
    require_object(listen, "listen", {"address", "port", "io_threads", "worker_threads"});
    c.server.address = field<std::string>(listen, "listen", "address", c.server.address);
    const int port = field<int>(listen, "listen", "port", 8080);
    if (port < 0 || port > 65535)
        throw ConfigurationError("listen.port must be within 0..65535");
    c.server.port = static_cast<unsigned short>(port);
    c.server.io_threads = threads(listen, "io_threads", c.server.io_threads);
    c.server.worker_threads = threads(listen, "worker_threads", c.server.worker_threads);

    c.requester = field<std::string>(doc, "config", "requester", c.requester);
    if (c.requester.empty())
        throw ConfigurationError("config.requester must not be empty");

    const Json& pod = doc.contains("pod") ? doc.at("pod") : empty;
    require_object(pod, "pod", {"base_url", "api_key", "timeout_ms", "revocation_retry_ms"});
    c.pod_base_url = field<std::string>(pod, "pod", "base_url", "");
    c.pod_api_key = field<std::string>(pod, "pod", "api_key", "");
    c.pod_timeout = millis(pod, "pod", "timeout_ms", c.pod_timeout);
    c.server.revocation_retry = millis(pod, "pod", "revocation_retry_ms", c.server.revocation_retry);
    if (!c.pod_base_url.empty() && c.pod_api_key.empty())
        throw ConfigurationError("pod.api_key is required with pod.base_url");

    const Json& det = doc.contains("detection") ? doc.at("detection") : empty;
    require_object(det, "detection", {"base_url", "timeout_ms"});
    c.detection_base_url = field<std::string>(det, "detection", "base_url", "");
    c.detection_timeout = millis(det, "detection", "timeout_ms", c.detection_timeout);

    const Json& comp = doc.contains("compliance") ? doc.at("compliance") : empty;
    require_object(comp, "compliance", {"base_url", "timeout_ms", "rulebase_dir", "ethical_threshold"});
    c.compliance_base_url = field<std::string>(comp, "compliance", "base_url", "");
    c.compliance_timeout = millis(comp, "compliance", "timeout_ms", c.compliance_timeout);
    c.rulebase_dir = field<std::string>(comp, "compliance", "rulebase_dir", "");
    if (comp.contains("ethical_threshold")) {
        if (!comp.at("ethical_threshold").is_number_integer())
            throw ConfigurationError("compliance.ethical_threshold must be an integer");
        c.ethical_threshold = comp.at("ethical_threshold").get<int>();
    }

    if (doc.contains("rooms")) {
        const Json& rooms = doc.at("rooms");
        if (!rooms.is_array())
            throw ConfigurationError("config.rooms must be an array");
        std::set<std::string> seen;
        for (const auto& r : rooms) {
            require_object(r, "rooms[]", {"id", "title", "minor_severity_threshold"});
            RoomInfo info;
            info.id = field<std::string>(r, "rooms[]", "id", "");
            info.title = field<std::string>(r, "rooms[]", "title", info.id);
            info.policy.minor_severity_threshold =
                field<int>(r, "rooms[]", "minor_severity_threshold", info.policy.minor_severity_threshold);
            if (info.id.empty())
                throw ConfigurationError("rooms[].id must not be empty");
            if (!seen.insert(info.id).second)
                throw ConfigurationError("duplicate room " + info.id);
            if (info.policy.minor_severity_threshold < 1 || info.policy.minor_severity_threshold > 5)
                throw ConfigurationError("rooms[].minor_severity_threshold must be within 1..5");
            c.rooms.push_back(std::move(info));
        }
    } else {
        c.rooms = demo_rooms();
    }
    c.demo_partners = field<bool>(doc, "config", "demo_partners", c.demo_partners);
    return c;
}

ChatConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigurationError("cannot read config " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const Json doc = Json::parse(buffer.str(), nullptr, false);
    if (doc.is_discarded())
        throw ConfigurationError("config " + path + " is not valid JSON");
    return parse_config(doc);
}

std::vector<RoomInfo> demo_rooms()
{
    return {
        {"athens-cafe", "Athens Cafe", {}},
        {"california-lounge", "California Lounge", {}},
        {"berlin-corner", "Berlin Corner", {}},
        {"paris-salon", "Paris Salon", {}},
    };
}

std::vector<DemoPartner> demo_partners()
{
    return {
        {"athens-cafe", "eleni", {"Eleni", 34, "gr", "el"}},
        {"california-lounge", "jake", {"Jake", 40, "us-ca", "en"}},
        {"berlin-corner", "lukas", {"Lukas", 14, "de", "de"}},
        {"paris-salon", "camille", {"Camille", 25, "fr", "fr"}},
    };
}

std::vector<std::string> install_demo_partners(
    ChatService& service,
    const std::function<std::string(const std::string&, const pod::Profile&)>& create_pod)
{
    std::set<std::string> rooms;
    for (const auto& r : service.rooms())
        rooms.insert(r.id);
    std::vector<std::string> sessions;
    for (const auto& partner : demo_partners()) {
        const std::string credential = "demo-" + partner.user_id;
        const std::string pod_id = create_pod(credential, partner.profile);
        const std::string session = service.open_session(partner.user_id, pod_id, credential, {true, true, true});
        if (rooms.count(partner.room))
            service.join(session, partner.room);
        sessions.push_back(session);
    }
    return sessions;
}

// ---------------------------------------------------------------------------

struct ChatPlatform::Parts {
    explicit Parts(ChatConfig c) : config(std::move(c))
    {
        if (config.pod_base_url.empty()) {
            store = std::make_unique<pod::PodStore>();
            pods = std::make_unique<pod::LocalPodGateway>(*store);
        } else {
            auto remote = std::make_unique<pod::HttpPodGateway>(config.pod_base_url, config.pod_api_key,
                                                                 config.pod_timeout);
            remote_pods = remote.get();
            pods = std::move(remote);
        }

        if (config.detection_base_url.empty())
            detector = std::make_unique<detection::LexiconBackend>();
        else
            detector = std::make_unique<detection::HttpDetectionBackend>(config.detection_base_url,
                                                                        config.detection_timeout);

        if (config.compliance_base_url.empty()) {
            compliance::RulebasePair pair = config.rulebase_dir.empty()
                                                ? compliance::default_rulebases()
                                                : compliance::load_rulebases(config.rulebase_dir);
            if (config.ethical_threshold)
                pair.ethical = compliance::with_ethical_threshold(pair.ethical, *config.ethical_threshold);
            checker = std::make_unique<compliance::ComplianceChecker>(std::move(pair));
        } else {
            checker = std::make_unique<compliance::HttpComplianceClient>(config.compliance_base_url,
                                                                        config.compliance_timeout);
        }

        ChatOptions options;
        options.requester = config.requester;
        service = std::make_unique<ChatService>(*pods, *detector, *checker, hub, system_now, options);
        for (const auto& room : config.rooms)
            service->add_room(room);
        server = std::make_unique<ChatServer>(*service, hub, config.server);
    }

    ChatConfig config;
    std::unique_ptr<pod::PodStore> store;
    std::unique_ptr<pod::PodGateway> pods;
    pod::HttpPodGateway* remote_pods = nullptr;
    std::unique_ptr<detection::DetectionBackend> detector;
    std::unique_ptr<compliance::ComplianceService> checker;
    SocketHub hub;
    std::unique_ptr<ChatService> service;
    std::unique_ptr<ChatServer> server;
    bool partners_installed = false;
};

ChatPlatform::ChatPlatform(ChatConfig config) : parts_(std::make_unique<Parts>(std::move(config))) {}

ChatPlatform::~ChatPlatform()
{
    stop();
}

void ChatPlatform::start()
{
    Parts& p = *parts_;
    if (p.config.demo_partners && !p.partners_installed) {
        install_demo_partners(*p.service, [&p](const std::string& credential, const pod::Profile& profile) {
            return p.store ? p.store->create_pod(credential, profile) : p.remote_pods->create_pod(credential, profile);
        });
        p.partners_installed = true;
    }
    p.server->start();
    spdlog::info("chat server listening on {}:{}", p.config.server.address, p.server->port());
}

void ChatPlatform::stop()
{
    parts_->server->stop();
}

unsigned short ChatPlatform::port() const
{
    return parts_->server->port();
}

ChatService& ChatPlatform::service()
{
    return *parts_->service;
}

SocketHub& ChatPlatform::hub()
{
    return parts_->hub;
}

pod::PodStore* ChatPlatform::local_pods()
{
    return parts_->store.get();
}

const ChatConfig& ChatPlatform::config() const
{
    return parts_->config;
}

} // namespace modchat::chat
