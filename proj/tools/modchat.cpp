// modchat: runs the platform services.
//
//   modchat serve-pod        --port 7000 --api-key platform=secret
//   modchat serve-detection  --port 7100 [--remote]
//   modchat serve-compliance --port 7200 [--rulebase-dir DIR] [--ethical-threshold N]
//   modchat serve-chat       --config chat.json
//   modchat demo             --port 8080 --pod-port 8081
//
// Every service runs until SIGINT or SIGTERM.

#include <csignal>
#include <iostream>
#include <map>
#include <thread>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "httplib.h"
#include "modchat/chat/config.hpp"
#include "modchat/common/errors.hpp"
#include "modchat/compliance/http.hpp"
#include "modchat/detection/http.hpp"
#include "modchat/detection/lexicon.hpp"
#include "modchat/detection/remote.hpp"
#include "modchat/pod/http_service.hpp"

using namespace modchat;

namespace {

sigset_t termination_signals()
{
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    return set;
}

void wait_for_termination()
{
    const sigset_t set = termination_signals();
    int signal = 0;
    sigwait(&set, &signal);
    spdlog::info("received signal {}, shutting down", signal);
}

/// Serves `server` on a background thread until a termination signal.
class HttpRunner {
public:
    HttpRunner(httplib::Server& server, const std::string& address, int port) : server_(server)
    {
        if (!server_.bind_to_port(address, port))
            throw ConfigurationError("cannot listen on " + address + ":" + std::to_string(port));
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        spdlog::info("listening on {}:{}", address, port);
    }
    ~HttpRunner()
    {
        server_.stop();
        thread_.join();
    }

private:
    httplib::Server& server_;
    std::thread thread_;
};

std::map<std::string, std::string> parse_api_keys(const std::vector<std::string>& pairs)
{
    std::map<std::string, std::string> keys;
    for (const auto& pair : pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size())
            throw ConfigurationError("--api-key expects requester=key, got " + pair);
        keys[pair.substr(eq + 1)] = pair.substr(0, eq);
    }
    return keys;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Moderated chat platform services"};
    app.require_subcommand(1);

    std::string address = "127.0.0.1";
    app.add_option("--address", address, "Listen address")->capture_default_str();

    int pod_port = 7000;
    std::vector<std::string> api_keys;
    auto* pod_cmd = app.add_subcommand("serve-pod", "Personal data pod service");
    pod_cmd->add_option("--port", pod_port)->capture_default_str();
    pod_cmd->add_option("--api-key", api_keys, "requester=key, repeatable");

    int detection_port = 7100;
    bool remote = false;
    auto* det_cmd = app.add_subcommand("serve-detection", "Hate speech detection service");
    det_cmd->add_option("--port", detection_port)->capture_default_str();
    det_cmd->add_flag("--remote", remote,
                      "Prompt a chat-completions model configured by MODCHAT_LLM_* variables instead of the lexicon");

    int compliance_port = 7200;
    std::string rulebase_dir;
    std::optional<int> threshold;
    auto* comp_cmd = app.add_subcommand("serve-compliance", "Compliance checking service");
    comp_cmd->add_option("--port", compliance_port)->capture_default_str();
    comp_cmd->add_option("--rulebase-dir", rulebase_dir, "Directory with legal.rules and ethical.rules");
    comp_cmd->add_option("--ethical-threshold", threshold, "Override ethicalThreshold/1");

    std::string config_path;
    auto* chat_cmd = app.add_subcommand("serve-chat", "Chat server");
    chat_cmd->add_option("--config", config_path, "JSON configuration file")->required();

    int demo_port = 8080;
    int demo_pod_port = 8081;
    auto* demo_cmd = app.add_subcommand("demo", "Chat server with in-process backends, demo rooms and partners");
    demo_cmd->add_option("--port", demo_port)->capture_default_str();
    demo_cmd->add_option("--pod-port", demo_pod_port, "Pod service sharing the chat server's store")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    // Worker threads inherit the mask; only sigwait sees the signals.
    const sigset_t signals = termination_signals();
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    try {
        if (*pod_cmd) {
            pod::PodStore store;
            httplib::Server server;
            pod::mount_pod_routes(server, store, parse_api_keys(api_keys));
            HttpRunner runner(server, address, pod_port);
            wait_for_termination();
        } else if (*det_cmd) {
            std::unique_ptr<detection::DetectionBackend> backend;
            if (remote)
                backend = std::make_unique<detection::RemoteBackend>(
                    std::make_shared<detection::ChatCompletionsTransport>(detection::RemoteConfig::from_env()));
            else
                backend = std::make_unique<detection::LexiconBackend>();
            httplib::Server server;
            detection::mount_detection_routes(server, *backend);
            HttpRunner runner(server, address, detection_port);
            wait_for_termination();
        } else if (*comp_cmd) {
            compliance::RulebasePair pair =
                rulebase_dir.empty() ? compliance::default_rulebases() : compliance::load_rulebases(rulebase_dir);
            if (threshold)
                pair.ethical = compliance::with_ethical_threshold(pair.ethical, *threshold);
            compliance::ComplianceChecker checker(std::move(pair));
            httplib::Server server;
            compliance::mount_compliance_routes(server, checker);
            HttpRunner runner(server, address, compliance_port);
            wait_for_termination();
        } else if (*chat_cmd) {
            chat::ChatPlatform platform(chat::load_config(config_path));
            platform.start();
            wait_for_termination();
        } else if (*demo_cmd) {
            chat::ChatConfig config;
            config.server.address = address;
            config.server.port = static_cast<unsigned short>(demo_port);
            config.rooms = chat::demo_rooms();
            chat::ChatPlatform platform(config);
            httplib::Server pods;
            pod::mount_pod_routes(pods, *platform.local_pods(), {});
            HttpRunner pod_runner(pods, address, demo_pod_port);
            platform.start();
            wait_for_termination();
        }
    } catch (const ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
