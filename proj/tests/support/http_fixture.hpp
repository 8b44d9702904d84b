#pragma once

#include <stdexcept>
#include <string>
#include <thread>

#include "httplib.h"

namespace testing_support {

/// An httplib server on an ephemeral loopback port, listening on a
/// background thread for the lifetime of the object.
class LocalServer {
public:
    LocalServer() = default;
    LocalServer(const LocalServer&) = delete;
    LocalServer& operator=(const LocalServer&) = delete;

    ~LocalServer() { stop(); }

    httplib::Server& server() { return server_; }

    /// Binds and starts listening; routes must be mounted first.
    void start()
    {
        port_ = server_.bind_to_any_port("127.0.0.1");
        if (port_ <= 0)
            throw std::runtime_error("could not bind a loopback port");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    void stop()
    {
        server_.stop();
        if (thread_.joinable())
            thread_.join();
    }

    int port() const { return port_; }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

} // namespace testing_support
