#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "modchat/chat/service.hpp"

namespace modchat::chat {

/// One connected session socket. send() and close() must not block.
class FrameChannel {
public:
    virtual ~FrameChannel() = default;
    virtual void send(std::string frame) = 0;
    virtual void close() = 0;
};

/// Routes frames to session sockets. Frames for a session without a socket
/// are buffered, keeping the newest `buffer_limit`, and flushed on attach.
class SocketHub : public FrameSink {
public:
    explicit SocketHub(std::size_t buffer_limit = 256) : buffer_limit_(buffer_limit) {}

    void deliver(const std::string& session_id, const Json& frame) override;

    /// Replaces (and closes) any previous socket of the session.
    void attach(const std::string& session_id, std::shared_ptr<FrameChannel> channel);
    /// Detaches `channel` if it is still the session's socket.
    void detach(const std::string& session_id, const FrameChannel* channel);
    /// Drops the buffer and closes the socket of a closed session.
    void forget(const std::string& session_id);

    std::size_t buffered(const std::string& session_id) const;
    std::size_t dropped() const;

private:
    struct Entry {
        std::shared_ptr<FrameChannel> channel;
        std::deque<std::string> buffer;
    };

    std::size_t buffer_limit_;
    mutable std::mutex mutex_;
    std::map<std::string, Entry> entries_;
    std::size_t dropped_ = 0;
};

struct ServerOptions {
    std::string address = "127.0.0.1";
    /// 0 picks an ephemeral port.
    unsigned short port = 0;
    int io_threads = 2;
    int worker_threads = 4;
    std::chrono::milliseconds revocation_retry = std::chrono::seconds(5);
};

/// HTTP API and session sockets on one port:
///
///   POST   /sessions             {user_id, pod_id, credential,
///                                 consent: {moderation, minor_check, counter_speech}}
///                                 -> 201 {session_id}
///   DELETE /sessions/{id}        -> {closed: true}
///   GET    /rooms                -> {rooms: [{id, title, minor_severity_threshold,
///                                             members, minors_present}]}
///   GET    /rooms/{id}/presence  -> {room, members, minors_present}
///   GET    /ws?session={id}      WebSocket upgrade
///
/// Each WebSocket text message is one JSON frame with a `type` field.
/// Client frames: join {room}, leave {room}, post {room, text}. Server
/// frames: message, suppressed, held, presence, error. Frames of one socket
/// are handled in arrival order.
class ChatServer {
public:
    ChatServer(ChatService& service, SocketHub& hub, ServerOptions options = {});
    ~ChatServer();
    ChatServer(const ChatServer&) = delete;
    ChatServer& operator=(const ChatServer&) = delete;

    /// Binds and starts serving on background threads. Throws
    /// ConfigurationError when the address cannot be bound.
    void start();
    void stop();
    unsigned short port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace modchat::chat
