#include "modchat/chat/server.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <optional>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "modchat/common/errors.hpp"

namespace modchat::chat {

// ---------------------------------------------------------------------------
// SocketHub

void SocketHub::deliver(const std::string& session_id, const Json& frame)
{
    std::string text = frame.dump();
    std::lock_guard lock(mutex_);
    Entry& entry = entries_[session_id];
    if (entry.channel) {
        entry.channel->send(std::move(text));
        return;
    }
    entry.buffer.push_back(std::move(text));
    while (entry.buffer.size() > buffer_limit_) {
        entry.buffer.pop_front();
        ++dropped_;
    }
}

void SocketHub::attach(const std::string& session_id, std::shared_ptr<FrameChannel> channel)
{
    std::lock_guard lock(mutex_);
    Entry& entry = entries_[session_id];
    if (entry.channel && entry.channel != channel)
        entry.channel->close();
    entry.channel = std::move(channel);
    for (auto& frame : entry.buffer)
        entry.channel->send(std::move(frame));
    entry.buffer.clear();
}

void SocketHub::detach(const std::string& session_id, const FrameChannel* channel)
{
    std::lock_guard lock(mutex_);
    auto it = entries_.find(session_id);
    if (it != entries_.end() && it->second.channel.get() == channel)
        it->second.channel.reset();
}

void SocketHub::forget(const std::string& session_id)
{
    std::shared_ptr<FrameChannel> channel;
    {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(session_id);
        if (it == entries_.end())
            return;
        channel = std::move(it->second.channel);
        entries_.erase(it);
    }
    if (channel)
        channel->close();
}

std::size_t SocketHub::buffered(const std::string& session_id) const
{
    std::lock_guard lock(mutex_);
    auto it = entries_.find(session_id);
    return it == entries_.end() ? 0 : it->second.buffer.size();
}

std::size_t SocketHub::dropped() const
{
    std::lock_guard lock(mutex_);
    return dropped_;
}

// ---------------------------------------------------------------------------
// ChatServer

namespace {

namespace beast = boost::beast;
namespace bhttp = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

using Request = bhttp::request<bhttp::string_body>;
using Response = bhttp::response<bhttp::string_body>;

constexpr std::size_t kMaxBodyBytes = 64 * 1024;

struct Reply {
    unsigned status = 200;
    Json body = Json::object();
};

struct Target {
    std::vector<std::string> segments;
    std::map<std::string, std::string> query;
};

Target parse_target(std::string_view target)
{
    Target out;
    const std::size_t q = target.find('?');
    std::string_view path = target.substr(0, q);
    std::size_t start = 0;
    while (start < path.size()) {
        const std::size_t end = std::min(path.find('/', start), path.size());
        if (end > start)
            out.segments.emplace_back(path.substr(start, end - start));
        start = end + 1;
    }
    if (q != std::string_view::npos) {
        std::string_view rest = target.substr(q + 1);
        while (!rest.empty()) {
            const std::size_t amp = rest.find('&');
            std::string_view pair = rest.substr(0, amp);
            const std::size_t eq = pair.find('=');
            out.query[std::string(pair.substr(0, eq))] =
                eq == std::string_view::npos ? std::string() : std::string(pair.substr(eq + 1));
            rest = amp == std::string_view::npos ? std::string_view() : rest.substr(amp + 1);
        }
    }
    return out;
}

unsigned refusal_status(const std::string& code)
{
    if (code == "invalid_credential")
        return 401;
    if (code == "unknown_pod")
        return 404;
    if (code == "pod_unreachable")
        return 502;
    return 403;
}

Reply error_reply(unsigned status, const std::string& message)
{
    return Reply{status, Json{{"error", message}}};
}

} // namespace

class WsConnection;

// Connections refer to the server state through this base of ChatServer::Impl.

struct ServerCore {
    ServerCore(ChatService& s, SocketHub& h, ServerOptions o)
        : service(s), hub(h), options(std::move(o)), workers(static_cast<std::size_t>(std::max(1, options.worker_threads)))
    {
    }

    Response handle(const Request& req);
    Reply route(const Request& req);
    void handle_frame(const std::string& session_id, const std::string& text);
    void do_accept();
    void track(const std::shared_ptr<WsConnection>& c);

    ChatService& service;
    SocketHub& hub;
    ServerOptions options;

    net::io_context ioc;
    std::optional<net::executor_work_guard<net::io_context::executor_type>> work;
    tcp::acceptor acceptor{ioc};
    net::thread_pool workers;
    std::vector<std::thread> io_threads;
    unsigned short bound_port = 0;
    std::atomic<bool> running{false};

    std::mutex connections_mutex;
    std::vector<std::pair<std::string, std::weak_ptr<WsConnection>>> connections;

    std::thread retry_thread;
    std::mutex retry_mutex;
    std::condition_variable retry_cv;
    bool retry_stop = false;
};

class WsConnection : public FrameChannel, public std::enable_shared_from_this<WsConnection> {
public:
    WsConnection(tcp::socket&& socket, ServerCore& server, std::string session_id)
        : ws_(std::move(socket)), server_(server), session_id_(std::move(session_id))
    {
    }

    void run(Request req)
    {
        req_ = std::move(req);
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.read_message_max(kMaxBodyBytes);
        ws_.async_accept(req_, beast::bind_front_handler(&WsConnection::on_accept, shared_from_this()));
    }

    void send(std::string frame) override
    {
        net::post(ws_.get_executor(), [self = shared_from_this(), frame = std::move(frame)]() mutable {
            if (self->closed_)
                return;
            self->queue_.push_back(std::move(frame));
            if (self->queue_.size() == 1)
                self->do_write();
        });
    }

    void close() override
    {
        net::post(ws_.get_executor(), [self = shared_from_this()] {
            self->closing_ = true;
            if (self->queue_.empty())
                self->do_close();
        });
    }

    const std::string& session_id() const { return session_id_; }

private:
    void on_accept(beast::error_code ec)
    {
        if (ec)
            return;
        server_.track(shared_from_this());
        server_.hub.attach(session_id_, shared_from_this());
        do_read();
    }

    void do_read()
    {
        ws_.async_read(buffer_, beast::bind_front_handler(&WsConnection::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t)
    {
        if (ec) {
            server_.hub.detach(session_id_, this);
            return;
        }
        std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        // Frames of one socket are handled one at a time, in arrival order.
        net::post(server_.workers, [self = shared_from_this(), text = std::move(text)] {
            self->server_.handle_frame(self->session_id_, text);
            net::post(self->ws_.get_executor(), [self] { self->do_read(); });
        });
    }

    void do_write()
    {
        ws_.text(true);
        ws_.async_write(net::buffer(queue_.front()),
                        beast::bind_front_handler(&WsConnection::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t)
    {
        if (ec) {
            queue_.clear();
            return;
        }
        queue_.pop_front();
        if (!queue_.empty())
            do_write();
        else if (closing_)
            do_close();
    }

    void do_close()
    {
        if (closed_)
            return;
        closed_ = true;
        ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
    }

    websocket::stream<beast::tcp_stream> ws_;
    ServerCore& server_;
    std::string session_id_;
    Request req_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    bool closing_ = false;
    bool closed_ = false;
};

namespace {

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
public:
    HttpConnection(tcp::socket&& socket, ServerCore& server) : stream_(std::move(socket)), server_(server) {}

    void run()
    {
        net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpConnection::do_read, shared_from_this()));
    }

private:
    void do_read()
    {
        parser_.emplace();
        parser_->body_limit(kMaxBodyBytes);
        stream_.expires_after(std::chrono::seconds(30));
        bhttp::async_read(stream_, buffer_, *parser_,
                          beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t)
    {
        if (ec == bhttp::error::end_of_stream)
            return do_close();
        if (ec)
            return;
        Request req = parser_->release();
        if (websocket::is_upgrade(req))
            return upgrade(std::move(req));
        net::post(server_.workers, [self = shared_from_this(), req = std::move(req)] {
            Response res = self->server_.handle(req);
            net::post(self->stream_.get_executor(), [self, res = std::move(res)]() mutable {
                self->write(std::move(res));
            });
        });
    }

    void upgrade(Request req)
    {
        const Target target = parse_target(std::string_view(req.target().data(), req.target().size()));
        auto it = target.query.find("session");
        if (target.segments != std::vector<std::string>{"ws"} || it == target.query.end() ||
            !server_.service.session_open(it->second)) {
            Response res{bhttp::status::not_found, req.version()};
            res.set(bhttp::field::content_type, "application/json");
            res.keep_alive(false);
            res.body() = Json{{"error", "unknown session"}}.dump();
            res.prepare_payload();
            return write(std::move(res));
        }
        stream_.expires_never();
        std::make_shared<WsConnection>(stream_.release_socket(), server_, it->second)->run(std::move(req));
    }

    void write(Response res)
    {
        auto message = std::make_shared<Response>(std::move(res));
        bhttp::async_write(stream_, *message, [self = shared_from_this(), message](beast::error_code ec, std::size_t) {
            if (ec)
                return;
            if (message->need_eof())
                return self->do_close();
            self->do_read();
        });
    }

    void do_close()
    {
        beast::error_code ec;
        stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    }

    beast::tcp_stream stream_;
    ServerCore& server_;
    beast::flat_buffer buffer_;
    std::optional<bhttp::request_parser<bhttp::string_body>> parser_;
};

} // namespace

void ServerCore::track(const std::shared_ptr<WsConnection>& c)
{
    std::lock_guard lock(connections_mutex);
    connections.erase(std::remove_if(connections.begin(), connections.end(),
                                     [](const auto& entry) { return entry.second.expired(); }),
                      connections.end());
    connections.emplace_back(c->session_id(), c);
}

Response ServerCore::handle(const Request& req)
{
    Reply reply;
    try {
        reply = route(req);
    } catch (const SessionRefused& e) {
        reply = Reply{refusal_status(e.code()), Json{{"error", e.what()}, {"code", e.code()}}};
    } catch (const Json::exception& e) {
        reply = error_reply(400, std::string("malformed JSON: ") + e.what());
    } catch (const ValidationError& e) {
        reply = error_reply(400, e.what());
    } catch (const PreconditionError& e) {
        reply = error_reply(409, e.what());
    } catch (const NotFoundError& e) {
        reply = error_reply(404, e.what());
    } catch (const BackendError& e) {
        reply = error_reply(502, e.what());
    } catch (const std::exception& e) {
        reply = error_reply(500, e.what());
    }
    Response res{static_cast<bhttp::status>(reply.status), req.version()};
    res.set(bhttp::field::content_type, "application/json");
    res.set(bhttp::field::access_control_allow_origin, "*");
    res.keep_alive(req.keep_alive());
    if (reply.status != 204)
        res.body() = reply.body.dump();
    res.prepare_payload();
    return res;
}

Reply ServerCore::route(const Request& req)
{
    const Target target = parse_target(std::string_view(req.target().data(), req.target().size()));
    const auto& seg = target.segments;
    const auto method = req.method();

    if (method == bhttp::verb::options)
        return Reply{204, {}};
    if (seg == std::vector<std::string>{"health"})
        return Reply{200, Json{{"status", "ok"}}};

    if (!seg.empty() && seg[0] == "sessions") {
        if (seg.size() == 1 && method == bhttp::verb::post) {
            const Json body = Json::parse(req.body());
            const Json consent = body.value("consent", Json::object());
            const ConsentBundle bundle{consent.value("moderation", false), consent.value("minor_check", false),
                                       consent.value("counter_speech", false)};
            const std::string id =
                service.open_session(body.at("user_id").get<std::string>(), body.at("pod_id").get<std::string>(),
                                     body.at("credential").get<std::string>(), bundle);
            return Reply{201, Json{{"session_id", id}}};
        }
        if (seg.size() == 2 && method == bhttp::verb::delete_) {
            service.close_session(seg[1]);
            hub.forget(seg[1]);
            return Reply{200, Json{{"closed", true}}};
        }
        return error_reply(405, "method not allowed");
    }

    if (!seg.empty() && seg[0] == "rooms" && method == bhttp::verb::get) {
        if (seg.size() == 1) {
            Json rooms = Json::array();
            for (const auto& info : service.rooms()) {
                const Presence p = service.room_presence(info.id);
                rooms.push_back({{"id", info.id},
                                 {"title", info.title},
                                 {"minor_severity_threshold", info.policy.minor_severity_threshold},
                                 {"members", p.members.size()},
                                 {"minors_present", p.minors_present}});
            }
            return Reply{200, Json{{"rooms", rooms}}};
        }
        if (seg.size() == 3 && seg[2] == "presence") {
            const Presence p = service.room_presence(seg[1]);
            return Reply{200, Json{{"room", seg[1]}, {"members", p.members}, {"minors_present", p.minors_present}}};
        }
    }
    return error_reply(404, "no route for " + std::string(req.target()));
}

void ServerCore::handle_frame(const std::string& session_id, const std::string& text)
{
    const Json frame = Json::parse(text, nullptr, false);
    std::string room;
    const auto fail = [&](const std::string& code, const std::string& message) {
        hub.deliver(session_id, frames::error(code, message, room));
    };
    if (frame.is_discarded() || !frame.is_object() || !frame.contains("type") || !frame.at("type").is_string())
        return fail("bad_frame", "frames are JSON objects with a string `type`");
    const std::string type = frame.at("type").get<std::string>();
    const auto text_field = [&](const char* name) -> std::optional<std::string> {
        if (!frame.contains(name) || !frame.at(name).is_string())
            return std::nullopt;
        return frame.at(name).get<std::string>();
    };
    const auto room_field = text_field("room");
    if (!room_field)
        return fail("bad_frame", "frame needs a string `room`");
    room = *room_field;
    try {
        if (type == "join") {
            service.join(session_id, room);
        } else if (type == "leave") {
            service.leave(session_id, room);
        } else if (type == "post") {
            const auto body = text_field("text");
            if (!body)
                return fail("bad_frame", "post needs a string `text`");
            service.post_message(session_id, room, *body);
        } else {
            fail("bad_frame", "unknown frame type " + type);
        }
    } catch (const NotFoundError& e) {
        fail("not_found", e.what());
    } catch (const ValidationError& e) {
        fail("invalid", e.what());
    } catch (const PreconditionError& e) {
        fail("precondition", e.what());
    } catch (const std::exception& e) {
        spdlog::error("frame from {} failed: {}", session_id, e.what());
        fail("internal", "the frame could not be processed");
    }
}

void ServerCore::do_accept()
{
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
        if (ec == net::error::operation_aborted || !acceptor.is_open())
            return;
        if (!ec)
            std::make_shared<HttpConnection>(std::move(socket), *this)->run();
        do_accept();
    });
}

struct ChatServer::Impl : ServerCore {
    using ServerCore::ServerCore;
};

ChatServer::ChatServer(ChatService& service, SocketHub& hub, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, hub, std::move(options)))
{
}

ChatServer::~ChatServer()
{
    stop();
}

void ChatServer::start()
{
    Impl& s = *impl_;
    if (s.running.exchange(true))
        return;
    try {
        const tcp::endpoint endpoint{net::ip::make_address(s.options.address), s.options.port};
        s.acceptor.open(endpoint.protocol());
        s.acceptor.set_option(net::socket_base::reuse_address(true));
        s.acceptor.bind(endpoint);
        s.acceptor.listen();
    } catch (const std::exception& e) {
        s.running = false;
        throw ConfigurationError("cannot listen on " + s.options.address + ":" +
                                 std::to_string(s.options.port) + ": " + e.what());
    }
    s.bound_port = s.acceptor.local_endpoint().port();
    s.work.emplace(s.ioc.get_executor());
    s.do_accept();
    for (int i = 0; i < std::max(1, s.options.io_threads); ++i)
        s.io_threads.emplace_back([&s] { s.ioc.run(); });
    s.retry_thread = std::thread([&s] {
        std::unique_lock lock(s.retry_mutex);
        while (!s.retry_cv.wait_for(lock, s.options.revocation_retry, [&s] { return s.retry_stop; })) {
            lock.unlock();
            if (s.service.pending_revocations() > 0)
                s.service.retry_pending_revocations();
            lock.lock();
        }
    });
}

void ChatServer::stop()
{
    Impl& s = *impl_;
    if (!s.running.exchange(false))
        return;
    net::post(s.ioc, [&s] {
        beast::error_code ec;
        s.acceptor.close(ec);
    });
    {
        std::lock_guard lock(s.retry_mutex);
        s.retry_stop = true;
    }
    s.retry_cv.notify_all();
    s.retry_thread.join();

    s.work.reset();
    s.ioc.stop();
    for (auto& t : s.io_threads)
        t.join();
    s.io_threads.clear();
    s.workers.join();

    // Sockets must not outlive the io_context they were created on.
    std::lock_guard lock(s.connections_mutex);
    for (const auto& [session_id, weak] : s.connections)
        if (auto c = weak.lock())
            s.hub.detach(session_id, c.get());
    s.connections.clear();
}

unsigned short ChatServer::port() const
{
    return impl_->bound_port;
}

} // namespace modchat::chat
