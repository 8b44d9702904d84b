#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "modchat/common/time.hpp"
#include "modchat/compliance/compliance.hpp"
#include "modchat/detection/detection.hpp"
#include "modchat/pod/gateway.hpp"

namespace modchat::chat {

using Json = nlohmann::json;

/// Purposes the user agrees to when opening a session. moderation and
/// minor_check are mandatory; counter_speech is optional.
struct ConsentBundle {
    bool moderation = false;
    bool minor_check = false;
    bool counter_speech = false;
};

/// Profile predicates each purpose's grant covers.
std::set<std::string> attributes_for(pod::Purpose purpose);

/// A refused open_session. `code` is one of consent_missing,
/// invalid_credential, unknown_pod, pod_unreachable.
class SessionRefused : public std::runtime_error {
public:
    SessionRefused(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code))
    {
    }
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct RoomPolicy {
    /// Minor gate: while minors are present, severity >= this is suppressed.
    int minor_severity_threshold = 4;
};

struct RoomInfo {
    std::string id;
    std::string title;
    RoomPolicy policy;
};

struct Deliver {
    std::string message_id;
    Timestamp ts;
};

/// Invariant: legal || ethical.
struct Suppress {
    bool legal = false;
    bool ethical = false;
    std::string reason;
    std::string counter;
    std::string original_ref;
};

/// Fail-closed outcome: a backend failed and the message was not broadcast.
struct Held {
    std::string cause;
};

/// The author's moderation consent was withdrawn at the pod mid-session.
struct ConsentRequired {
    pod::Purpose purpose = pod::Purpose::Moderation;
};

using MessageDecision = std::variant<Deliver, Suppress, Held, ConsentRequired>;

/// Receives server-to-client frames addressed to a session. Calls arrive in
/// the total order of each room and must not block.
class FrameSink {
public:
    virtual ~FrameSink() = default;
    virtual void deliver(const std::string& session_id, const Json& frame) = 0;
};

struct DeliveredMessage {
    std::string message_id;
    std::string author; // user id
    std::string text;
    Timestamp ts;
};

struct SuppressionRecord {
    std::string original_ref;
    std::string room;
    std::string text;
    Suppress decision;
};

/// What one session may see of a room: every delivered message plus its own
/// suppression records.
struct TranscriptView {
    std::vector<DeliveredMessage> messages;
    std::vector<SuppressionRecord> own_suppressions;
};

struct Presence {
    std::vector<std::string> members; // user ids, sorted
    bool minors_present = false;
};

struct ChatOptions {
    std::string requester = "platform";
    /// Delivered messages kept per room.
    std::size_t transcript_limit = 500;
};

/// Rooms, consent-coupled sessions and the moderation pipeline. Each room is
/// a sequential domain: joins, leaves and post decisions in one room are
/// totally ordered, and backend calls made for one room do not block others.
class ChatService {
public:
    ChatService(pod::PodGateway& pods, detection::DetectionBackend& detector,
                compliance::ComplianceService& compliance, FrameSink& sink, Clock clock = system_now,
                ChatOptions options = {});
    ~ChatService();

    /// ValidationError on a duplicate id or a threshold outside 1..5.
    void add_room(RoomInfo room);
    std::vector<RoomInfo> rooms() const;

    /// Registers the bundle's grants at the pod and resolves the minor flag.
    /// Throws SessionRefused; on refusal no grant stays active.
    std::string open_session(const std::string& user_id, const std::string& pod_id,
                             const std::string& owner_credential, const ConsentBundle& consent);

    /// Leaves every room, erases the attribute cache and revokes the grants.
    /// Revocations the pod cannot take now are queued for retry. Closing a
    /// closed session is a no-op; an id never issued is NotFoundError.
    void close_session(const std::string& session_id);

    /// Throws NotFoundError for an unknown room or session, PreconditionError
    /// when the session holds no active grant.
    void join(const std::string& session_id, const std::string& room_id);
    void leave(const std::string& session_id, const std::string& room_id);

    /// The moderation pipeline. PreconditionError unless the session is a
    /// member of the room; ValidationError for blank text.
    MessageDecision post_message(const std::string& session_id, const std::string& room_id,
                                 const std::string& text);

    Presence room_presence(const std::string& room_id) const;
    TranscriptView transcript(const std::string& session_id, const std::string& room_id) const;

    bool session_open(const std::string& session_id) const;
    /// The cached minor flag of an open session.
    bool session_minor(const std::string& session_id) const;

    /// Retries queued revocations; returns how many are still pending.
    std::size_t retry_pending_revocations();
    std::size_t pending_revocations() const;

    /// Every piece of server state as a document, for inspection and tests.
    Json state_snapshot() const;

private:
    struct Session;
    struct Room;
    struct PendingRevocation {
        std::string pod_id;
        std::string owner_credential;
        std::string grant_id;
    };

    std::shared_ptr<Session> find_session(const std::string& session_id) const;
    std::shared_ptr<Room> find_room(const std::string& room_id) const;
    bool minors_present(const Room& room) const;
    void broadcast(const Room& room, const Json& frame);
    void announce_presence(const Room& room);
    void remove_member(Room& room, const std::string& session_id);
    MessageDecision run_pipeline(Room& room, Session& author, const std::string& text);
    std::string counter_text(Session& author, const detection::ViolationSummary& summary,
                             const std::string& text);
    void revoke_or_queue(const std::string& pod_id, const std::string& credential,
                         const std::vector<std::string>& grant_ids);

    pod::PodGateway& pods_;
    detection::DetectionBackend& detector_;
    compliance::ComplianceService& compliance_;
    FrameSink& sink_;
    Clock clock_;
    ChatOptions options_;

    mutable std::shared_mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::set<std::string> closed_sessions_;
    std::map<std::string, std::shared_ptr<Room>> rooms_;

    mutable std::mutex pending_mutex_;
    std::vector<PendingRevocation> pending_;
};

/// Frame documents exchanged over the session socket.
namespace frames {
Json message(const std::string& room, const DeliveredMessage& m);
Json suppressed(const std::string& room, const Suppress& s);
Json held(const std::string& room, const std::string& cause);
Json presence(const std::string& room, bool minors_present);
Json error(const std::string& code, const std::string& message, const std::string& room = {});
} // namespace frames

} // namespace modchat::chat
