#include "modchat/chat/service.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include <spdlog/spdlog.h>

#include "modchat/common/errors.hpp"
#include "modchat/common/ids.hpp"
#include "modchat/detection/templates.hpp"

namespace modchat::chat {

namespace {

using pod::Purpose;

constexpr std::size_t kMaxMessageBytes = 4000;
/// Compliance age brackets: only the minimized minor flag is known.
constexpr int kMinorBracketAge = 0;
constexpr int kAdultBracketAge = 18;
const char* const kMinorsReason = "protection of minors";

bool blank(const std::string& s)
{
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::optional<std::string> as_text(const std::variant<pod::Object, pod::Denied>& v)
{
    if (const auto* obj = std::get_if<pod::Object>(&v)) {
        if (const auto* sym = std::get_if<pod::Symbol>(obj))
            return sym->name;
        if (const auto* s = std::get_if<std::string>(obj))
            return *s;
    }
    return std::nullopt;
}

} // namespace

std::set<std::string> attributes_for(Purpose purpose)
{
    switch (purpose) {
    case Purpose::Moderation: return {std::string(pod::kCountry)};
    case Purpose::MinorCheck: return {std::string(pod::kAge), std::string(pod::kCountry)};
    case Purpose::CounterSpeech: return {std::string(pod::kLanguage), std::string(pod::kCountry)};
    case Purpose::Portability: break;
    }
    return {};
}

struct ChatService::Session {
    std::string id;
    std::string user_id;
    std::string pod_id;
    std::string credential;
    std::map<Purpose, std::string> grants;

    mutable std::mutex mutex;
    bool closed = false;
    // Attribute cache; erased on close.
    std::optional<std::string> country;
    std::optional<std::string> language;
    std::optional<bool> minor;
    std::set<std::string> rooms;
    std::vector<SuppressionRecord> suppressions;
};

struct ChatService::Room {
    RoomInfo info;
    /// Serializes every membership change and post decision of the room.
    mutable std::mutex mutex;
    std::map<std::string, std::shared_ptr<Session>> members;
    std::deque<DeliveredMessage> transcript;
};

ChatService::ChatService(pod::PodGateway& pods, detection::DetectionBackend& detector,
                         compliance::ComplianceService& compliance, FrameSink& sink, Clock clock,
                         ChatOptions options)
    : pods_(pods), detector_(detector), compliance_(compliance), sink_(sink), clock_(std::move(clock)),
      options_(std::move(options))
{
}

ChatService::~ChatService() = default;

void ChatService::add_room(RoomInfo info)
{
    if (info.id.empty())
        throw ValidationError("room id must not be empty");
    if (info.policy.minor_severity_threshold < 1 || info.policy.minor_severity_threshold > 5)
        throw ValidationError("minor_severity_threshold must be in 1..5");
    std::unique_lock lock(registry_mutex_);
    if (rooms_.count(info.id))
        throw ValidationError("duplicate room " + info.id);
    auto room = std::make_shared<Room>();
    room->info = std::move(info);
    rooms_.emplace(room->info.id, std::move(room));
}

std::vector<RoomInfo> ChatService::rooms() const
{
    std::shared_lock lock(registry_mutex_);
    std::vector<RoomInfo> out;
    for (const auto& [_, room] : rooms_)
        out.push_back(room->info);
    return out;
}

std::shared_ptr<ChatService::Session> ChatService::find_session(const std::string& session_id) const
{
    std::shared_lock lock(registry_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end())
        throw NotFoundError("unknown session " + session_id);
    return it->second;
}

std::shared_ptr<ChatService::Room> ChatService::find_room(const std::string& room_id) const
{
    std::shared_lock lock(registry_mutex_);
    auto it = rooms_.find(room_id);
    if (it == rooms_.end())
        throw NotFoundError("unknown room " + room_id);
    return it->second;
}

std::string ChatService::open_session(const std::string& user_id, const std::string& pod_id,
                                      const std::string& owner_credential, const ConsentBundle& consent)
{
    if (blank(user_id) || blank(pod_id))
        throw ValidationError("user_id and pod_id are required");
    if (!consent.moderation || !consent.minor_check)
        throw SessionRefused("consent_missing", "joining requires consent for moderation and minor_check");

    std::vector<Purpose> purposes{Purpose::Moderation, Purpose::MinorCheck};
    if (consent.counter_speech)
        purposes.push_back(Purpose::CounterSpeech);

    auto session = std::make_shared<Session>();
    session->id = "sess-" + random_hex(12);
    session->user_id = user_id;
    session->pod_id = pod_id;
    session->credential = owner_credential;

    const auto refuse = [&](const std::string& code, const std::string& why) {
        std::vector<std::string> granted;
        for (const auto& [_, g] : session->grants)
            granted.push_back(g);
        revoke_or_queue(pod_id, owner_credential, granted);
        throw SessionRefused(code, why);
    };

    try {
        for (Purpose p : purposes)
            session->grants[p] =
                pods_.grant_consent(pod_id, owner_credential, options_.requester, p, attributes_for(p));
        const auto minor = pods_.is_minor(pod_id, options_.requester, Purpose::MinorCheck);
        if (!std::holds_alternative<bool>(minor))
            refuse("consent_missing", "the pod denied the minor check");
        session->minor = std::get<bool>(minor);
    } catch (const AuthenticationError& e) {
        refuse("invalid_credential", e.what());
    } catch (const NotFoundError& e) {
        refuse("unknown_pod", e.what());
    } catch (const BackendError& e) {
        refuse("pod_unreachable", e.what());
    }

    std::unique_lock lock(registry_mutex_);
    sessions_.emplace(session->id, session);
    return session->id;
}

void ChatService::close_session(const std::string& session_id)
{
    std::shared_ptr<Session> session;
    std::set<std::string> grants_in_use;
    {
        std::unique_lock lock(registry_mutex_);
        auto it = sessions_.find(session_id);
        if (it == sessions_.end()) {
            if (closed_sessions_.count(session_id))
                return;
            throw NotFoundError("unknown session " + session_id);
        }
        session = it->second;
        sessions_.erase(it);
        closed_sessions_.insert(session_id);
        // Grants are idempotent per (requester, purpose, attributes), so
        // another open session of the same pod may hold the same ids.
        for (const auto& [_, other] : sessions_)
            if (other->pod_id == session->pod_id)
                for (const auto& [__, g] : other->grants)
                    grants_in_use.insert(g);
    }

    std::set<std::string> joined;
    {
        std::lock_guard lock(session->mutex);
        session->closed = true;
        joined = session->rooms;
    }
    for (const auto& room_id : joined) {
        std::shared_ptr<Room> room;
        {
            std::shared_lock lock(registry_mutex_);
            auto it = rooms_.find(room_id);
            if (it == rooms_.end())
                continue;
            room = it->second;
        }
        std::lock_guard room_lock(room->mutex);
        remove_member(*room, session_id);
    }

    std::vector<std::string> to_revoke;
    std::string credential;
    {
        std::lock_guard lock(session->mutex);
        session->country.reset();
        session->language.reset();
        session->minor.reset();
        session->rooms.clear();
        session->suppressions.clear();
        for (const auto& [_, g] : session->grants)
            if (!grants_in_use.count(g))
                to_revoke.push_back(g);
        session->grants.clear();
        credential = std::move(session->credential);
        session->credential.clear();
    }
    revoke_or_queue(session->pod_id, credential, to_revoke);
    retry_pending_revocations();
}

void ChatService::revoke_or_queue(const std::string& pod_id, const std::string& credential,
                                  const std::vector<std::string>& grant_ids)
{
    for (const auto& g : grant_ids) {
        try {
            pods_.revoke_consent(pod_id, credential, g);
        } catch (const BackendError& e) {
            spdlog::warn("revocation of {} on {} deferred: {}", g, pod_id, e.what());
            std::lock_guard lock(pending_mutex_);
            pending_.push_back({pod_id, credential, g});
        } catch (const std::exception& e) {
            // The pod rejected the revocation outright; retrying cannot help.
            spdlog::error("revocation of {} on {} failed: {}", g, pod_id, e.what());
        }
    }
}

std::size_t ChatService::retry_pending_revocations()
{
    std::vector<PendingRevocation> batch;
    {
        std::lock_guard lock(pending_mutex_);
        batch.swap(pending_);
    }
    std::vector<PendingRevocation> still;
    for (auto& p : batch) {
        try {
            pods_.revoke_consent(p.pod_id, p.owner_credential, p.grant_id);
            spdlog::info("deferred revocation of {} on {} completed", p.grant_id, p.pod_id);
        } catch (const BackendError&) {
            still.push_back(std::move(p));
        } catch (const std::exception& e) {
            spdlog::error("deferred revocation of {} on {} failed: {}", p.grant_id, p.pod_id, e.what());
        }
    }
    std::lock_guard lock(pending_mutex_);
    pending_.insert(pending_.end(), std::make_move_iterator(still.begin()), std::make_move_iterator(still.end()));
    return pending_.size();
}

std::size_t ChatService::pending_revocations() const
{
    std::lock_guard lock(pending_mutex_);
    return pending_.size();
}

bool ChatService::minors_present(const Room& room) const
{
    for (const auto& [_, member] : room.members) {
        std::lock_guard lock(member->mutex);
        if (member->minor.value_or(false))
            return true;
    }
    return false;
}

void ChatService::broadcast(const Room& room, const Json& frame)
{
    for (const auto& [session_id, _] : room.members)
        sink_.deliver(session_id, frame);
}

void ChatService::announce_presence(const Room& room)
{
    broadcast(room, frames::presence(room.info.id, minors_present(room)));
}

void ChatService::remove_member(Room& room, const std::string& session_id)
{
    auto it = room.members.find(session_id);
    if (it == room.members.end())
        return;
    {
        std::lock_guard lock(it->second->mutex);
        it->second->rooms.erase(room.info.id);
    }
    room.members.erase(it);
    announce_presence(room);
}

void ChatService::join(const std::string& session_id, const std::string& room_id)
{
    auto room = find_room(room_id);
    std::lock_guard room_lock(room->mutex);
    // Membership is recorded under the session lock together with the
    // closed check, so a concurrent close either sees it or rejects it.
    auto session = find_session(session_id);
    {
        std::lock_guard lock(session->mutex);
        if (session->closed)
            throw NotFoundError("session " + session_id + " is closing");
        if (session->grants.empty())
            throw PreconditionError("a session without active grants cannot join rooms");
        session->rooms.insert(room_id);
    }
    room->members.emplace(session_id, session);
    announce_presence(*room);
}

void ChatService::leave(const std::string& session_id, const std::string& room_id)
{
    auto room = find_room(room_id);
    std::lock_guard room_lock(room->mutex);
    find_session(session_id);
    remove_member(*room, session_id);
}

MessageDecision ChatService::post_message(const std::string& session_id, const std::string& room_id,
                                          const std::string& text)
{
    if (blank(text))
        throw ValidationError("message text must not be empty");
    if (text.size() > kMaxMessageBytes)
        throw ValidationError("message text exceeds " + std::to_string(kMaxMessageBytes) + " bytes");
    auto room = find_room(room_id);
    std::lock_guard room_lock(room->mutex);
    auto it = room->members.find(session_id);
    if (it == room->members.end())
        throw PreconditionError("session " + session_id + " is not a member of " + room_id);
    auto author = it->second;

    MessageDecision decision = run_pipeline(*room, *author, text);
    if (const auto* held = std::get_if<Held>(&decision)) {
        spdlog::warn("message in {} held: {}", room_id, held->cause);
        sink_.deliver(session_id, frames::held(room_id, held->cause));
    } else if (std::holds_alternative<ConsentRequired>(decision)) {
        sink_.deliver(session_id, frames::error("consent_required",
                                                "moderation consent was withdrawn; the message was not posted",
                                                room_id));
    }
    return decision;
}

MessageDecision ChatService::run_pipeline(Room& room, Session& author, const std::string& text)
{
    // (a) Author attributes under purpose moderation.
    std::string country;
    bool author_minor = false;
    try {
        const auto value = pods_.read_attribute(author.pod_id, options_.requester, Purpose::Moderation,
                                                std::string(pod::kCountry));
        if (std::holds_alternative<pod::Denied>(value))
            return ConsentRequired{Purpose::Moderation};
        const auto text_value = as_text(value);
        if (!text_value)
            return Held{"pod returned a malformed country"};
        country = *text_value;
    } catch (const std::exception& e) {
        return Held{std::string("pod unavailable: ") + e.what()};
    }
    {
        std::lock_guard lock(author.mutex);
        author.country = country;
        author_minor = author.minor.value_or(false);
    }

    // (b) Classification.
    detection::Classification c;
    try {
        c = detection::classify(text, detector_);
    } catch (const std::exception& e) {
        return Held{std::string("classifier unavailable: ") + e.what()};
    }

    const auto deliver = [&]() -> MessageDecision {
        DeliveredMessage m{"msg-" + random_hex(8), author.user_id, text, clock_()};
        room.transcript.push_back(m);
        while (room.transcript.size() > options_.transcript_limit)
            room.transcript.pop_front();
        broadcast(room, frames::message(room.info.id, m));
        return Deliver{m.message_id, m.ts};
    };

    // (c) No-hate fast path.
    const bool minors = minors_present(room);
    if (c.label == detection::Label::NoHate && !minors)
        return deliver();

    // (d) Compliance.
    const int severity = c.severity.value_or(0);
    compliance::Verdict verdict;
    try {
        verdict = compliance_.check(compliance::ComplianceRequest{
            country, author_minor ? kMinorBracketAge : kAdultBracketAge,
            minors ? compliance::ChatContext::MinorsPresent : compliance::ChatContext::AdultsOnly, severity,
            c.hol == detection::Hol::Denial ? compliance::HolFlag::Denial : compliance::HolFlag::None});
    } catch (const std::exception& e) {
        return Held{std::string("compliance check unavailable: ") + e.what()};
    }

    // (e) Decision, including the minor gate.
    const bool gate = minors && severity >= room.info.policy.minor_severity_threshold;
    if (!verdict.any() && !gate)
        return deliver();

    detection::ViolationSummary summary;
    summary.legal = verdict.legal.has_value();
    summary.ethical = verdict.ethical.has_value() || gate;
    summary.reason = verdict.legal ? verdict.legal->reason : verdict.ethical ? verdict.ethical->reason : kMinorsReason;

    // (f) Counter speech, personalized when consented.
    Suppress s;
    s.legal = summary.legal;
    s.ethical = summary.ethical;
    s.reason = summary.reason;
    s.counter = counter_text(author, summary, text);
    s.original_ref = "sup-" + random_hex(8);
    {
        std::lock_guard lock(author.mutex);
        author.suppressions.push_back(SuppressionRecord{s.original_ref, room.info.id, text, s});
    }
    sink_.deliver(author.id, frames::suppressed(room.info.id, s));
    return s;
}

std::string ChatService::counter_text(Session& author, const detection::ViolationSummary& summary, const std::string& text)
{
    bool consented = false;
    {
        std::lock_guard lock(author.mutex);
        consented = author.grants.count(Purpose::CounterSpeech) > 0;
    }
    if (!consented)
        return detection::generic_counter(summary);
    std::optional<std::string> language;
    std::optional<std::string> origin;
    try {
        language = as_text(pods_.read_attribute(author.pod_id, options_.requester, Purpose::CounterSpeech,
                                                std::string(pod::kLanguage)));
        origin = as_text(pods_.read_attribute(author.pod_id, options_.requester, Purpose::CounterSpeech,
                                              std::string(pod::kCountry)));
    } catch (const std::exception& e) {
        spdlog::warn("counter-speech attributes unavailable: {}", e.what());
    }
    if (!language || !origin)
        return detection::generic_counter(summary);
    {
        std::lock_guard lock(author.mutex);
        author.language = language;
    }
    const detection::CounterRequest request{text, *origin, *language, summary};
    const detection::CounterSpeech counter = detection::generate_counter_or_template(request, detector_);
    for (const auto& w : counter.warnings)
        spdlog::info("counter speech: {}", w);
    return counter.text;
}

Presence ChatService::room_presence(const std::string& room_id) const
{
    auto room = find_room(room_id);
    std::lock_guard room_lock(room->mutex);
    Presence p;
    for (const auto& [_, member] : room->members)
        p.members.push_back(member->user_id);
    std::sort(p.members.begin(), p.members.end());
    p.minors_present = minors_present(*room);
    return p;
}

TranscriptView ChatService::transcript(const std::string& session_id, const std::string& room_id) const
{
    auto room = find_room(room_id);
    auto session = find_session(session_id);
    TranscriptView view;
    {
        std::lock_guard room_lock(room->mutex);
        view.messages.assign(room->transcript.begin(), room->transcript.end());
    }
    std::lock_guard lock(session->mutex);
    for (const auto& s : session->suppressions)
        if (s.room == room_id)
            view.own_suppressions.push_back(s);
    return view;
}

bool ChatService::session_open(const std::string& session_id) const
{
    std::shared_lock lock(registry_mutex_);
    return sessions_.count(session_id) > 0;
}

bool ChatService::session_minor(const std::string& session_id) const
{
    auto session = find_session(session_id);
    std::lock_guard lock(session->mutex);
    return session->minor.value_or(false);
}

Json ChatService::state_snapshot() const
{
    std::vector<std::shared_ptr<Session>> sessions;
    std::vector<std::shared_ptr<Room>> rooms;
    Json out;
    {
        std::shared_lock lock(registry_mutex_);
        for (const auto& [_, s] : sessions_)
            sessions.push_back(s);
        for (const auto& [_, r] : rooms_)
            rooms.push_back(r);
        out["closed_sessions"] = closed_sessions_;
    }
    out["sessions"] = Json::array();
    for (const auto& s : sessions) {
        std::lock_guard lock(s->mutex);
        Json grants = Json::object();
        for (const auto& [p, g] : s->grants)
            grants[std::string(pod::to_string(p))] = g;
        Json suppressions = Json::array();
        for (const auto& r : s->suppressions)
            suppressions.push_back({{"ref", r.original_ref}, {"room", r.room}, {"text", r.text},
                                    {"reason", r.decision.reason}, {"counter", r.decision.counter}});
        Json cache = Json::object();
        if (s->country)
            cache["country"] = *s->country;
        if (s->language)
            cache["language"] = *s->language;
        if (s->minor)
            cache["minor"] = *s->minor;
        out["sessions"].push_back({{"id", s->id}, {"user", s->user_id}, {"pod", s->pod_id},
                                   {"grants", grants}, {"cache", cache}, {"rooms", s->rooms},
                                   {"suppressions", suppressions}});
    }
    out["rooms"] = Json::array();
    for (const auto& r : rooms) {
        std::lock_guard lock(r->mutex);
        Json members = Json::array();
        for (const auto& [id, _] : r->members)
            members.push_back(id);
        Json transcript = Json::array();
        for (const auto& m : r->transcript)
            transcript.push_back(frames::message(r->info.id, m));
        out["rooms"].push_back({{"id", r->info.id}, {"title", r->info.title},
                                {"minor_severity_threshold", r->info.policy.minor_severity_threshold},
                                {"members", members}, {"transcript", transcript}});
    }
    std::lock_guard lock(pending_mutex_);
    out["pending_revocations"] = Json::array();
    for (const auto& p : pending_)
        out["pending_revocations"].push_back({{"pod", p.pod_id}, {"grant", p.grant_id}});
    return out;
}

namespace frames {

Json message(const std::string& room, const DeliveredMessage& m)
{
    return {{"type", "message"}, {"room", room}, {"id", m.message_id},
            {"author", m.author}, {"text", m.text}, {"ts", format_rfc3339(m.ts)}};
}

Json suppressed(const std::string& room, const Suppress& s)
{
    return {{"type", "suppressed"}, {"room", room},       {"legal", s.legal},
            {"ethical", s.ethical}, {"reason", s.reason}, {"counter", s.counter},
            {"original_ref", s.original_ref}};
}

Json held(const std::string& room, const std::string& cause)
{
    return {{"type", "held"}, {"room", room}, {"cause", cause}};
}

Json presence(const std::string& room, bool minors_present)
{
    return {{"type", "presence"}, {"room", room}, {"minors_present", minors_present}};
}

Json error(const std::string& code, const std::string& message, const std::string& room)
{
    Json out{{"type", "error"}, {"code", code}, {"message", message}};
    if (!room.empty())
        out["room"] = room;
    return out;
}

} // namespace frames

} // namespace modchat::chat
