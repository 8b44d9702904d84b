#include "modchat/pod/pod_store.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <regex>
#include <sstream>

#include "modchat/common/errors.hpp"
#include "modchat/common/ids.hpp"

namespace modchat::pod {

namespace {

const std::regex kCountryPattern("^[a-z]{2}(-[a-z0-9]{1,3})?$");
const std::regex kLanguagePattern("^[a-z]{2,3}(-[a-z0-9]{2,8})?$");
const std::regex kPartyPattern("^[A-Za-z0-9_.:-]{1,64}$");

constexpr std::int64_t kMaxAge = 150;

void check_party(std::string_view requester)
{
    if (!std::regex_match(std::string(requester), kPartyPattern))
        throw ValidationError("requester must match [A-Za-z0-9_.:-]{1,64}, got '" +
                              std::string(requester) + "'");
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = s.find(sep, start);
        out.emplace_back(s.substr(start, end - start));
        if (end == std::string_view::npos)
            return out;
        start = end + 1;
    }
}

} // namespace

bool is_profile_predicate(std::string_view predicate)
{
    return predicate == kName || predicate == kAge || predicate == kCountry || predicate == kLanguage;
}

std::string_view to_string(Purpose p)
{
    switch (p) {
    case Purpose::Moderation: return "moderation";
    case Purpose::MinorCheck: return "minor_check";
    case Purpose::CounterSpeech: return "counter_speech";
    case Purpose::Portability: return "portability";
    }
    return "unknown";
}

std::optional<Purpose> parse_purpose(std::string_view s)
{
    for (Purpose p : all_purposes())
        if (to_string(p) == s)
            return p;
    return std::nullopt;
}

const std::vector<Purpose>& all_purposes()
{
    static const std::vector<Purpose> all = {Purpose::Moderation, Purpose::MinorCheck,
                                             Purpose::CounterSpeech, Purpose::Portability};
    return all;
}

std::string to_literal(const Object& o)
{
    if (const auto* text = std::get_if<std::string>(&o)) {
        std::string out = "\"";
        for (char c : *text) {
            switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
            }
        }
        return out + "\"";
    }
    if (const auto* n = std::get_if<std::int64_t>(&o))
        return std::to_string(*n);
    return std::get<Symbol>(o).name;
}

std::optional<Object> parse_literal(std::string_view s)
{
    if (s.empty())
        return std::nullopt;
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            return std::nullopt;
        std::string out;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            char c = s[i];
            if (c == '"')
                return std::nullopt;
            if (c == '\\') {
                if (++i >= s.size() - 1)
                    return std::nullopt;
                switch (s[i]) {
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                case 'n': c = '\n'; break;
                case 'r': c = '\r'; break;
                case 't': c = '\t'; break;
                default: return std::nullopt;
                }
            }
            out += c;
        }
        return Object{std::move(out)};
    }
    if (s.front() == '-' || (s.front() >= '0' && s.front() <= '9')) {
        std::int64_t n = 0;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec != std::errc() || end != s.data() + s.size())
            return std::nullopt;
        return Object{n};
    }
    if (s.find_first_of(" \t\"") != std::string_view::npos)
        return std::nullopt;
    return Object{Symbol{std::string(s)}};
}

void validate(const Profile& p)
{
    if (p.name.empty())
        throw ValidationError("profile name must not be empty");
    if (p.age < 0 || p.age > kMaxAge)
        throw ValidationError("profile age must be in [0, 150], got " + std::to_string(p.age));
    if (!std::regex_match(p.country, kCountryPattern))
        throw ValidationError("profile country must be a lowercase ISO 3166-1 alpha-2 code, got '" +
                              p.country + "'");
    if (!std::regex_match(p.language, kLanguagePattern))
        throw ValidationError("profile language must be a lowercase language code, got '" +
                              p.language + "'");
}

std::int64_t MajorityTable::threshold_for(std::string_view country) const
{
    if (auto it = max_minor_age.find(std::string(country)); it != max_minor_age.end())
        return it->second;
    if (auto it = max_minor_age.find(std::string(country.substr(0, country.find('-'))));
        it != max_minor_age.end())
        return it->second;
    return default_max_minor_age;
}

bool MajorityTable::is_minor(std::int64_t age, std::string_view country) const
{
    return age <= threshold_for(country);
}

std::string subject_of(std::string_view pod_id)
{
    return std::string(pod_id) + "#me";
}

struct PodStore::Pod {
    std::string id;
    std::string credential_hash;

    mutable std::shared_mutex mutex; // guards triples and grants
    std::vector<Triple> triples;
    std::vector<ConsentGrant> grants;

    mutable std::mutex audit_mutex;
    std::vector<AuditEvent> audit;

    void authenticate(std::string_view credential) const
    {
        if (!verify_secret(credential, credential_hash))
            throw AuthenticationError("owner credential rejected for pod " + id);
    }

    const Object* object(std::string_view predicate) const
    {
        for (const auto& t : triples)
            if (t.predicate == predicate)
                return &t.object;
        return nullptr;
    }

    // Caller holds `mutex`.
    const ConsentGrant* covering(std::string_view requester, Purpose purpose,
                                 std::initializer_list<std::string_view> predicates) const
    {
        for (const auto& g : grants) {
            if (!g.active() || g.requester != requester || g.purpose != purpose)
                continue;
            if (std::all_of(predicates.begin(), predicates.end(), [&](std::string_view p) {
                    return g.attributes.count(std::string(p)) > 0;
                }))
                return &g;
        }
        return nullptr;
    }

    void record(AuditEvent event)
    {
        std::lock_guard lock(audit_mutex);
        audit.push_back(std::move(event));
    }
};

PodStore::PodStore(Clock clock, MajorityTable majority)
    : clock_(std::move(clock)), majority_(std::move(majority))
{
}

PodStore::~PodStore() = default;

std::shared_ptr<PodStore::Pod> PodStore::find(std::string_view pod_id) const
{
    std::shared_lock lock(registry_mutex_);
    auto it = pods_.find(pod_id);
    if (it == pods_.end())
        throw NotFoundError("unknown pod " + std::string(pod_id));
    return it->second;
}

void PodStore::insert(std::shared_ptr<Pod> pod)
{
    std::unique_lock lock(registry_mutex_);
    if (!pods_.emplace(pod->id, pod).second)
        throw ValidationError("pod " + pod->id + " already exists");
}

bool PodStore::contains(std::string_view pod_id) const
{
    std::shared_lock lock(registry_mutex_);
    return pods_.find(pod_id) != pods_.end();
}

std::string PodStore::create_pod(std::string_view owner_credential, const Profile& profile)
{
    validate(profile);
    if (owner_credential.empty())
        throw ValidationError("owner credential must not be empty");
    auto pod = std::make_shared<Pod>();
    pod->id = "pod-" + random_hex(8);
    pod->credential_hash = hash_secret(owner_credential);
    const std::string subject = subject_of(pod->id);
    pod->triples = {
        {subject, std::string(kName), Object{profile.name}},
        {subject, std::string(kAge), Object{profile.age}},
        {subject, std::string(kCountry), Object{Symbol{profile.country}}},
        {subject, std::string(kLanguage), Object{Symbol{profile.language}}},
    };
    insert(pod);
    return pod->id;
}

std::string PodStore::grant_consent(std::string_view pod_id, std::string_view owner_credential,
                                    std::string_view requester, Purpose purpose,
                                    const std::set<std::string>& attributes)
{
    auto pod = find(pod_id);
    pod->authenticate(owner_credential);
    check_party(requester);
    if (attributes.empty())
        throw ValidationError("a grant must cover at least one attribute");
    for (const auto& a : attributes)
        if (!is_profile_predicate(a))
            throw ValidationError("unknown profile predicate '" + a + "'");

    std::unique_lock lock(pod->mutex);
    for (const auto& g : pod->grants)
        if (g.active() && g.requester == requester && g.purpose == purpose && g.attributes == attributes)
            return g.id;
    ConsentGrant g;
    g.id = "grant-" + random_hex(8);
    g.requester = std::string(requester);
    g.purpose = purpose;
    g.attributes = attributes;
    g.issued_at = clock_();
    pod->grants.push_back(g);
    return g.id;
}

void PodStore::revoke_consent(std::string_view pod_id, std::string_view owner_credential,
                              std::string_view grant_id)
{
    auto pod = find(pod_id);
    pod->authenticate(owner_credential);
    std::unique_lock lock(pod->mutex);
    for (auto& g : pod->grants) {
        if (g.id != grant_id)
            continue;
        if (!g.revoked_at)
            g.revoked_at = std::max(clock_(), g.issued_at);
        return;
    }
    throw NotFoundError("unknown grant " + std::string(grant_id) + " in pod " + std::string(pod_id));
}

std::variant<Object, Denied> PodStore::read_attribute(std::string_view pod_id,
                                                      std::string_view requester, Purpose purpose,
                                                      std::string_view predicate)
{
    auto pod = find(pod_id);
    std::optional<Object> value;
    {
        std::shared_lock lock(pod->mutex);
        if (pod->covering(requester, purpose, {predicate}))
            if (const Object* o = pod->object(predicate))
                value = *o;
        // The audit append happens under the read lock so that it is ordered
        // against concurrent revocations.
        pod->record(AuditEvent{clock_(), std::string(requester), purpose, "read_attribute",
                               std::string(predicate), value.has_value()});
    }
    if (!value)
        return Denied{};
    return *value;
}

std::variant<bool, Denied> PodStore::is_minor(std::string_view pod_id, std::string_view requester,
                                              Purpose purpose)
{
    auto pod = find(pod_id);
    std::optional<bool> minor;
    {
        std::shared_lock lock(pod->mutex);
        if (purpose == Purpose::MinorCheck && pod->covering(requester, purpose, {kAge, kCountry})) {
            const auto* age = std::get_if<std::int64_t>(pod->object(kAge));
            const auto* country = std::get_if<Symbol>(pod->object(kCountry));
            if (age && country)
                minor = majority_.is_minor(*age, country->name);
        }
        pod->record(AuditEvent{clock_(), std::string(requester), purpose, "is_minor", "",
                               minor.has_value()});
    }
    if (!minor)
        return Denied{};
    return *minor;
}

std::string PodStore::export_pod(std::string_view pod_id, std::string_view owner_credential) const
{
    auto pod = find(pod_id);
    pod->authenticate(owner_credential);
    std::shared_lock lock(pod->mutex);
    std::string out;
    for (const auto& t : pod->triples)
        out += "T " + t.subject + " " + t.predicate + " " + to_literal(t.object) + "\n";
    for (const auto& g : pod->grants) {
        std::string attrs;
        for (const auto& a : g.attributes)
            attrs += (attrs.empty() ? "" : ",") + a;
        out += "G " + g.id + " " + g.requester + " " + std::string(to_string(g.purpose)) + " " +
               attrs + " " + format_rfc3339(g.issued_at) + " " +
               (g.revoked_at ? format_rfc3339(*g.revoked_at) : "-") + "\n";
    }
    return out;
}

std::string PodStore::import_pod(std::string_view document, std::string_view owner_credential)
{
    if (owner_credential.empty())
        throw ValidationError("owner credential must not be empty");
    auto pod = std::make_shared<Pod>();
    pod->credential_hash = hash_secret(owner_credential);

    std::size_t line_no = 0;
    auto fail = [&line_no](const std::string& msg) -> void {
        throw ValidationError("export line " + std::to_string(line_no) + ": " + msg);
    };
    std::istringstream in{std::string(document)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.rfind("T ", 0) == 0) {
            // The object literal may contain spaces; it is everything after the third field.
            const std::size_t s1 = line.find(' ', 2);
            const std::size_t s2 = s1 == std::string::npos ? s1 : line.find(' ', s1 + 1);
            if (s2 == std::string::npos)
                fail("expected `T <subject> <predicate> <object>`");
            Triple t{line.substr(2, s1 - 2), line.substr(s1 + 1, s2 - s1 - 1), {}};
            auto object = parse_literal(std::string_view(line).substr(s2 + 1));
            if (!object)
                fail("malformed object literal");
            t.object = std::move(*object);
            if (!is_profile_predicate(t.predicate))
                fail("unknown predicate " + t.predicate);
            const std::size_t hash = t.subject.rfind("#me");
            if (hash == std::string::npos || hash + 3 != t.subject.size() || hash == 0)
                fail("subject must be <pod_id>#me");
            const std::string id = t.subject.substr(0, hash);
            if (pod->id.empty())
                pod->id = id;
            else if (pod->id != id)
                fail("triples name two different pods");
            if (pod->object(t.predicate))
                fail("duplicate predicate " + t.predicate);
            pod->triples.push_back(std::move(t));
        } else if (line.rfind("G ", 0) == 0) {
            const auto f = split(std::string_view(line).substr(2), ' ');
            if (f.size() != 6)
                fail("expected `G <id> <requester> <purpose> <attrs> <issued_at> <revoked_at|->`");
            ConsentGrant g;
            g.id = f[0];
            g.requester = f[1];
            auto purpose = parse_purpose(f[2]);
            if (!purpose)
                fail("unknown purpose " + f[2]);
            g.purpose = *purpose;
            for (const auto& a : split(f[3], ',')) {
                if (!is_profile_predicate(a))
                    fail("unknown attribute " + a);
                g.attributes.insert(a);
            }
            auto issued = parse_rfc3339(f[4]);
            if (!issued)
                fail("malformed issued_at");
            g.issued_at = *issued;
            if (f[5] != "-") {
                auto revoked = parse_rfc3339(f[5]);
                if (!revoked || *revoked < g.issued_at)
                    fail("malformed revoked_at");
                g.revoked_at = *revoked;
            }
            pod->grants.push_back(std::move(g));
        } else {
            fail("unrecognized line");
        }
    }
    if (pod->triples.size() != 4)
        throw ValidationError("export must contain exactly the four profile triples");

    Profile p;
    if (const auto* name = std::get_if<std::string>(pod->object(kName)))
        p.name = *name;
    if (const auto* age = std::get_if<std::int64_t>(pod->object(kAge)))
        p.age = *age;
    else
        p.age = -1;
    if (const auto* country = std::get_if<Symbol>(pod->object(kCountry)))
        p.country = country->name;
    if (const auto* language = std::get_if<Symbol>(pod->object(kLanguage)))
        p.language = language->name;
    validate(p);

    insert(pod);
    return pod->id;
}

PodContents PodStore::contents(std::string_view pod_id) const
{
    auto pod = find(pod_id);
    std::shared_lock lock(pod->mutex);
    return PodContents{pod->id, pod->triples, pod->grants};
}

std::vector<AuditEvent> PodStore::audit_log(std::string_view pod_id) const
{
    auto pod = find(pod_id);
    std::lock_guard lock(pod->audit_mutex);
    return pod->audit;
}

} // namespace modchat::pod
