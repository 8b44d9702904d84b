#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modchat/common/time.hpp"

namespace modchat::pod {

// The fixed profile vocabulary. Each pod holds exactly one triple per term.
inline constexpr std::string_view kName = "profile:name";
inline constexpr std::string_view kAge = "profile:age";
inline constexpr std::string_view kCountry = "profile:country";
inline constexpr std::string_view kLanguage = "profile:language";

bool is_profile_predicate(std::string_view predicate);

enum class Purpose { Moderation, MinorCheck, CounterSpeech, Portability };

std::string_view to_string(Purpose p);
std::optional<Purpose> parse_purpose(std::string_view s);
const std::vector<Purpose>& all_purposes();

/// A bare vocabulary token such as a country or language code.
struct Symbol {
    std::string name;
    bool operator==(const Symbol&) const = default;
};

using Object = std::variant<std::string, std::int64_t, Symbol>;

/// `"..."` for text, digits for integers, the bare name for symbols.
std::string to_literal(const Object& o);
std::optional<Object> parse_literal(std::string_view s);

struct Triple {
    std::string subject;
    std::string predicate;
    Object object;
    bool operator==(const Triple&) const = default;
};

struct Profile {
    std::string name;
    std::int64_t age = 0;
    std::string country;  // lowercase alpha-2, optional `-region` suffix
    std::string language; // lowercase language code
};

/// Throws ValidationError naming the first offending field.
void validate(const Profile& p);

struct ConsentGrant {
    std::string id;
    std::string requester;
    Purpose purpose = Purpose::Moderation;
    std::set<std::string> attributes;
    Timestamp issued_at;
    std::optional<Timestamp> revoked_at;

    bool active() const { return !revoked_at; }
    bool operator==(const ConsentGrant&) const = default;
};

/// Returned instead of a value when no active grant covers the request.
struct Denied {
    bool operator==(const Denied&) const = default;
};

struct AuditEvent {
    Timestamp at;
    std::string requester;
    Purpose purpose;
    std::string operation; // "read_attribute" or "is_minor"
    std::string predicate; // empty for is_minor
    bool granted;
};

/// Age thresholds per jurisdiction: a person is a minor iff age <= the
/// threshold. Lookup tries the full code (`us-ca`), then the country part.
struct MajorityTable {
    std::map<std::string, std::int64_t> max_minor_age{{"de", 14}};
    std::int64_t default_max_minor_age = 17;

    std::int64_t threshold_for(std::string_view country) const;
    bool is_minor(std::int64_t age, std::string_view country) const;
};

/// Triples and grants of one pod, for structural comparison.
struct PodContents {
    std::string pod_id;
    std::vector<Triple> triples;
    std::vector<ConsentGrant> grants;
    bool operator==(const PodContents&) const = default;
};

/// Consent-governed store of personal profile pods. All operations are
/// thread-safe; mutations of one pod are serialized and linearizable with
/// respect to reads of that pod.
class PodStore {
public:
    explicit PodStore(Clock clock = system_now, MajorityTable majority = {});
    ~PodStore();

    PodStore(const PodStore&) = delete;
    PodStore& operator=(const PodStore&) = delete;

    std::string create_pod(std::string_view owner_credential, const Profile& profile);

    /// Returns the id of an existing active grant when (requester, purpose,
    /// attributes) match one exactly.
    std::string grant_consent(std::string_view pod_id, std::string_view owner_credential,
                              std::string_view requester, Purpose purpose,
                              const std::set<std::string>& attributes);

    /// Revoking an already revoked grant is a no-op.
    void revoke_consent(std::string_view pod_id, std::string_view owner_credential,
                        std::string_view grant_id);

    std::variant<Object, Denied> read_attribute(std::string_view pod_id, std::string_view requester,
                                                Purpose purpose, std::string_view predicate);

    /// Requires an active minor_check grant covering age and country.
    /// Discloses nothing but the boolean.
    std::variant<bool, Denied> is_minor(std::string_view pod_id, std::string_view requester,
                                        Purpose purpose);

    std::string export_pod(std::string_view pod_id, std::string_view owner_credential) const;

    /// Recreates a pod from export_pod() output under the same pod id, owned
    /// by `owner_credential`. Throws ValidationError on malformed documents or
    /// when the pod id is taken.
    std::string import_pod(std::string_view document, std::string_view owner_credential);

    bool contains(std::string_view pod_id) const;
    PodContents contents(std::string_view pod_id) const;
    std::vector<AuditEvent> audit_log(std::string_view pod_id) const;

    const MajorityTable& majority() const { return majority_; }

private:
    struct Pod;
    std::shared_ptr<Pod> find(std::string_view pod_id) const;
    void insert(std::shared_ptr<Pod> pod);

    Clock clock_;
    MajorityTable majority_;
    mutable std::shared_mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Pod>, std::less<>> pods_;
};

/// `<pod_id>#me`, the subject of every profile triple.
std::string subject_of(std::string_view pod_id);

} // namespace modchat::pod
