#pragma once

#include <chrono>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "modchat/pod/pod_store.hpp"

namespace modchat::pod {

/// The pod operations a requester (the chat platform) and an owner's agent
/// need. Implementations throw NotFoundError, AuthenticationError and
/// ValidationError like PodStore, and BackendError when the pod service is
/// unreachable.
class PodGateway {
public:
    virtual ~PodGateway() = default;

    virtual std::string grant_consent(const std::string& pod_id, const std::string& owner_credential,
                                      const std::string& requester, Purpose purpose,
                                      const std::set<std::string>& attributes) = 0;
    virtual void revoke_consent(const std::string& pod_id, const std::string& owner_credential,
                                const std::string& grant_id) = 0;
    virtual std::variant<Object, Denied> read_attribute(const std::string& pod_id,
                                                        const std::string& requester,
                                                        Purpose purpose,
                                                        const std::string& predicate) = 0;
    virtual std::variant<bool, Denied> is_minor(const std::string& pod_id,
                                                const std::string& requester, Purpose purpose) = 0;
};

/// In-process access to a PodStore.
class LocalPodGateway : public PodGateway {
public:
    explicit LocalPodGateway(PodStore& store) : store_(store) {}

    std::string grant_consent(const std::string& pod_id, const std::string& owner_credential,
                              const std::string& requester, Purpose purpose,
                              const std::set<std::string>& attributes) override
    {
        return store_.grant_consent(pod_id, owner_credential, requester, purpose, attributes);
    }
    void revoke_consent(const std::string& pod_id, const std::string& owner_credential,
                        const std::string& grant_id) override
    {
        store_.revoke_consent(pod_id, owner_credential, grant_id);
    }
    std::variant<Object, Denied> read_attribute(const std::string& pod_id, const std::string& requester,
                                                Purpose purpose, const std::string& predicate) override
    {
        return store_.read_attribute(pod_id, requester, purpose, predicate);
    }
    std::variant<bool, Denied> is_minor(const std::string& pod_id, const std::string& requester,
                                        Purpose purpose) override
    {
        return store_.is_minor(pod_id, requester, purpose);
    }

private:
    PodStore& store_;
};

/// Client for the pod HTTP service. `api_key` authenticates the requester
/// party on read calls.
class HttpPodGateway : public PodGateway {
public:
    HttpPodGateway(std::string base_url, std::string api_key,
                   std::chrono::milliseconds timeout = std::chrono::seconds(5));

    std::string create_pod(const std::string& owner_credential, const Profile& profile);
    std::string export_pod(const std::string& pod_id, const std::string& owner_credential);

    std::string grant_consent(const std::string& pod_id, const std::string& owner_credential,
                              const std::string& requester, Purpose purpose,
                              const std::set<std::string>& attributes) override;
    void revoke_consent(const std::string& pod_id, const std::string& owner_credential,
                        const std::string& grant_id) override;
    std::variant<Object, Denied> read_attribute(const std::string& pod_id, const std::string& requester,
                                                Purpose purpose, const std::string& predicate) override;
    std::variant<bool, Denied> is_minor(const std::string& pod_id, const std::string& requester,
                                        Purpose purpose) override;

private:
    std::string base_url_;
    std::string api_key_;
    std::chrono::milliseconds timeout_;
};

} // namespace modchat::pod
