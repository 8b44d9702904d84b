#pragma once

#include <map>
#include <string>

#include "modchat/pod/pod_store.hpp"

namespace httplib {
class Server;
}

namespace modchat::pod {

/// Routes of the pod service:
///   POST   /pods                          {"credential", "profile"} -> {"pod_id"}
///   POST   /pods/{id}/grants              owner -> {"grant_id"}
///   DELETE /pods/{id}/grants/{gid}        owner -> {"revoked": true}
///   GET    /pods/{id}/attr/{predicate}    requester -> {"value", "kind"} | 403
///   GET    /pods/{id}/minor               requester -> {"minor"} | 403
///   GET    /pods/{id}/export              owner -> text/plain export document
///   POST   /pods/import                   owner, text/plain body -> {"pod_id"}
/// Owner calls carry `X-Owner-Credential`; requester calls carry `X-Api-Key`
/// plus `requester` and `purpose` query parameters, and the key must belong
/// to that requester.
void mount_pod_routes(httplib::Server& server, PodStore& store,
                      std::map<std::string, std::string> api_keys /* key -> requester */);

} // namespace modchat::pod
