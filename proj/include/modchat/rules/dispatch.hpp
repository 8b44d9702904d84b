#pragma once

#include <string_view>
#include <vector>

#include "modchat/rules/engine.hpp"
#include "modchat/rules/term.hpp"

namespace modchat::rules {

/// Delivers the message (verb, payload) to every clause whose body starts
/// with `rcvMult(X, P, F, Verb, Pattern) [Guard]`. A clause fires when Verb
/// matches, Pattern open-world-matches the payload and the guard succeeds;
/// the rest of its body then runs to its first solution. X, P and F are bound
/// to fixed constants. Returns the effects of all fired clauses in firing
/// order. Throws PreconditionError when the payload is not a ground slot map.
std::vector<Effect> dispatch(std::string_view verb, const Term& payload, const Rulebase& rb,
                             int depth_limit = kDefaultDepthLimit,
                             Diagnostics* diagnostics = nullptr);

} // namespace modchat::rules
