#pragma once

#include <array>
#include <string_view>

namespace modchat::rules {

// Control constructs are handled by the engine itself and may not be
// redefined by a rulebase.
inline constexpr std::array<std::string_view, 7> kControlConstructs = {
    "!/0", "fail/0", "true/0", "derive/1", "spawn/3", "spawn/4", "rcvMult/5",
};

// Library predicates. A rulebase that defines one of these keys shadows the
// builtin, which is how the classic cut-fail encoding of `not/1` is loaded.
inline constexpr std::array<std::string_view, 7> kLibraryPredicates = {
    "not/1", "equal/2", "not_equal/2", "less/2", "lesseq/2", "greater/2", "greatereq/2",
};

constexpr bool is_control_construct(std::string_view key)
{
    for (auto k : kControlConstructs)
        if (k == key)
            return true;
    return false;
}

constexpr bool is_library_predicate(std::string_view key)
{
    for (auto k : kLibraryPredicates)
        if (k == key)
            return true;
    return false;
}

// Guards run before a clause is committed to and must not cause effects.
constexpr bool allowed_in_guard(std::string_view key)
{
    return key != "spawn/3" && key != "spawn/4";
}

} // namespace modchat::rules
