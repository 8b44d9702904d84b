#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "modchat/rules/term.hpp"

namespace modchat::rules {

inline constexpr int kDefaultDepthLimit = 256;

/// Raised while a goal runs: floundering negation, comparison on a
/// non-number, calling an unbound variable. These indicate a rulebase bug.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Counters a solve accumulates instead of throwing. Depth cutoffs and
/// ancestor-loop rejections prune a branch silently.
struct Diagnostics {
    std::size_t depth_cutoffs = 0;
    std::size_t loop_rejections = 0;
    std::vector<std::string> warnings;

    /// Records `message` once; repeats are dropped.
    void warn(std::string message);
};

/// Unifies `a` and `b` under `in`. Returns the extended bindings with every
/// value fully resolved, or nullopt when the terms do not unify (including an
/// occurs-check violation). Slot maps match open-world: the map with fewer
/// keys must have all of its keys in the other, and those values must unify.
std::optional<Bindings> unify(const Term& a, const Term& b, const Bindings& in = {});

/// Lazily enumerated answers of a goal, in top-down, left-to-right,
/// clause-order resolution order. The rulebase must outlive this object.
class Solutions {
public:
    Solutions(Solutions&&) noexcept;
    Solutions& operator=(Solutions&&) noexcept;
    ~Solutions();

    /// The next answer restricted to the goal's variables (unbound ones are
    /// omitted), or nullopt once exhausted. May throw EvaluationError.
    std::optional<Bindings> next();

    const Diagnostics& diagnostics() const;
    /// Effects emitted by `spawn` literals so far, in firing order.
    const std::vector<Effect>& effects() const;

private:
    struct Impl;
    explicit Solutions(std::unique_ptr<Impl> impl);
    friend Solutions solve(const Literal&, const Rulebase&, int);

    std::unique_ptr<Impl> impl_;
};

/// Resolves `goal` against `rb`. Loop prevention: a branch is cut when it
/// exceeds `depth_limit` nested resolutions, or when a goal is syntactically
/// identical (after substitution) to one of its ancestors.
Solutions solve(const Literal& goal, const Rulebase& rb, int depth_limit = kDefaultDepthLimit);

/// Drains solve() into a vector, optionally copying out the diagnostics.
std::vector<Bindings> solve_all(const Literal& goal, const Rulebase& rb,
                                int depth_limit = kDefaultDepthLimit,
                                Diagnostics* diagnostics = nullptr);

/// Negation as failure: true iff `goal` has no solution. The goal must be
/// ground; otherwise EvaluationError names the unbound variables.
bool naf(const Literal& goal, const Rulebase& rb, int depth_limit = kDefaultDepthLimit);

} // namespace modchat::rules
