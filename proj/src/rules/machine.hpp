#pragma once

// Internal resolution machinery shared by solve() and dispatch().

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "modchat/rules/engine.hpp"
#include "modchat/rules/term.hpp"

namespace modchat::rules::detail {

/// Triangular binding store with a trail for undo on backtracking.
class Store {
public:
    Store() = default;
    explicit Store(const Bindings& initial);

    const Term& walk(const Term& t) const;
    Term resolve(const Term& t) const;
    Literal resolve(const Literal& l) const;

    /// On failure some bindings may remain; callers undo to a mark.
    bool unify(const Term& a, const Term& b);

    std::size_t mark() const { return trail_.size(); }
    void undo_to(std::size_t mark);

    Bindings resolved_bindings() const;

private:
    bool occurs(const std::string& name, const Term& t) const;
    void bind(const std::string& name, const Term& value);

    std::unordered_map<std::string, Term> bindings_;
    std::vector<std::string> trail_;
};

struct Ancestry {
    Literal goal;
    std::shared_ptr<const Ancestry> parent;
};
using AncestryPtr = std::shared_ptr<const Ancestry>;

/// Distinct answers produced so far by one call of a user predicate.
struct CallAnswers {
    Literal goal;
    std::unordered_set<std::string> seen;
};
using CallAnswersPtr = std::shared_ptr<CallAnswers>;

/// One pending goal in an immutable goal list. A frame with `exit` set marks
/// the completion of a call and carries no literal of its own.
struct Frame {
    Literal literal;
    std::size_t cut_barrier;
    int depth;
    AncestryPtr ancestry;
    std::shared_ptr<const Frame> next;
    CallAnswersPtr exit = nullptr;
};
using FramePtr = std::shared_ptr<const Frame>;

FramePtr push_goals(const std::vector<Literal>& goals, std::size_t cut_barrier, int depth,
                    const AncestryPtr& ancestry, FramePtr tail);

struct Message {
    std::string verb;
    Term payload;
};

struct Context {
    const Rulebase& rulebase;
    int depth_limit;
    Diagnostics& diagnostics;
    std::vector<Effect>& effects;
    const Message* message = nullptr;
    std::uint64_t renames = 0;
};

Clause rename(const Clause& c, std::uint64_t suffix);

class Machine {
public:
    Machine(Context& ctx, Store& store, FramePtr goals);

    /// Advances to the next solution; false once the search space is exhausted.
    bool next();

private:
    struct ChoicePoint {
        FramePtr goal;
        std::size_t next_clause;
        std::size_t trail_mark;
        CallAnswersPtr answers;
    };

    bool step();
    bool backtrack();
    bool resolve_user(const FramePtr& frame, std::size_t first_clause, CallAnswersPtr answers);
    bool exit_call(const Frame& frame);
    bool repeats_ancestor(const Frame& frame) const;
    bool run_guard(const std::vector<Literal>& guard, const Frame& at);
    bool run_control(const FramePtr& frame, const std::string& key);
    bool run_library(const Frame& frame, const std::string& key);
    bool negation(const Frame& frame);

    Context& ctx_;
    Store& store_;
    FramePtr goals_;
    std::vector<ChoicePoint> choices_;
    std::size_t base_mark_;
    bool started_ = false;
    bool exhausted_ = false;
};

} // namespace modchat::rules::detail
