#include "modchat/rules/engine.hpp"

#include <algorithm>

#include "machine.hpp"
#include "modchat/common/errors.hpp"
#include "modchat/rules/builtins.hpp"

namespace modchat::rules {

void Diagnostics::warn(std::string message)
{
    if (std::find(warnings.begin(), warnings.end(), message) == warnings.end())
        warnings.push_back(std::move(message));
}

std::optional<Bindings> unify(const Term& a, const Term& b, const Bindings& in)
{
    detail::Store store(in);
    if (!store.unify(a, b))
        return std::nullopt;
    return store.resolved_bindings();
}

namespace detail {

namespace {

// Constants standing in for the conversation id, protocol and sender of a
// dispatched message; rulebases match on them but never inspect them.
const Term kConversationId = Term::atom("conversation");
const Term kProtocol = Term::atom("async");
const Term kSender = Term::atom("dispatcher");

Term rename_term(const Term& t, const std::string& suffix)
{
    if (const auto* v = t.as<Variable>())
        return v->anonymous() ? t : Term::var(v->name + suffix);
    if (const auto* c = t.as<Compound>()) {
        std::vector<Term> args;
        args.reserve(c->args.size());
        for (const auto& a : c->args)
            args.push_back(rename_term(a, suffix));
        return Term(Compound{c->functor, std::move(args)});
    }
    if (const auto* s = t.as<SlotMap>()) {
        SlotMap out;
        for (const auto& [k, v] : s->entries)
            out.entries.emplace_back(k, rename_term(v, suffix));
        return Term(std::move(out));
    }
    return t;
}

Literal rename_literal(const Literal& l, const std::string& suffix)
{
    Literal out{l.predicate, {}, {}};
    out.args.reserve(l.args.size());
    for (const auto& a : l.args)
        out.args.push_back(rename_term(a, suffix));
    for (const auto& g : l.guard)
        out.guard.push_back(rename_literal(g, suffix));
    return out;
}

// Internal variable names carry a `#n` renaming suffix; strip it for messages.
std::string display_name(const std::string& name)
{
    return name.substr(0, name.find('#'));
}

Term display_term(const Term& t)
{
    if (const auto* v = t.as<Variable>())
        return Term::var(display_name(v->name));
    if (const auto* c = t.as<Compound>()) {
        std::vector<Term> args;
        for (const auto& a : c->args)
            args.push_back(display_term(a));
        return Term(Compound{c->functor, std::move(args)});
    }
    if (const auto* s = t.as<SlotMap>()) {
        SlotMap out;
        for (const auto& [k, v] : s->entries)
            out.entries.emplace_back(k, display_term(v));
        return Term(std::move(out));
    }
    return t;
}

Literal to_goal(const Term& t, const char* who)
{
    if (const auto* a = t.as<Atom>())
        return Literal{a->name, {}, {}};
    if (const auto* c = t.as<Compound>())
        return Literal{c->functor, c->args, {}};
    if (t.is<Variable>())
        throw EvaluationError(std::string(who) + ": goal is an unbound variable");
    throw EvaluationError(std::string(who) + ": " + to_string(t) + " is not callable");
}

const Number& number_arg(const Term& t, const std::string& key)
{
    if (const auto* n = t.as<Number>())
        return *n;
    if (t.is<Variable>())
        throw EvaluationError(key + ": unbound argument");
    throw EvaluationError(key + ": " + to_string(t) + " is not a number");
}

// -1, 0, 1 with decimal tolerance.
int compare(const Number& a, const Number& b)
{
    if (numbers_equal(a, b))
        return 0;
    if (a.is_integer() && b.is_integer())
        return std::get<std::int64_t>(a.value) < std::get<std::int64_t>(b.value) ? -1 : 1;
    return a.as_double() < b.as_double() ? -1 : 1;
}

} // namespace

Clause rename(const Clause& c, std::uint64_t suffix)
{
    const std::string s = "#" + std::to_string(suffix);
    Clause out;
    out.head = rename_literal(c.head, s);
    out.body.reserve(c.body.size());
    for (const auto& l : c.body)
        out.body.push_back(rename_literal(l, s));
    return out;
}

FramePtr push_goals(const std::vector<Literal>& goals, std::size_t cut_barrier, int depth,
                    const AncestryPtr& ancestry, FramePtr tail)
{
    for (auto it = goals.rbegin(); it != goals.rend(); ++it)
        tail = std::make_shared<const Frame>(Frame{*it, cut_barrier, depth, ancestry, std::move(tail)});
    return tail;
}

Machine::Machine(Context& ctx, Store& store, FramePtr goals)
    : ctx_(ctx), store_(store), goals_(std::move(goals)), base_mark_(store.mark())
{
}

bool Machine::next()
{
    if (exhausted_)
        return false;
    if (started_ && !backtrack()) {
        exhausted_ = true;
        return false;
    }
    started_ = true;
    while (goals_) {
        if (!step() && !backtrack()) {
            exhausted_ = true;
            return false;
        }
    }
    return true;
}

bool Machine::backtrack()
{
    while (!choices_.empty()) {
        ChoicePoint cp = std::move(choices_.back());
        choices_.pop_back();
        store_.undo_to(cp.trail_mark);
        if (resolve_user(cp.goal, cp.next_clause, std::move(cp.answers)))
            return true;
    }
    store_.undo_to(base_mark_);
    goals_.reset();
    return false;
}

bool Machine::step()
{
    const FramePtr frame = goals_;
    if (frame->exit)
        return exit_call(*frame);
    const Literal& lit = frame->literal;

    if (lit.is_cut()) {
        if (choices_.size() > frame->cut_barrier)
            choices_.resize(frame->cut_barrier);
        goals_ = frame->next;
        return true;
    }

    const std::string key = lit.key();
    if (is_control_construct(key))
        return run_control(frame, key);
    if (ctx_.rulebase.defines(key))
        return resolve_user(frame, 0, nullptr);
    if (is_library_predicate(key)) {
        if (!run_library(*frame, key))
            return false;
        if (!lit.guard.empty() && !run_guard(lit.guard, *frame))
            return false;
        goals_ = frame->next;
        return true;
    }
    ctx_.diagnostics.warn("unknown predicate " + key);
    return false;
}

bool Machine::repeats_ancestor(const Frame& frame) const
{
    if (!frame.ancestry)
        return false;
    const Literal current = store_.resolve(frame.literal);
    for (const Ancestry* a = frame.ancestry.get(); a; a = a->parent.get())
        if (a->goal.predicate == current.predicate && store_.resolve(a->goal) == current)
            return true;
    return false;
}

bool Machine::resolve_user(const FramePtr& frame, std::size_t first_clause, CallAnswersPtr answers)
{
    const Literal& goal = frame->literal;
    if (first_clause == 0) {
        if (frame->depth >= ctx_.depth_limit) {
            ++ctx_.diagnostics.depth_cutoffs;
            return false;
        }
        if (repeats_ancestor(*frame)) {
            ++ctx_.diagnostics.loop_rejections;
            return false;
        }
        answers = std::make_shared<CallAnswers>(CallAnswers{Literal{goal.predicate, goal.args, {}}, {}});
    }

    const auto& candidates = *ctx_.rulebase.clauses_for(goal.key());
    const std::size_t barrier = choices_.size();
    for (std::size_t i = first_clause; i < candidates.size(); ++i) {
        const std::size_t mark = store_.mark();
        Clause clause = rename(ctx_.rulebase.clauses()[candidates[i]], ++ctx_.renames);

        bool matched = true;
        for (std::size_t a = 0; matched && a < goal.args.size(); ++a)
            matched = store_.unify(clause.head.args[a], goal.args[a]);
        if (matched && !goal.guard.empty())
            matched = run_guard(goal.guard, *frame);
        if (!matched) {
            store_.undo_to(mark);
            continue;
        }

        if (i + 1 < candidates.size())
            choices_.push_back(ChoicePoint{frame, i + 1, mark, answers});
        auto ancestry = std::make_shared<const Ancestry>(Ancestry{goal, frame->ancestry});
        auto exit = std::make_shared<const Frame>(
            Frame{Literal{}, barrier, frame->depth, nullptr, frame->next, answers});
        goals_ = push_goals(clause.body, barrier, frame->depth + 1, ancestry, std::move(exit));
        return true;
    }
    return false;
}

bool Machine::exit_call(const Frame& frame)
{
    // A repeated answer of the same call would rerun an identical continuation.
    if (!frame.exit->seen.insert(to_string(store_.resolve(frame.exit->goal))).second)
        return false;
    goals_ = frame.next;
    return true;
}

bool Machine::run_guard(const std::vector<Literal>& guard, const Frame& at)
{
    // The guard commits to its first solution; its bindings stay visible to
    // the clause body and are undone with the enclosing choice point.
    Machine sub(ctx_, store_, push_goals(guard, 0, at.depth + 1, at.ancestry, nullptr));
    return sub.next();
}

bool Machine::run_control(const FramePtr& frame, const std::string& key)
{
    const Literal& lit = frame->literal;
    if (key == "fail/0")
        return false;

    if (key == "derive/1") {
        Literal called = to_goal(store_.resolve(lit.args[0]), "derive/1");
        goals_ = std::make_shared<const Frame>(
            Frame{std::move(called), choices_.size(), frame->depth, frame->ancestry, frame->next});
        return true;
    }

    if (key == "spawn/3" || key == "spawn/4") {
        Effect effect;
        effect.agent = store_.resolve(lit.args[0]);
        const Term verb = store_.resolve(lit.args[2]);
        const auto* verb_atom = verb.as<Atom>();
        if (!verb_atom)
            throw EvaluationError("spawn: verb " + to_string(verb) + " is not a symbol");
        effect.verb = verb_atom->name;
        if (lit.args.size() == 4) {
            Term payload = store_.resolve(lit.args[3]);
            if (const auto* c = payload.as<Compound>(); c && c->functor == "args")
                effect.args = c->args;
            else if (const auto* a = payload.as<Atom>(); a && a->name == "args")
                effect.args = {};
            else
                effect.args = {std::move(payload)};
        }
        ctx_.effects.push_back(std::move(effect));
    } else if (key == "rcvMult/5") {
        if (!ctx_.message) {
            ctx_.diagnostics.warn("rcvMult/5 called outside message dispatch");
            return false;
        }
        if (!store_.unify(lit.args[0], kConversationId) || !store_.unify(lit.args[1], kProtocol) ||
            !store_.unify(lit.args[2], kSender) ||
            !store_.unify(lit.args[3], Term::atom(ctx_.message->verb)) ||
            !store_.unify(lit.args[4], ctx_.message->payload))
            return false;
    }
    // true/0 falls through.

    if (!lit.guard.empty() && !run_guard(lit.guard, *frame))
        return false;
    goals_ = frame->next;
    return true;
}

bool Machine::negation(const Frame& frame)
{
    const Term target = store_.resolve(frame.literal.args[0]);
    if (!target.is_ground()) {
        std::vector<std::string> vars;
        collect_variables(target, vars);
        std::string names;
        for (const auto& v : vars)
            names += (names.empty() ? "" : ", ") + display_name(v);
        throw EvaluationError("not/1: goal " + to_string(display_term(target)) +
                              " is not ground (unbound: " + names + ")");
    }
    const std::size_t mark = store_.mark();
    Machine sub(ctx_, store_,
                std::make_shared<const Frame>(
                    Frame{to_goal(target, "not/1"), 0, frame.depth, nullptr, nullptr}));
    const bool proven = sub.next();
    store_.undo_to(mark);
    return !proven;
}

bool Machine::run_library(const Frame& frame, const std::string& key)
{
    const auto& args = frame.literal.args;
    if (key == "not/1")
        return negation(frame);
    if (key == "equal/2")
        return store_.unify(args[0], args[1]);
    if (key == "not_equal/2") {
        const std::size_t mark = store_.mark();
        const bool unifies = store_.unify(args[0], args[1]);
        store_.undo_to(mark);
        return !unifies;
    }

    const int order = compare(number_arg(store_.resolve(args[0]), key),
                              number_arg(store_.resolve(args[1]), key));
    if (key == "less/2")
        return order < 0;
    if (key == "lesseq/2")
        return order <= 0;
    if (key == "greater/2")
        return order > 0;
    return order >= 0; // greatereq/2
}

} // namespace detail

struct Solutions::Impl {
    Impl(const Literal& goal, const Rulebase& rb, int depth_limit)
        : context{rb, depth_limit, diagnostics, effects},
          machine(context, store, detail::push_goals({goal}, 0, 0, nullptr, nullptr))
    {
        for (const auto& a : goal.args)
            collect_variables(a, variables);
    }

    Diagnostics diagnostics;
    std::vector<Effect> effects;
    detail::Store store;
    detail::Context context;
    detail::Machine machine;
    std::vector<std::string> variables;
};

Solutions::Solutions(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Solutions::Solutions(Solutions&&) noexcept = default;
Solutions& Solutions::operator=(Solutions&&) noexcept = default;
Solutions::~Solutions() = default;

std::optional<Bindings> Solutions::next()
{
    if (!impl_->machine.next())
        return std::nullopt;
    Bindings answer;
    for (const auto& name : impl_->variables) {
        Term value = impl_->store.resolve(Term::var(name));
        if (const auto* v = value.as<Variable>(); v && v->name == name)
            continue;
        answer.emplace(name, std::move(value));
    }
    return answer;
}

const Diagnostics& Solutions::diagnostics() const
{
    return impl_->diagnostics;
}

const std::vector<Effect>& Solutions::effects() const
{
    return impl_->effects;
}

Solutions solve(const Literal& goal, const Rulebase& rb, int depth_limit)
{
    if (depth_limit < 1)
        throw PreconditionError("solve: depth_limit must be at least 1");
    return Solutions(std::make_unique<Solutions::Impl>(goal, rb, depth_limit));
}

std::vector<Bindings> solve_all(const Literal& goal, const Rulebase& rb, int depth_limit,
                                Diagnostics* diagnostics)
{
    Solutions s = solve(goal, rb, depth_limit);
    std::vector<Bindings> out;
    while (auto b = s.next())
        out.push_back(std::move(*b));
    if (diagnostics)
        *diagnostics = s.diagnostics();
    return out;
}

bool naf(const Literal& goal, const Rulebase& rb, int depth_limit)
{
    std::vector<std::string> vars;
    for (const auto& a : goal.args)
        collect_variables(a, vars);
    if (!vars.empty()) {
        std::string names;
        for (const auto& v : vars)
            names += (names.empty() ? "" : ", ") + v;
        throw EvaluationError("not/1: goal " + to_string(goal) + " is not ground (unbound: " +
                              names + ")");
    }
    return !solve(goal, rb, depth_limit).next().has_value();
}

} // namespace modchat::rules
