#include "machine.hpp"

#include <algorithm>

namespace modchat::rules::detail {

Store::Store(const Bindings& initial)
{
    for (const auto& [name, value] : initial)
        bind(name, value);
}

const Term& Store::walk(const Term& t) const
{
    const Term* cur = &t;
    while (const auto* v = cur->as<Variable>()) {
        if (v->anonymous())
            break;
        auto it = bindings_.find(v->name);
        if (it == bindings_.end())
            break;
        cur = &it->second;
    }
    return *cur;
}

Term Store::resolve(const Term& t) const
{
    const Term& w = walk(t);
    if (const auto* c = w.as<Compound>()) {
        std::vector<Term> args;
        args.reserve(c->args.size());
        for (const auto& a : c->args)
            args.push_back(resolve(a));
        return Term(Compound{c->functor, std::move(args)});
    }
    if (const auto* s = w.as<SlotMap>()) {
        SlotMap out;
        out.entries.reserve(s->entries.size());
        for (const auto& [k, v] : s->entries)
            out.entries.emplace_back(k, resolve(v));
        return Term(std::move(out));
    }
    return w;
}

Literal Store::resolve(const Literal& l) const
{
    Literal out{l.predicate, {}, {}};
    out.args.reserve(l.args.size());
    for (const auto& a : l.args)
        out.args.push_back(resolve(a));
    return out;
}

bool Store::occurs(const std::string& name, const Term& t) const
{
    const Term& w = walk(t);
    if (const auto* v = w.as<Variable>())
        return v->name == name;
    if (const auto* c = w.as<Compound>())
        return std::any_of(c->args.begin(), c->args.end(),
                           [&](const Term& a) { return occurs(name, a); });
    if (const auto* s = w.as<SlotMap>())
        return std::any_of(s->entries.begin(), s->entries.end(),
                           [&](const auto& e) { return occurs(name, e.second); });
    return false;
}

void Store::bind(const std::string& name, const Term& value)
{
    bindings_.insert_or_assign(name, value);
    trail_.push_back(name);
}

void Store::undo_to(std::size_t mark)
{
    while (trail_.size() > mark) {
        bindings_.erase(trail_.back());
        trail_.pop_back();
    }
}

bool Store::unify(const Term& a, const Term& b)
{
    const Term& x = walk(a);
    const Term& y = walk(b);

    const auto* xv = x.as<Variable>();
    const auto* yv = y.as<Variable>();
    if ((xv && xv->anonymous()) || (yv && yv->anonymous()))
        return true;
    if (xv && yv && xv->name == yv->name)
        return true;
    if (xv) {
        if (occurs(xv->name, y))
            return false;
        bind(xv->name, y);
        return true;
    }
    if (yv) {
        if (occurs(yv->name, x))
            return false;
        bind(yv->name, x);
        return true;
    }

    if (x.node().index() != y.node().index())
        return false;

    if (const auto* xa = x.as<Atom>())
        return xa->name == y.as<Atom>()->name;
    if (const auto* xn = x.as<Number>())
        return numbers_equal(*xn, *y.as<Number>());
    if (const auto* xt = x.as<Text>())
        return xt->value == y.as<Text>()->value;
    if (const auto* xc = x.as<Compound>()) {
        const auto* yc = y.as<Compound>();
        if (xc->functor != yc->functor || xc->args.size() != yc->args.size())
            return false;
        for (std::size_t i = 0; i < xc->args.size(); ++i)
            if (!unify(xc->args[i], yc->args[i]))
                return false;
        return true;
    }

    const auto* xs = x.as<SlotMap>();
    const auto* ys = y.as<SlotMap>();
    const SlotMap& pattern = xs->entries.size() <= ys->entries.size() ? *xs : *ys;
    const SlotMap& target = &pattern == xs ? *ys : *xs;
    for (const auto& [key, value] : pattern.entries) {
        const Term* other = target.find(key);
        if (!other || !unify(value, *other))
            return false;
    }
    return true;
}

Bindings Store::resolved_bindings() const
{
    Bindings out;
    for (const auto& [name, value] : bindings_)
        out.emplace(name, resolve(value));
    return out;
}

} // namespace modchat::rules::detail
