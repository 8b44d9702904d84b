#include "modchat/rules/term.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

namespace modchat::rules {

double Number::as_double() const
{
    if (const auto* i = std::get_if<std::int64_t>(&value))
        return static_cast<double>(*i);
    return std::get<double>(value);
}

bool numbers_equal(const Number& a, const Number& b)
{
    if (a.is_integer() && b.is_integer())
        return std::get<std::int64_t>(a.value) == std::get<std::int64_t>(b.value);
    return std::fabs(a.as_double() - b.as_double()) <= kDecimalTolerance;
}

const Term* SlotMap::find(std::string_view key) const
{
    for (const auto& [k, v] : entries)
        if (k == key)
            return &v;
    return nullptr;
}

Term Term::compound(std::string functor, std::vector<Term> args)
{
    return Term(Compound{std::move(functor), std::move(args)});
}

Term Term::slots(std::vector<std::pair<std::string, Term>> entries)
{
    std::set<std::string_view> seen;
    for (const auto& entry : entries)
        if (!seen.insert(entry.first).second)
            throw std::invalid_argument("duplicate slot key '" + entry.first + "'");
    return Term(SlotMap{std::move(entries)});
}

bool Term::is_ground() const
{
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Variable>) {
                return false;
            } else if constexpr (std::is_same_v<T, Compound>) {
                for (const auto& a : n.args)
                    if (!a.is_ground())
                        return false;
                return true;
            } else if constexpr (std::is_same_v<T, SlotMap>) {
                for (const auto& [k, v] : n.entries)
                    if (!v.is_ground())
                        return false;
                return true;
            } else {
                return true;
            }
        },
        node_);
}

bool identical(const Term& a, const Term& b)
{
    if (a.node().index() != b.node().index())
        return false;
    return std::visit(
        [&b](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.node());
            if constexpr (std::is_same_v<T, Atom>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, Number>) {
                return numbers_equal(x, y);
            } else if constexpr (std::is_same_v<T, Text>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, Compound>) {
                if (x.functor != y.functor || x.args.size() != y.args.size())
                    return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!identical(x.args[i], y.args[i]))
                        return false;
                return true;
            } else {
                if (x.entries.size() != y.entries.size())
                    return false;
                for (const auto& [k, v] : x.entries) {
                    const Term* other = y.find(k);
                    if (!other || !identical(v, *other))
                        return false;
                }
                return true;
            }
        },
        a.node());
}

void collect_variables(const Term& t, std::vector<std::string>& out)
{
    if (const auto* v = t.as<Variable>()) {
        if (v->anonymous())
            return;
        for (const auto& seen : out)
            if (seen == v->name)
                return;
        out.push_back(v->name);
    } else if (const auto* c = t.as<Compound>()) {
        for (const auto& a : c->args)
            collect_variables(a, out);
    } else if (const auto* s = t.as<SlotMap>()) {
        for (const auto& [k, v] : s->entries)
            collect_variables(v, out);
    }
}

std::string Literal::key() const
{
    return predicate + "/" + std::to_string(args.size());
}

bool operator==(const Literal& a, const Literal& b)
{
    if (a.predicate != b.predicate || a.args.size() != b.args.size() || a.guard != b.guard)
        return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!identical(a.args[i], b.args[i]))
            return false;
    return true;
}

bool operator==(const Clause& a, const Clause& b)
{
    return a.head == b.head && a.body == b.body;
}

bool operator==(const Effect& a, const Effect& b)
{
    if (a.verb != b.verb || !identical(a.agent, b.agent) || a.args.size() != b.args.size())
        return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!identical(a.args[i], b.args[i]))
            return false;
    return true;
}

Rulebase::Rulebase(std::string name, std::vector<Clause> clauses)
    : name_(std::move(name)), clauses_(std::move(clauses))
{
    for (std::size_t i = 0; i < clauses_.size(); ++i)
        index_[clauses_[i].head.key()].push_back(i);
}

const std::vector<std::size_t>* Rulebase::clauses_for(std::string_view key) const
{
    auto it = index_.find(std::string(key));
    return it == index_.end() ? nullptr : &it->second;
}

Term apply(const Term& t, const Bindings& b)
{
    return std::visit(
        [&](const auto& n) -> Term {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Variable>) {
                auto it = b.find(n.name);
                if (n.anonymous() || it == b.end())
                    return t;
                return apply(it->second, b);
            } else if constexpr (std::is_same_v<T, Compound>) {
                std::vector<Term> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args)
                    args.push_back(apply(a, b));
                return Term(Compound{n.functor, std::move(args)});
            } else if constexpr (std::is_same_v<T, SlotMap>) {
                SlotMap out;
                out.entries.reserve(n.entries.size());
                for (const auto& [k, v] : n.entries)
                    out.entries.emplace_back(k, apply(v, b));
                return Term(std::move(out));
            } else {
                return t;
            }
        },
        t.node());
}

Literal apply(const Literal& l, const Bindings& b)
{
    Literal out{l.predicate, {}, {}};
    out.args.reserve(l.args.size());
    for (const auto& a : l.args)
        out.args.push_back(apply(a, b));
    for (const auto& g : l.guard)
        out.guard.push_back(apply(g, b));
    return out;
}

namespace {

void print_number(const Number& n, std::string& out)
{
    if (n.is_integer()) {
        out += std::to_string(std::get<std::int64_t>(n.value));
        return;
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(n.value),
                                   std::chars_format::fixed);
    std::string s(buf, ec == std::errc{} ? end : buf);
    if (s.find('.') == std::string::npos)
        s += ".0";
    out += s;
}

void print_text(const std::string& s, std::string& out)
{
    out += '"';
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '"';
}

void print(const Term& t, std::string& out);

void print_args(const std::vector<Term>& args, std::string& out)
{
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            out += ", ";
        print(args[i], out);
    }
    out += ')';
}

void print(const Term& t, std::string& out)
{
    std::visit(
        [&out](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Atom>) {
                out += n.name;
            } else if constexpr (std::is_same_v<T, Number>) {
                print_number(n, out);
            } else if constexpr (std::is_same_v<T, Text>) {
                print_text(n.value, out);
            } else if constexpr (std::is_same_v<T, Variable>) {
                out += n.name;
            } else if constexpr (std::is_same_v<T, Compound>) {
                out += n.functor;
                print_args(n.args, out);
            } else {
                out += '{';
                for (std::size_t i = 0; i < n.entries.size(); ++i) {
                    if (i)
                        out += ", ";
                    out += n.entries[i].first;
                    out += "->";
                    print(n.entries[i].second, out);
                }
                out += '}';
            }
        },
        t.node());
}

void print(const Literal& l, std::string& out)
{
    if (l.is_cut()) {
        out += '!';
        return;
    }
    out += l.predicate;
    print_args(l.args, out);
    if (!l.guard.empty()) {
        out += " [";
        for (std::size_t i = 0; i < l.guard.size(); ++i) {
            if (i)
                out += ", ";
            print(l.guard[i], out);
        }
        out += ']';
    }
}

} // namespace

std::string to_string(const Term& t)
{
    std::string out;
    print(t, out);
    return out;
}

std::string to_string(const Literal& l)
{
    std::string out;
    print(l, out);
    return out;
}

std::string to_string(const Clause& c)
{
    std::string out;
    print(c.head, out);
    if (!c.body.empty()) {
        out += " :-";
        for (std::size_t i = 0; i < c.body.size(); ++i) {
            out += i ? ",\n    " : "\n    ";
            print(c.body[i], out);
        }
    }
    out += '.';
    return out;
}

std::string to_string(const Rulebase& rb)
{
    std::string out;
    for (const auto& c : rb.clauses()) {
        out += to_string(c);
        out += '\n';
    }
    return out;
}

std::string to_string(const Effect& e)
{
    std::string out = e.verb;
    print_args(e.args, out);
    return out;
}

std::string to_string(const Bindings& b)
{
    std::string out = "{";
    bool first = true;
    for (const auto& [name, value] : b) {
        if (!first)
            out += ", ";
        first = false;
        out += name;
        out += " -> ";
        print(value, out);
    }
    out += '}';
    return out;
}

} // namespace modchat::rules
