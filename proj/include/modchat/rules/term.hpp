#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace modchat::rules {

class Term;

struct Atom {
    std::string name;
};

/// Integers compare exactly; as soon as a decimal is involved the
/// comparison uses kDecimalTolerance.
struct Number {
    std::variant<std::int64_t, double> value;

    bool is_integer() const { return std::holds_alternative<std::int64_t>(value); }
    double as_double() const;
};

inline constexpr double kDecimalTolerance = 1e-9;

struct Text {
    std::string value;
};

/// `_` is the anonymous variable: it unifies with anything and never binds.
struct Variable {
    std::string name;

    bool anonymous() const { return name == "_"; }
};

struct Compound {
    std::string functor;
    std::vector<Term> args;
};

/// Slotted term `{key->value, ...}`. Keys are unique; insertion order is kept
/// for printing only and carries no meaning for matching.
struct SlotMap {
    std::vector<std::pair<std::string, Term>> entries;

    const Term* find(std::string_view key) const;
};

class Term {
public:
    using Node = std::variant<Atom, Number, Text, Variable, Compound, SlotMap>;

    Term() : node_(Atom{}) {}
    Term(Node node) : node_(std::move(node)) {}

    static Term atom(std::string name) { return Term(Atom{std::move(name)}); }
    static Term integer(std::int64_t v) { return Term(Number{v}); }
    static Term decimal(double v) { return Term(Number{v}); }
    static Term text(std::string v) { return Term(Text{std::move(v)}); }
    static Term var(std::string name) { return Term(Variable{std::move(name)}); }
    static Term compound(std::string functor, std::vector<Term> args);
    /// Throws std::invalid_argument on a duplicate key.
    static Term slots(std::vector<std::pair<std::string, Term>> entries);

    const Node& node() const { return node_; }

    template <class T>
    const T* as() const { return std::get_if<T>(&node_); }

    template <class T>
    bool is() const { return std::holds_alternative<T>(node_); }

    bool is_ground() const;

private:
    Node node_;
};

/// Structural identity (variables compare by name).
bool identical(const Term& a, const Term& b);
inline bool operator==(const Term& a, const Term& b) { return identical(a, b); }

bool numbers_equal(const Number& a, const Number& b);

/// Names of the non-anonymous variables in `t`, in first-occurrence order.
void collect_variables(const Term& t, std::vector<std::string>& out);

struct Literal {
    std::string predicate;
    std::vector<Term> args;
    std::vector<Literal> guard;

    /// `name/arity`, the key clauses are indexed by.
    std::string key() const;
    bool is_cut() const { return predicate == "!" && args.empty(); }
};

bool operator==(const Literal& a, const Literal& b);

struct Clause {
    Literal head;
    std::vector<Literal> body;

    bool is_fact() const { return body.empty(); }
};

bool operator==(const Clause& a, const Clause& b);

/// An ordered, immutable clause list. Resolution tries clauses in the order
/// they were given.
class Rulebase {
public:
    Rulebase() = default;
    Rulebase(std::string name, std::vector<Clause> clauses);

    const std::string& name() const { return name_; }
    const std::vector<Clause>& clauses() const { return clauses_; }
    std::size_t size() const { return clauses_.size(); }

    /// Indices into clauses() for a `name/arity` key, or nullptr when the
    /// predicate has no clauses.
    const std::vector<std::size_t>* clauses_for(std::string_view key) const;
    bool defines(std::string_view key) const { return clauses_for(key) != nullptr; }

private:
    std::string name_;
    std::vector<Clause> clauses_;
    std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

/// Variable name to value. Values returned by the public API are fully
/// resolved, so applying a Bindings twice gives the same result as once.
using Bindings = std::map<std::string, Term>;

/// Substitutes bound variables recursively.
Term apply(const Term& t, const Bindings& b);
Literal apply(const Literal& l, const Bindings& b);

/// A side effect requested by a `spawn` literal.
struct Effect {
    Term agent;
    std::string verb;
    std::vector<Term> args;
};

bool operator==(const Effect& a, const Effect& b);

std::string to_string(const Term& t);
std::string to_string(const Literal& l);
std::string to_string(const Clause& c);
std::string to_string(const Rulebase& rb);
std::string to_string(const Effect& e);
std::string to_string(const Bindings& b);

} // namespace modchat::rules
