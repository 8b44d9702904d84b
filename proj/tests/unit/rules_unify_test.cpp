#include <gtest/gtest.h>

#include <map>
#include <random>

#include "modchat/rules/engine.hpp"
#include "modchat/rules/parser.hpp"

using namespace modchat;
using namespace modchat::rules;

namespace {

Term t(const char* src) { return parse_term(src); }

Term random_term(std::mt19937& rng, int depth)
{
    switch (rng() % (depth > 0 ? 6 : 4)) {
    case 0: return Term::atom("a" + std::to_string(rng() % 3));
    case 1: return Term::integer(static_cast<std::int64_t>(rng() % 3));
    case 2:
    case 3: return Term::var("V" + std::to_string(rng() % 4));
    case 4: {
        std::vector<Term> args;
        for (std::size_t i = 0, n = 1 + rng() % 2; i < n; ++i)
            args.push_back(random_term(rng, depth - 1));
        return Term::compound("f", std::move(args));
    }
    default: {
        std::vector<std::pair<std::string, Term>> entries;
        for (int k = 0; k < 3; ++k)
            if (rng() % 2)
                entries.emplace_back("k" + std::to_string(k), random_term(rng, depth - 1));
        return Term::slots(std::move(entries));
    }
    }
}

// True when a and b are equal up to a consistent renaming of variables.
bool alpha_equal(const Term& a, const Term& b, std::map<std::string, std::string>& ab,
                 std::map<std::string, std::string>& ba)
{
    const auto* va = a.as<Variable>();
    const auto* vb = b.as<Variable>();
    if (va || vb) {
        if (!va || !vb)
            return false;
        auto [i, fresh_a] = ab.emplace(va->name, vb->name);
        auto [j, fresh_b] = ba.emplace(vb->name, va->name);
        return i->second == vb->name && j->second == va->name;
    }
    if (const auto* ca = a.as<Compound>()) {
        const auto* cb = b.as<Compound>();
        if (!cb || ca->functor != cb->functor || ca->args.size() != cb->args.size())
            return false;
        for (std::size_t i = 0; i < ca->args.size(); ++i)
            if (!alpha_equal(ca->args[i], cb->args[i], ab, ba))
                return false;
        return true;
    }
    if (const auto* sa = a.as<SlotMap>()) {
        const auto* sb = b.as<SlotMap>();
        if (!sb || sa->entries.size() != sb->entries.size())
            return false;
        for (const auto& [k, v] : sa->entries) {
            const Term* w = sb->find(k);
            if (!w || !alpha_equal(v, *w, ab, ba))
                return false;
        }
        return true;
    }
    return a == b;
}

// Bindings as one compound term over the union of keys, for alpha comparison.
Term as_term(const Bindings& b, const std::vector<std::string>& keys)
{
    std::vector<Term> args;
    for (const auto& k : keys) {
        auto it = b.find(k);
        args.push_back(it == b.end() ? Term::var(k) : it->second);
    }
    return Term::compound("b", std::move(args));
}

} // namespace

TEST(Unify, VariableToAtom)
{
    auto r = unify(t("L"), t("greece"));
    ASSERT_TRUE(r);
    EXPECT_EQ(r->at("L"), Term::atom("greece"));
}

TEST(Unify, OpenWorldSlotPatternAgainstFiveSlotRequest)
{
    auto r = unify(t("{hol->hol_denial, user_location->L}"),
                   t("{user_location->greece, user_age->34, chat_context->adults_only, "
                     "hate_speech_score->5, hol->hol_denial}"));
    ASSERT_TRUE(r);
    EXPECT_EQ(r->size(), 1u);
    EXPECT_EQ(r->at("L"), Term::atom("greece"));
}

TEST(Unify, AtomClashInsideSlotMap)
{
    EXPECT_FALSE(unify(t("{hol->hol_denial}"), t("{hol->none}")));
}

TEST(Unify, SlotKeysOutsideTheSmallerMapFail)
{
    EXPECT_FALSE(unify(t("{a->1, b->2}"), t("{a->1, c->3}")));
    EXPECT_TRUE(unify(t("{}"), t("{a->1}")));
    EXPECT_FALSE(unify(t("{a->1}"), t("f(1)")));
}

TEST(Unify, OccursCheck)
{
    EXPECT_FALSE(unify(t("X"), t("f(X)")));
    EXPECT_FALSE(unify(t("f(X, Y)"), t("f(Y, g(X))")));
    EXPECT_TRUE(unify(t("X"), t("X")));
}

TEST(Unify, NumbersCompareWithinTolerance)
{
    EXPECT_TRUE(unify(t("3"), t("3.0")));
    EXPECT_TRUE(unify(t("0.1"), Term::decimal(0.1 + 1e-12)));
    EXPECT_FALSE(unify(t("0.1"), Term::decimal(0.1 + 1e-6)));
    EXPECT_FALSE(unify(t("1"), t("\"1\"")));
}

TEST(Unify, ExtendsExistingBindings)
{
    Bindings in{{"X", Term::atom("a")}};
    EXPECT_FALSE(unify(t("X"), t("b"), in));
    auto r = unify(t("f(X, Y)"), t("f(a, g(X))"), in);
    ASSERT_TRUE(r);
    EXPECT_EQ(to_string(r->at("Y")), "g(a)");
}

TEST(Unify, SymmetryProperty)
{
    std::mt19937 rng(99);
    int unified = 0;
    for (int iter = 0; iter < 2000; ++iter) {
        const Term a = random_term(rng, 3);
        const Term b = random_term(rng, 3);
        auto ab = unify(a, b);
        auto ba = unify(b, a);
        ASSERT_EQ(ab.has_value(), ba.has_value()) << to_string(a) << " ~ " << to_string(b);
        if (!ab)
            continue;
        ++unified;
        std::vector<std::string> keys;
        collect_variables(a, keys);
        collect_variables(b, keys);
        std::map<std::string, std::string> m1, m2;
        ASSERT_TRUE(alpha_equal(as_term(*ab, keys), as_term(*ba, keys), m1, m2))
            << to_string(a) << " ~ " << to_string(b);
        // The result is a unifier of both sides.
        ASSERT_TRUE(identical(rules::apply(a, *ab), rules::apply(b, *ab)) ||
                    unify(rules::apply(a, *ab), rules::apply(b, *ab)).has_value());
    }
    EXPECT_GT(unified, 100);
}

TEST(Unify, IdempotenceProperty)
{
    std::mt19937 rng(5);
    for (int iter = 0; iter < 1000; ++iter) {
        const Term a = random_term(rng, 3);
        const Term b = random_term(rng, 3);
        auto r = unify(a, b);
        if (!r)
            continue;
        auto again = unify(a, b, *r);
        ASSERT_TRUE(again);
        ASSERT_EQ(*again, *r);
    }
}
