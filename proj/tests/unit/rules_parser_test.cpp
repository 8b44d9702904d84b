#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "modchat/rules/parser.hpp"

using namespace modchat::rules;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Random well-formed clauses covering every term kind.
Term random_term(std::mt19937& rng, int depth)
{
    std::uniform_int_distribution<int> kind(0, depth > 0 ? 6 : 4);
    switch (kind(rng)) {
    case 0: return Term::atom("a" + std::to_string(rng() % 5));
    case 1: return Term::integer(static_cast<std::int64_t>(rng() % 2000) - 1000);
    case 2: return Term::decimal(static_cast<double>(rng() % 10000) / 64.0 - 50.0);
    case 3: return Term::text(std::string("t\"x\\") + std::to_string(rng() % 7) + "\n");
    case 4: return Term::var(rng() % 6 == 0 ? "_" : "V" + std::to_string(rng() % 4));
    case 5: {
        std::vector<Term> args;
        for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i)
            args.push_back(random_term(rng, depth - 1));
        return Term::compound("f" + std::to_string(rng() % 3), std::move(args));
    }
    default: {
        std::vector<std::pair<std::string, Term>> entries;
        for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i)
            entries.emplace_back("k" + std::to_string(i), random_term(rng, depth - 1));
        return Term::slots(std::move(entries));
    }
    }
}

Literal random_literal(std::mt19937& rng, bool allow_guard)
{
    if (allow_guard && rng() % 9 == 0)
        return Literal{"!", {}, {}};
    Literal l{"q" + std::to_string(rng() % 4), {}, {}};
    for (std::size_t i = 0, n = rng() % 3; i < n; ++i)
        l.args.push_back(random_term(rng, 2));
    if (allow_guard && rng() % 3 == 0)
        for (std::size_t i = 0, n = 1 + rng() % 2; i < n; ++i)
            l.guard.push_back(random_literal(rng, false));
    return l;
}

} // namespace

TEST(Parser, FactWithEmptyBody)
{
    Rulebase rb = parse_rulebase("illCountry(greece).");
    ASSERT_EQ(rb.size(), 1u);
    const Clause& c = rb.clauses()[0];
    EXPECT_TRUE(c.is_fact());
    EXPECT_EQ(c.head.predicate, "illCountry");
    ASSERT_EQ(c.head.args.size(), 1u);
    EXPECT_EQ(c.head.args[0], Term::atom("greece"));
}

TEST(Parser, EmptySourceGivesEmptyRulebase)
{
    EXPECT_EQ(parse_rulebase("").size(), 0u);
    EXPECT_EQ(parse_rulebase("  % only a comment\n\n").size(), 0u);
}

TEST(Parser, ThreeVariantLegalListing)
{
    const char* listing = R"(
legalChecker() :-
     rcvMult(X,P,F,executionRequest, {hol->hol_denial,user_location->L}) [illCountry(L)],
     spawn(X,service,result, args("legal_violation",      "Holocaust Denial")),
     spawn(X,service,resume).

legalChecker() :-
     rcvMult(X,P,F,executionRequest, {hol->hol_denial,user_location->L}) [not(illCountry(L))],
     spawn(X,service,resume).

legalChecker() :-
     rcvMult(X,P,F,executionRequest,{hol->H}) [not_equal(H,hol_denial)],
     spawn(X,service,resume).
)";
    Rulebase rb = parse_rulebase(listing);
    ASSERT_EQ(rb.size(), 3u);
    for (const auto& c : rb.clauses()) {
        EXPECT_EQ(c.head.key(), "legalChecker/0");
        ASSERT_FALSE(c.body.empty());
        EXPECT_EQ(c.body[0].key(), "rcvMult/5");
        EXPECT_EQ(c.body[0].guard.size(), 1u);
    }
    EXPECT_EQ(rb.clauses()[1].body[0].guard[0].predicate, "not");
}

TEST(Parser, ShippedRulebasesParse)
{
    Rulebase legal = parse_rulebase(read_file(MODCHAT_RULEBASE_DIR "/legal.rules"), "legal");
    Rulebase ethical = parse_rulebase(read_file(MODCHAT_RULEBASE_DIR "/ethical.rules"), "ethical");
    EXPECT_EQ(legal.clauses_for("legalChecker/0")->size(), 3u);
    EXPECT_GE(legal.clauses_for("illCountry/1")->size(), 2u);
    EXPECT_EQ(ethical.clauses_for("ethicalChecker/0")->size(), 3u);
}

TEST(Parser, TermKinds)
{
    EXPECT_EQ(parse_term("-42"), Term::integer(-42));
    EXPECT_EQ(parse_term("3.25"), Term::decimal(3.25));
    EXPECT_EQ(parse_term("\"a \\\"b\\\"\""), Term::text("a \"b\""));
    EXPECT_TRUE(parse_term("_").as<Variable>()->anonymous());
    EXPECT_TRUE(parse_term("_Tmp").is<Variable>());
    EXPECT_EQ(parse_term("{a->1, b->x}"),
              Term::slots({{"a", Term::integer(1)}, {"b", Term::atom("x")}}));
    EXPECT_EQ(parse_term("f(X, g(y))"),
              Term::compound("f", {Term::var("X"), Term::compound("g", {Term::atom("y")})}));
}

TEST(Parser, CutAndGoalParsing)
{
    Rulebase rb = parse_rulebase("not(A) :- derive(A), !, fail().\nnot(_).");
    ASSERT_EQ(rb.size(), 2u);
    EXPECT_TRUE(rb.clauses()[0].body[1].is_cut());
    Literal g = parse_literal("illCountry(C).");
    EXPECT_EQ(g.key(), "illCountry/1");
}

TEST(Parser, ErrorsCarryPosition)
{
    try {
        parse_rulebase("p(a).\nq(b) :- r(c) s(d).");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 14u);
        EXPECT_EQ(e.token(), "s");
    }
    try {
        parse_rulebase("p(a)");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.token(), "<eof>");
    }
}

TEST(Parser, DuplicateSlotKeyIsSyntaxError)
{
    try {
        parse_rulebase("p({a->1, b->2, a->3}).");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.column(), 16u);
        EXPECT_EQ(e.token(), "a");
    }
}

TEST(Parser, RejectsStructuralViolations)
{
    EXPECT_THROW(parse_rulebase("p(X) [q(X)] :- r(X)."), SyntaxError);          // guard on head
    EXPECT_THROW(parse_rulebase("p(X) :- r(X) [q(X) [s(X)]]."), SyntaxError);   // nested guard
    EXPECT_THROW(parse_rulebase("p(X) :- r(X) [spawn(X, s, v)]."), SyntaxError); // effect in guard
    EXPECT_THROW(parse_rulebase("fail() :- p()."), SyntaxError);                 // control construct
    EXPECT_THROW(parse_rulebase("p(\"open)."), SyntaxError);
    EXPECT_THROW(parse_rulebase("p(a) # q."), SyntaxError);
}

TEST(Parser, PrettyPrintRoundTripProperty)
{
    std::mt19937 rng(20240611);
    for (int iter = 0; iter < 300; ++iter) {
        std::vector<Clause> clauses;
        for (std::size_t i = 0, n = rng() % 6; i < n; ++i) {
            Clause c;
            c.head = random_literal(rng, false);
            for (std::size_t b = 0, nb = rng() % 4; b < nb; ++b)
                c.body.push_back(random_literal(rng, true));
            clauses.push_back(std::move(c));
        }
        const Rulebase original("r", clauses);
        const std::string printed = to_string(original);
        const Rulebase reparsed = parse_rulebase(printed, "r");
        ASSERT_EQ(reparsed.clauses(), original.clauses()) << printed;
        ASSERT_EQ(to_string(reparsed), printed);
    }
}
