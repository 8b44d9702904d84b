#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "modchat/common/errors.hpp"
#include "modchat/rules/dispatch.hpp"
#include "modchat/rules/engine.hpp"
#include "modchat/rules/parser.hpp"

using namespace modchat::rules;

namespace {

const char* kLegalListing = R"(
illCountry(greece).
illCountry(germany).

legalChecker() :-
     rcvMult(X,P,F,executionRequest, {hol->hol_denial,user_location->L}) [illCountry(L)],
     spawn(X,service,result, args("legal_violation", "Holocaust Denial")),
     spawn(X,service,resume).

legalChecker() :-
     rcvMult(X,P,F,executionRequest, {hol->hol_denial,user_location->L}) [not(illCountry(L))],
     spawn(X,service,resume).

legalChecker() :-
     rcvMult(X,P,F,executionRequest,{hol->H}) [not_equal(H,hol_denial)],
     spawn(X,service,resume).
)";

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Term request(const std::string& hol, const std::string& location, int age = 34, int score = 5)
{
    return Term::slots({{"user_location", Term::atom(location)},
                        {"user_age", Term::integer(age)},
                        {"chat_context", Term::atom("adults_only")},
                        {"hate_speech_score", Term::integer(score)},
                        {"hol", Term::atom(hol)}});
}

std::vector<std::string> rendered(const std::vector<Effect>& effects)
{
    std::vector<std::string> out;
    for (const auto& e : effects)
        out.push_back(to_string(e));
    return out;
}

} // namespace

TEST(Dispatch, DenialInListedCountryReportsLegalViolation)
{
    Rulebase rb = parse_rulebase(kLegalListing);
    EXPECT_EQ(rendered(dispatch("executionRequest", request("hol_denial", "greece"), rb)),
              (std::vector<std::string>{"result(\"legal_violation\", \"Holocaust Denial\")",
                                        "resume()"}));
}

TEST(Dispatch, DenialElsewhereOnlyResumes)
{
    Rulebase rb = parse_rulebase(kLegalListing);
    EXPECT_EQ(rendered(dispatch("executionRequest", request("hol_denial", "usa"), rb)),
              (std::vector<std::string>{"resume()"}));
}

TEST(Dispatch, NoDenialResumesThroughThirdVariant)
{
    Rulebase rb = parse_rulebase(kLegalListing);
    EXPECT_EQ(rendered(dispatch("executionRequest", request("none", "greece"), rb)),
              (std::vector<std::string>{"resume()"}));
}

TEST(Dispatch, OtherVerbsAreIgnored)
{
    Rulebase rb = parse_rulebase(kLegalListing);
    EXPECT_TRUE(dispatch("statusRequest", request("hol_denial", "greece"), rb).empty());
}

TEST(Dispatch, RejectsNonGroundOrNonSlotPayload)
{
    Rulebase rb = parse_rulebase(kLegalListing);
    EXPECT_THROW(dispatch("executionRequest", parse_term("{hol->H}"), rb), modchat::PreconditionError);
    EXPECT_THROW(dispatch("executionRequest", parse_term("f(a)"), rb), modchat::PreconditionError);
}

TEST(Dispatch, ExactlyOneLegalVariantFiresProperty)
{
    // Includes the shipped rulebase, whose jurisdictions are country codes.
    const Rulebase listing = parse_rulebase(kLegalListing);
    const Rulebase shipped = parse_rulebase(read_file(MODCHAT_RULEBASE_DIR "/legal.rules"));
    const std::vector<std::string> locations = {"greece", "germany", "usa", "de", "gr",
                                                "at",     "fr",      "us",  "xx", "el"};
    const std::vector<std::string> hols = {"hol_denial", "none", "other"};
    std::mt19937 rng(3);
    for (const Rulebase* rb : {&listing, &shipped}) {
        for (int iter = 0; iter < 300; ++iter) {
            std::vector<std::pair<std::string, Term>> slots = {
                {"hol", Term::atom(hols[rng() % hols.size()])},
                {"user_location", Term::atom(locations[rng() % locations.size()])}};
            if (rng() % 2)
                slots.emplace_back("user_age", Term::integer(static_cast<std::int64_t>(rng() % 90)));
            if (rng() % 2)
                slots.emplace_back("hate_speech_score", Term::integer(static_cast<std::int64_t>(rng() % 6)));
            std::shuffle(slots.begin(), slots.end(), rng);
            const Term payload = Term::slots(slots);
            const auto effects = dispatch("executionRequest", payload, *rb);
            std::size_t resumes = 0;
            for (const auto& e : effects)
                resumes += e.verb == "resume";
            ASSERT_EQ(resumes, 1u) << to_string(payload);
        }
    }
}

TEST(Dispatch, DeterministicProperty)
{
    const Rulebase rb = parse_rulebase(read_file(MODCHAT_RULEBASE_DIR "/ethical.rules"));
    for (int score = 0; score <= 5; ++score) {
        for (const char* hol : {"hol_denial", "none"}) {
            const Term payload = request(hol, "de", 20, score);
            const auto first = dispatch("executionRequest", payload, rb);
            for (int i = 0; i < 5; ++i)
                ASSERT_EQ(dispatch("executionRequest", payload, rb), first);
        }
    }
}

TEST(Dispatch, ShippedEthicalRulebase)
{
    const Rulebase rb = parse_rulebase(read_file(MODCHAT_RULEBASE_DIR "/ethical.rules"));
    EXPECT_EQ(rendered(dispatch("executionRequest", request("hol_denial", "us", 34, 1), rb)),
              (std::vector<std::string>{"result(\"ethical_violation\", \"Holocaust Denial\", 5)",
                                        "resume()"}));
    EXPECT_EQ(rendered(dispatch("executionRequest", request("none", "us", 34, 4), rb)),
              (std::vector<std::string>{"result(\"ethical_violation\", \"hate speech\", 4)",
                                        "resume()"}));
    EXPECT_EQ(rendered(dispatch("executionRequest", request("none", "us", 34, 2), rb)),
              (std::vector<std::string>{"resume()"}));
}

TEST(Naf, AgreesWithCutFailEncodingProperty)
{
    const std::string facts = "e(c0, c1). e(c1, c2). e(c2, c2). q(c1).\n"
                              "r(X, Y) :- e(X, Y), q(Y).\n";
    const Rulebase plain = parse_rulebase(facts);
    const Rulebase encoded =
        parse_rulebase(facts + "not(A) :- derive(A), !, fail().\nnot(_).\n");
    const std::vector<std::string> consts = {"c0", "c1", "c2", "c3"};
    for (const auto& a : consts) {
        for (const auto& b : consts) {
            for (const char* pred : {"e", "r"}) {
                const Literal goal = parse_literal("not(" + std::string(pred) + "(" + a + ", " + b + "))");
                const bool builtin = !solve_all(goal, plain).empty();
                const bool cut_fail = !solve_all(goal, encoded).empty();
                ASSERT_EQ(builtin, cut_fail) << to_string(goal);
                ASSERT_EQ(builtin, naf(Literal{pred, goal.args[0].as<Compound>()->args, {}}, plain));
            }
        }
    }
}
