#include <gtest/gtest.h>

#include <random>

#include "modchat/common/errors.hpp"
#include "modchat/detection/lexicon.hpp"

using namespace modchat;
using namespace modchat::detection;

namespace {

Classification hate(int severity, bool hol = false)
{
    return Classification::hate(severity, hol);
}

} // namespace

TEST(Tokenize, LowercasesAndKeepsInnerApostrophes)
{
    EXPECT_EQ(tokenize("The Holocaust didn't HAPPEN!"),
              (std::vector<std::string>{"the", "holocaust", "didn't", "happen"}));
    EXPECT_EQ(tokenize("'quoted' words"), (std::vector<std::string>{"quoted'", "words"}));
    EXPECT_EQ(tokenize("  ...  "), std::vector<std::string>{});
    EXPECT_EQ(tokenize("schön Ελλάδα"), (std::vector<std::string>{"schön", "Ελλάδα"}));
}

// Expected values were worked out by hand against data/lexicon.tsv.
TEST(Lexicon, ShippedFixtureHandEvaluatedCorpus)
{
    const struct {
        const char* text;
        Classification expected;
    } corpus[] = {
        {"the holocaust never happened", hate(5, true)},
        {"nice weather today", Classification::no_hate()},
        {"The Holocaust is a LIE!!!", hate(5, true)},
        {"They are vermin and should be exterminated", hate(5)},
        {"you are stupid", hate(1)},
        {"Shut up, you idiots", hate(2)},
        {"filthy parasites", hate(3)},
        {"go back where you came from, vermin", hate(4)},
        {"the holocaust happened", Classification::no_hate()},
        {"holocausts never happened", Classification::no_hate()},
        {"I never said the holocaust didn't happen", hate(5, true)},
        {"stupidity is not a crime", Classification::no_hate()},
        {"Gas chambers never existed, idiots", hate(5, true)},
        {"SUBHUMAN", hate(4)},
        {"Das ist ein schöner Tag", Classification::no_hate()},
        {"shut the door", Classification::no_hate()},
    };
    const Lexicon& lexicon = Lexicon::builtin();
    for (const auto& c : corpus)
        EXPECT_EQ(lexicon.evaluate(c.text), c.expected) << c.text;
}

TEST(Lexicon, ParseRejectsMalformedLinesWithLineNumber)
{
    EXPECT_NO_THROW(Lexicon::parse("# comment\n\n3\t-\tbad words\r\n"));
    for (const char* bad : {"3 - words", "0\t-\tx", "6\t-\tx", "3\tyes\tx", "3\t-\t!!!", "33\t-\tx"}) {
        try {
            Lexicon::parse(std::string("# header\n") + bad);
            ADD_FAILURE() << bad;
        } catch (const ValidationError& e) {
            EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
        }
    }
}

TEST(Lexicon, AddRejectsOutOfRangeWeight)
{
    Lexicon lexicon;
    EXPECT_THROW(lexicon.add({{"x"}, 0, false}), ValidationError);
    EXPECT_THROW(lexicon.add({{"x"}, 6, false}), ValidationError);
    EXPECT_THROW(lexicon.add({{}, 3, false}), ValidationError);
}

TEST(Lexicon, HolMarkerForcesSeverityFive)
{
    Lexicon lexicon;
    lexicon.add({{"denial", "phrase"}, 2, true});
    EXPECT_EQ(lexicon.evaluate("a denial phrase"), hate(5, true));
}

TEST(Lexicon, MonotonicityProperty)
{
    std::mt19937 rng(99);
    const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto phrase = [&](int max_len) {
        std::vector<std::string> tokens;
        for (int i = pick(1, max_len); i > 0; --i)
            tokens.push_back(vocab[pick(0, static_cast<int>(vocab.size()) - 1)]);
        return tokens;
    };
    auto severity = [](const Classification& c) { return c.severity.value_or(0); };

    for (int iter = 0; iter < 300; ++iter) {
        Lexicon lexicon;
        for (int i = pick(0, 6); i > 0; --i)
            lexicon.add({phrase(3), pick(1, 5), pick(0, 4) == 0});
        std::vector<std::string> texts;
        for (int i = 0; i < 10; ++i) {
            std::string text;
            for (const auto& t : phrase(8))
                text += t + " ";
            texts.push_back(text);
        }
        std::vector<Classification> before;
        for (const auto& t : texts)
            before.push_back(lexicon.evaluate(t));

        lexicon.add({phrase(3), pick(1, 5), pick(0, 4) == 0});
        for (std::size_t i = 0; i < texts.size(); ++i) {
            const Classification after = lexicon.evaluate(texts[i]);
            ASSERT_GE(severity(after), severity(before[i])) << texts[i];
            if (before[i].hol == Hol::Denial)
                ASSERT_EQ(after.hol, Hol::Denial);
            ASSERT_TRUE(after.valid());
        }
    }
}

TEST(Lexicon, BackendInvariantsOnFuzzCorpus)
{
    std::mt19937 rng(7);
    const Lexicon& lexicon = Lexicon::builtin();
    std::vector<std::string> pieces{"holocaust", "never", "happened", "vermin", "shut", "up", "nice",
                                    "!", "\n", "é", "'", "DE", "hoax", "stupid", "  "};
    LexiconBackend backend;
    for (int iter = 0; iter < 500; ++iter) {
        std::string text = "x";
        for (int i = std::uniform_int_distribution<int>(0, 12)(rng); i > 0; --i)
            text += " " + pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng)];
        const Classification c = classify(text, backend);
        ASSERT_TRUE(c.valid()) << text;
        ASSERT_EQ(c, lexicon.evaluate(text));
    }
}

TEST(Classify, RejectsBlankText)
{
    LexiconBackend backend;
    EXPECT_THROW(classify("", backend), ValidationError);
    EXPECT_THROW(classify(" \n\t ", backend), ValidationError);
}

TEST(Classify, InconsistentBackendAnswerIsBackendError)
{
    struct Broken : DetectionBackend {
        Classification classify(const std::string&) override
        {
            return Classification{Label::NoHate, 3, Hol::None};
        }
        CounterSpeech generate_counter(const CounterRequest&) override { return {}; }
    } broken;
    EXPECT_THROW(classify("text", broken), BackendError);
}

TEST(Classification, Invariants)
{
    EXPECT_TRUE(Classification::no_hate().valid());
    EXPECT_EQ(Classification::hate(3, true).severity, 5);
    EXPECT_THROW(Classification::hate(0, false), PreconditionError);
    EXPECT_THROW(Classification::hate(6, false), PreconditionError);
    EXPECT_FALSE((Classification{Label::Hate, 4, Hol::Denial}.valid()));
    EXPECT_FALSE((Classification{Label::NoHate, std::nullopt, Hol::Denial}.valid()));
    EXPECT_FALSE((Classification{Label::Hate, std::nullopt, Hol::None}.valid()));
}
