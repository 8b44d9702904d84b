#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "modchat/detection/detection.hpp"

namespace modchat::detection {

/// A contiguous, case-insensitive token sequence with a weight in 1..5.
struct LexiconRule {
    std::vector<std::string> tokens;
    int weight = 1;
    bool hol_marker = false;
};

/// Lowercases ASCII and splits on anything that is not a letter or digit;
/// bytes of multi-byte UTF-8 sequences count as letters.
std::vector<std::string> tokenize(std::string_view text);

class Lexicon {
public:
    Lexicon() = default;

    /// Tab-separated `weight  hol  phrase` lines, where hol is `hol` or `-`.
    /// Blank lines and `#` comments are skipped. Throws ValidationError with
    /// the line number on malformed input.
    static Lexicon parse(std::string_view tsv);
    static Lexicon load(const std::string& path);
    /// The fixture lexicon compiled into the library.
    static const Lexicon& builtin();

    void add(LexiconRule rule);
    const std::vector<LexiconRule>& rules() const { return rules_; }

    /// label = hate iff any rule matches; severity = maximum matched weight;
    /// hol_denial iff a matched rule is a hol marker.
    Classification evaluate(std::string_view text) const;

private:
    std::vector<LexiconRule> rules_;
};

/// Deterministic offline backend: lexicon classification plus the localized
/// counter-speech templates.
class LexiconBackend : public DetectionBackend {
public:
    explicit LexiconBackend(Lexicon lexicon = Lexicon::builtin()) : lexicon_(std::move(lexicon)) {}

    Classification classify(const std::string& text) override { return lexicon_.evaluate(text); }
    CounterSpeech generate_counter(const CounterRequest& request) override;

private:
    Lexicon lexicon_;
};

} // namespace modchat::detection
