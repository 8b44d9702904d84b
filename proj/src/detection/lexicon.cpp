#include "modchat/detection/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "builtin_lexicon.hpp"
#include "modchat/common/errors.hpp"
#include "modchat/detection/templates.hpp"

namespace modchat::detection {

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        // Apostrophes stay inside words so "didn't" is one token.
        if (std::isalnum(c) || c >= 0x80 || (c == '\'' && !current.empty())) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

Lexicon Lexicon::parse(std::string_view tsv)
{
    Lexicon lexicon;
    std::istringstream in{std::string(tsv)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const auto fail = [&](const std::string& msg) {
            throw ValidationError("lexicon line " + std::to_string(line_no) + ": " + msg);
        };
        const std::size_t t1 = line.find('\t');
        const std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            fail("expected `weight<TAB>hol<TAB>phrase`");
        const std::string weight = line.substr(0, t1);
        const std::string hol = line.substr(t1 + 1, t2 - t1 - 1);
        if (weight.size() != 1 || weight[0] < '1' || weight[0] > '5')
            fail("weight must be 1..5");
        if (hol != "hol" && hol != "-")
            fail("hol column must be `hol` or `-`");
        LexiconRule rule{tokenize(line.substr(t2 + 1)), weight[0] - '0', hol == "hol"};
        if (rule.tokens.empty())
            fail("empty phrase");
        lexicon.add(std::move(rule));
    }
    return lexicon;
}

Lexicon Lexicon::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigurationError("cannot read lexicon " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const Lexicon& Lexicon::builtin()
{
    static const Lexicon lexicon = parse(kBuiltinLexicon);
    return lexicon;
}

void Lexicon::add(LexiconRule rule)
{
    if (rule.weight < 1 || rule.weight > 5)
        throw ValidationError("lexicon weight must be in 1..5");
    if (rule.tokens.empty())
        throw ValidationError("lexicon rule needs at least one token");
    rules_.push_back(std::move(rule));
}

Classification Lexicon::evaluate(std::string_view text) const
{
    const auto tokens = tokenize(text);
    int severity = 0;
    bool hol = false;
    for (const auto& rule : rules_) {
        const bool matched =
            std::search(tokens.begin(), tokens.end(), rule.tokens.begin(), rule.tokens.end()) != tokens.end();
        if (!matched)
            continue;
        severity = std::max(severity, rule.weight);
        hol = hol || rule.hol_marker;
    }
    return severity == 0 ? Classification::no_hate() : Classification::hate(severity, hol);
}

CounterSpeech LexiconBackend::generate_counter(const CounterRequest& request)
{
    validate(request);
    std::string text = template_counter(request);
    auto warnings = length_warnings(text);
    return CounterSpeech{std::move(text), std::move(warnings)};
}

} // namespace modchat::detection
