#include "modchat/detection/detection.hpp"

#include <algorithm>
#include <cctype>

#include "modchat/common/errors.hpp"
#include "modchat/detection/templates.hpp"

namespace modchat::detection {

namespace {

constexpr std::size_t kMinCounterWords = 50;
constexpr std::size_t kMaxCounterWords = 100;

bool blank(std::string_view s)
{
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

} // namespace

std::string_view to_string(Label l)
{
    return l == Label::Hate ? "hate" : "no_hate";
}

std::string_view to_string(Hol h)
{
    return h == Hol::Denial ? "hol_denial" : "none";
}

Classification Classification::hate(int severity, bool hol_denial)
{
    if (severity < 1 || severity > 5)
        throw PreconditionError("severity must be in 1..5, got " + std::to_string(severity));
    return Classification{Label::Hate, hol_denial ? 5 : severity, hol_denial ? Hol::Denial : Hol::None};
}

bool Classification::valid() const
{
    if (label == Label::NoHate)
        return !severity && hol == Hol::None;
    if (!severity || *severity < 1 || *severity > 5)
        return false;
    return hol == Hol::None || *severity == 5;
}

Classification classify(std::string_view text, DetectionBackend& backend)
{
    if (blank(text))
        throw ValidationError("cannot classify an empty message");
    Classification c = backend.classify(std::string(text));
    if (!c.valid())
        throw BackendError("classifier returned an inconsistent classification");
    return c;
}

void validate(const CounterRequest& request)
{
    if (!request.violation.legal && !request.violation.ethical)
        throw PreconditionError("counter speech requires a legal or ethical violation");
    if (blank(request.language))
        throw PreconditionError("counter speech requires a language");
}

CounterSpeech generate_counter(const CounterRequest& request, DetectionBackend& backend)
{
    validate(request);
    return backend.generate_counter(request);
}

CounterSpeech generate_counter_or_template(const CounterRequest& request, DetectionBackend& backend)
{
    validate(request);
    try {
        return backend.generate_counter(request);
    } catch (const BackendError& e) {
        CounterSpeech fallback{template_counter(request), {}};
        fallback.warnings.push_back(std::string("counter backend failed, template used: ") + e.what());
        return fallback;
    }
}

std::size_t word_count(std::string_view text)
{
    std::size_t words = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        const bool space = std::isspace(c);
        if (!space && !in_word)
            ++words;
        in_word = !space;
    }
    return words;
}

std::vector<std::string> length_warnings(std::string_view text)
{
    const std::size_t n = word_count(text);
    if (n < kMinCounterWords || n > kMaxCounterWords)
        return {"counter speech has " + std::to_string(n) + " words, outside 50..100"};
    return {};
}

} // namespace modchat::detection
