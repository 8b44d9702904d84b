#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modchat::detection {

enum class Label { Hate, NoHate };
enum class Hol { Denial, None };

std::string_view to_string(Label l); // "hate" / "no_hate"
std::string_view to_string(Hol h);   // "hol_denial" / "none"

/// Invariants: no_hate carries no severity and hol = none; hate carries a
/// severity in 1..5; hol_denial implies hate with severity 5.
struct Classification {
    Label label = Label::NoHate;
    std::optional<int> severity;
    Hol hol = Hol::None;

    static Classification no_hate() { return {}; }
    /// Holocaust denial raises the severity to 5.
    static Classification hate(int severity, bool hol_denial);

    bool valid() const;
    bool operator==(const Classification&) const = default;
};

struct ViolationSummary {
    bool legal = false;
    bool ethical = false;
    std::string reason;
};

struct CounterRequest {
    std::string original_text;
    std::string national_origin; // country code, e.g. "gr" or "us-ca"
    std::string language;        // language tag, e.g. "el"
    ViolationSummary violation;
};

struct CounterSpeech {
    std::string text;
    /// Advisory findings such as a word count outside 50..100.
    std::vector<std::string> warnings;
};

/// A classifier plus counter-speech generator. Implementations are stateless
/// after construction and safe to call concurrently. Remote failures surface
/// as BackendError.
class DetectionBackend {
public:
    virtual ~DetectionBackend() = default;
    virtual Classification classify(const std::string& text) = 0;
    virtual CounterSpeech generate_counter(const CounterRequest& request) = 0;
};

/// Validates the text (ValidationError when blank) and the backend's answer
/// (BackendError when it breaks the Classification invariants).
Classification classify(std::string_view text, DetectionBackend& backend);

/// PreconditionError unless the request names a legal or ethical violation
/// and a language; backend errors propagate.
CounterSpeech generate_counter(const CounterRequest& request, DetectionBackend& backend);

/// As generate_counter, but a BackendError yields the localized template
/// text with a warning recording the failure.
CounterSpeech generate_counter_or_template(const CounterRequest& request, DetectionBackend& backend);

void validate(const CounterRequest& request);

std::size_t word_count(std::string_view text);

/// Warnings for a counter text whose length falls outside 50..100 words.
std::vector<std::string> length_warnings(std::string_view text);

} // namespace modchat::detection
