#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "json.hpp"
#include "modchat/rules/term.hpp"

namespace modchat::compliance {

enum class ChatContext { AdultsOnly, MinorsPresent };
enum class HolFlag { Denial, None };

std::string_view to_string(ChatContext c); // "adults_only" / "minors_present"
std::string_view to_string(HolFlag h);     // "hol_denial" / "none"
ChatContext parse_chat_context(std::string_view s);
HolFlag parse_hol(std::string_view s);

/// Invariants: user_location is a lowercase country code with an optional
/// region suffix ("gr", "us-ca"); user_age in 0..150; hate_speech_score in
/// 0..5 with 0 meaning no hate; hol_denial implies score 5.
struct ComplianceRequest {
    std::string user_location;
    int user_age = 0;
    ChatContext chat_context = ChatContext::AdultsOnly;
    int hate_speech_score = 0;
    HolFlag hol = HolFlag::None;

    bool operator==(const ComplianceRequest&) const = default;
};

/// Throws ValidationError naming the first broken invariant.
void validate(const ComplianceRequest& request);

/// Strips the region suffix: "us-ca" -> "us".
std::string normalize_location(std::string_view location);

/// The flat wire document with the five parameter names. from_json throws
/// ValidationError on missing, extra or mistyped fields.
nlohmann::json to_json(const ComplianceRequest& request);
ComplianceRequest request_from_json(const nlohmann::json& j);

struct LegalViolation {
    std::string reason;
    bool operator==(const LegalViolation&) const = default;
};

struct EthicalViolation {
    std::string reason;
    int score = 0;
    bool operator==(const EthicalViolation&) const = default;
};

struct Verdict {
    std::optional<LegalViolation> legal;
    std::optional<EthicalViolation> ethical;

    bool any() const { return legal || ethical; }
    bool operator==(const Verdict&) const = default;
};

enum class RenderStyle { Compact, Pretty };

/// `{"response":{...}}` with `legal_violation` before `ethical_violation`,
/// each present only when set. Compact has no whitespace; Pretty indents by
/// three spaces.
std::string render(const Verdict& verdict, RenderStyle style = RenderStyle::Compact);

/// Inverse of render for either style. Throws ValidationError.
Verdict parse_verdict(std::string_view document);

struct RulebasePair {
    rules::Rulebase legal;
    rules::Rulebase ethical;
};

/// The rulebases compiled into the library from rulebases/.
const RulebasePair& default_rulebases();

/// Reads legal.rules and ethical.rules from `dir`. Throws ConfigurationError
/// when a file is missing or does not parse.
RulebasePair load_rulebases(const std::string& dir);

/// Parses both sources; ConfigurationError names the file and position.
RulebasePair parse_rulebases(std::string_view legal_source, std::string_view ethical_source);

/// Countries listed by the illCountry/1 facts of the legal rulebase.
std::set<std::string> jurisdiction_facts(const rules::Rulebase& legal);

/// A copy of `ethical` whose ethicalThreshold/1 facts are replaced by a
/// single fact with `threshold`.
rules::Rulebase with_ethical_threshold(const rules::Rulebase& ethical, int threshold);

/// Dispatches the request as `executionRequest` to the legal rulebase, then
/// to the ethical one, and collects their `result` effects. Each rulebase
/// must answer with exactly one `resume`; anything else is a rulebase defect
/// and throws ConfigurationError. Malformed requests throw ValidationError.
Verdict check(const ComplianceRequest& request, const RulebasePair& rulebases);

/// Compliance decisions as seen by a caller. Implementations are safe to
/// call concurrently; remote failures surface as BackendError.
class ComplianceService {
public:
    virtual ~ComplianceService() = default;
    virtual Verdict check(const ComplianceRequest& request) = 0;
};

/// In-process checker over a swappable rulebase pair. reload() replaces the
/// pair atomically; checks already running finish on the old pair.
class ComplianceChecker : public ComplianceService {
public:
    ComplianceChecker() : ComplianceChecker(default_rulebases()) {}
    explicit ComplianceChecker(RulebasePair rulebases);

    Verdict check(const ComplianceRequest& request) override;
    void reload(RulebasePair rulebases);
    std::shared_ptr<const RulebasePair> rulebases() const;

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const RulebasePair> rulebases_;
};

} // namespace modchat::compliance
