#include "modchat/compliance/compliance.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "builtin_rulebases.hpp"
#include "modchat/common/errors.hpp"
#include "modchat/rules/dispatch.hpp"
#include "modchat/rules/parser.hpp"

namespace modchat::compliance {

namespace {

using Json = nlohmann::json;
using Ordered = nlohmann::ordered_json;

const std::regex kLocation("^[a-z]{2}(-[a-z0-9]{1,3})?$");

const char* const kRequestFields[] = {"user_location", "user_age", "chat_context", "hate_speech_score", "hol"};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigurationError("cannot read rulebase " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

rules::Rulebase parse_named(std::string_view source, const std::string& name)
{
    try {
        return rules::parse_rulebase(source, name);
    } catch (const rules::SyntaxError& e) {
        throw ConfigurationError(name + " rulebase: " + e.what());
    }
}

const std::string& text_arg(const rules::Effect& e, std::size_t i)
{
    const auto* t = i < e.args.size() ? e.args[i].as<rules::Text>() : nullptr;
    if (!t)
        throw ConfigurationError("result effect " + rules::to_string(e) + " lacks a text argument " +
                                 std::to_string(i + 1));
    return t->value;
}

/// Applies the `result` effects of one rulebase and checks it resumed once.
void collect(const std::vector<rules::Effect>& effects, const std::string& rulebase, Verdict& verdict)
{
    std::size_t resumes = 0;
    for (const auto& e : effects) {
        if (e.verb == "resume") {
            ++resumes;
            continue;
        }
        if (e.verb != "result")
            throw ConfigurationError(rulebase + " rulebase emitted unknown effect " + rules::to_string(e));
        const std::string& kind = text_arg(e, 0);
        if (kind == "legal_violation" && e.args.size() == 2) {
            verdict.legal = LegalViolation{text_arg(e, 1)};
        } else if (kind == "ethical_violation" && e.args.size() == 3) {
            const auto* n = e.args[2].as<rules::Number>();
            const auto* score = n ? std::get_if<std::int64_t>(&n->value) : nullptr;
            if (!score || *score < 1 || *score > 5)
                throw ConfigurationError(rulebase + " rulebase emitted a score outside 1..5: " + rules::to_string(e));
            verdict.ethical = EthicalViolation{text_arg(e, 1), static_cast<int>(*score)};
        } else {
            throw ConfigurationError(rulebase + " rulebase emitted malformed result " + rules::to_string(e));
        }
    }
    if (resumes != 1)
        throw ConfigurationError(rulebase + " rulebase answered with " + std::to_string(resumes) +
                                 " resume effects instead of one");
}

/// Three-space indentation and no space after the colon, as in the
/// published verdict listing.
void pretty(const Ordered& value, int depth, std::string& out)
{
    if (!value.is_object() || value.empty()) {
        out += value.dump();
        return;
    }
    out += "{\n";
    std::size_t i = 0;
    for (const auto& [key, child] : value.items()) {
        out.append(3 * (depth + 1), ' ');
        out += Ordered(key).dump() + ":";
        pretty(child, depth + 1, out);
        out += ++i < value.size() ? ",\n" : "\n";
    }
    out.append(3 * depth, ' ');
    out += "}";
}

rules::Term payload_of(const ComplianceRequest& r)
{
    return rules::Term::slots({
        {"user_location", rules::Term::atom(normalize_location(r.user_location))},
        {"user_age", rules::Term::integer(r.user_age)},
        {"chat_context", rules::Term::atom(std::string(to_string(r.chat_context)))},
        {"hate_speech_score", rules::Term::integer(r.hate_speech_score)},
        {"hol", rules::Term::atom(std::string(to_string(r.hol)))},
    });
}

} // namespace

std::string_view to_string(ChatContext c)
{
    return c == ChatContext::AdultsOnly ? "adults_only" : "minors_present";
}

std::string_view to_string(HolFlag h)
{
    return h == HolFlag::Denial ? "hol_denial" : "none";
}

ChatContext parse_chat_context(std::string_view s)
{
    if (s == "adults_only")
        return ChatContext::AdultsOnly;
    if (s == "minors_present")
        return ChatContext::MinorsPresent;
    throw ValidationError("chat_context must be adults_only or minors_present, got " + std::string(s));
}

HolFlag parse_hol(std::string_view s)
{
    if (s == "hol_denial")
        return HolFlag::Denial;
    if (s == "none")
        return HolFlag::None;
    throw ValidationError("hol must be hol_denial or none, got " + std::string(s));
}

void validate(const ComplianceRequest& r)
{
    if (!std::regex_match(r.user_location, kLocation))
        throw ValidationError("user_location must be a country code such as gr or us-ca, got '" +
                              r.user_location + "'");
    if (r.user_age < 0 || r.user_age > 150)
        throw ValidationError("user_age must be in 0..150");
    if (r.hate_speech_score < 0 || r.hate_speech_score > 5)
        throw ValidationError("hate_speech_score must be in 0..5");
    if (r.hol == HolFlag::Denial && r.hate_speech_score != 5)
        throw ValidationError("hol_denial requires hate_speech_score 5");
}

std::string normalize_location(std::string_view location)
{
    return std::string(location.substr(0, location.find('-')));
}

Json to_json(const ComplianceRequest& r)
{
    return Json{{"user_location", r.user_location},
                {"user_age", r.user_age},
                {"chat_context", to_string(r.chat_context)},
                {"hate_speech_score", r.hate_speech_score},
                {"hol", to_string(r.hol)}};
}

ComplianceRequest request_from_json(const Json& j)
{
    if (!j.is_object())
        throw ValidationError("compliance request must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (std::find(std::begin(kRequestFields), std::end(kRequestFields), key) == std::end(kRequestFields))
            throw ValidationError("unknown compliance request field " + key);
    const auto field = [&](const char* name) -> const Json& {
        if (!j.contains(name))
            throw ValidationError(std::string("missing compliance request field ") + name);
        return j.at(name);
    };
    const auto text = [&](const char* name) {
        const Json& v = field(name);
        if (!v.is_string())
            throw ValidationError(std::string(name) + " must be a string");
        return v.get<std::string>();
    };
    const auto integer = [&](const char* name) {
        const Json& v = field(name);
        if (!v.is_number_integer())
            throw ValidationError(std::string(name) + " must be an integer");
        const auto n = v.get<std::int64_t>();
        if (n < -1'000'000 || n > 1'000'000)
            throw ValidationError(std::string(name) + " is out of range");
        return static_cast<int>(n);
    };
    ComplianceRequest r{text("user_location"), integer("user_age"), parse_chat_context(text("chat_context")),
                        integer("hate_speech_score"), parse_hol(text("hol"))};
    validate(r);
    return r;
}

std::string render(const Verdict& v, RenderStyle style)
{
    Ordered response = Ordered::object();
    if (v.legal)
        response["legal_violation"] = Ordered{{"reason", v.legal->reason}};
    if (v.ethical)
        response["ethical_violation"] = Ordered{{"reason", v.ethical->reason}, {"score", v.ethical->score}};
    const Ordered doc{{"response", response}};
    if (style == RenderStyle::Compact)
        return doc.dump();
    std::string out;
    pretty(doc, 0, out);
    return out;
}

Verdict parse_verdict(std::string_view document)
{
    const Json doc = Json::parse(document, nullptr, false);
    const auto fail = [](const std::string& why) -> Verdict { throw ValidationError("verdict: " + why); };
    if (doc.is_discarded() || !doc.is_object() || doc.size() != 1 || !doc.contains("response"))
        return fail("expected a single `response` object");
    const Json& response = doc.at("response");
    if (!response.is_object())
        return fail("`response` must be an object");
    Verdict v;
    for (const auto& [key, value] : response.items()) {
        if (key == "legal_violation" && value.is_object() && value.size() == 1 && value.contains("reason") &&
            value.at("reason").is_string()) {
            v.legal = LegalViolation{value.at("reason").get<std::string>()};
        } else if (key == "ethical_violation" && value.is_object() && value.size() == 2 &&
                   value.contains("reason") && value.at("reason").is_string() && value.contains("score") &&
                   value.at("score").is_number_integer()) {
            const int score = value.at("score").get<int>();
            if (score < 1 || score > 5)
                return fail("score outside 1..5");
            v.ethical = EthicalViolation{value.at("reason").get<std::string>(), score};
        } else {
            return fail("unexpected entry " + key);
        }
    }
    return v;
}

RulebasePair parse_rulebases(std::string_view legal_source, std::string_view ethical_source)
{
    return RulebasePair{parse_named(legal_source, "legal"), parse_named(ethical_source, "ethical")};
}

const RulebasePair& default_rulebases()
{
    static const RulebasePair pair = parse_rulebases(kBuiltinLegalRules, kBuiltinEthicalRules);
    return pair;
}

RulebasePair load_rulebases(const std::string& dir)
{
    return parse_rulebases(read_file(dir + "/legal.rules"), read_file(dir + "/ethical.rules"));
}

std::set<std::string> jurisdiction_facts(const rules::Rulebase& legal)
{
    std::set<std::string> out;
    if (const auto* indices = legal.clauses_for("illCountry/1"))
        for (std::size_t i : *indices) {
            const rules::Clause& c = legal.clauses()[i];
            if (const auto* a = c.head.args[0].as<rules::Atom>(); a && c.is_fact())
                out.insert(a->name);
        }
    return out;
}

rules::Rulebase with_ethical_threshold(const rules::Rulebase& ethical, int threshold)
{
    std::vector<rules::Clause> clauses;
    bool placed = false;
    for (const auto& c : ethical.clauses()) {
        if (c.head.key() != "ethicalThreshold/1") {
            clauses.push_back(c);
        } else if (!placed) {
            clauses.push_back(rules::Clause{rules::Literal{"ethicalThreshold", {rules::Term::integer(threshold)}, {}}, {}});
            placed = true;
        }
    }
    if (!placed)
        clauses.insert(clauses.begin(),
                       rules::Clause{rules::Literal{"ethicalThreshold", {rules::Term::integer(threshold)}, {}}, {}});
    return rules::Rulebase(ethical.name(), std::move(clauses));
}

Verdict check(const ComplianceRequest& request, const RulebasePair& rulebases)
{
    validate(request);
    const rules::Term payload = payload_of(request);
    Verdict verdict;
    try {
        collect(rules::dispatch("executionRequest", payload, rulebases.legal), "legal", verdict);
        collect(rules::dispatch("executionRequest", payload, rulebases.ethical), "ethical", verdict);
    } catch (const rules::EvaluationError& e) {
        throw ConfigurationError(std::string("rulebase evaluation failed: ") + e.what());
    }
    return verdict;
}

ComplianceChecker::ComplianceChecker(RulebasePair rulebases)
    : rulebases_(std::make_shared<const RulebasePair>(std::move(rulebases)))
{
}

Verdict ComplianceChecker::check(const ComplianceRequest& request)
{
    return compliance::check(request, *this->rulebases());
}

void ComplianceChecker::reload(RulebasePair rulebases)
{
    auto next = std::make_shared<const RulebasePair>(std::move(rulebases));
    std::lock_guard lock(mutex_);
    rulebases_ = std::move(next);
}

std::shared_ptr<const RulebasePair> ComplianceChecker::rulebases() const
{
    std::lock_guard lock(mutex_);
    return rulebases_;
}

} // namespace modchat::compliance
