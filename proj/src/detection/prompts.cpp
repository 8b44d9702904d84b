#include "modchat/detection/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "modchat/common/errors.hpp"

namespace modchat::detection {

namespace {

const char* const kDetectionInstruction =
    "Analyze the following text for hate speech and respond with `hate' or `no-hate'. "
    "Provide a level of hate from 1-5, and indicate if Holocaust denial is present.";

const char* const kReplyContract =
    "Reply with exactly three lines and nothing else:\n"
    "line 1: hate or no-hate\n"
    "line 2: the level of hate from 1-5, or - for no-hate\n"
    "line 3: holocaust-denial: yes or holocaust-denial: no";

std::string trim_lower(std::string_view s)
{
    auto begin = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
    auto end = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
    std::string out = begin < end ? std::string(begin, end) : std::string();
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

[[noreturn]] void malformed(std::string_view reply, const std::string& why)
{
    throw BackendError("unparseable classifier reply (" + why + "): " +
                       std::string(reply.substr(0, 200)));
}

} // namespace

std::string escape_block(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string build_detection_prompt(std::string_view text)
{
    return std::string(kDetectionInstruction) + "\n\n" + kReplyContract + "\n\n<text>\n" +
           escape_block(text) + "\n</text>";
}

std::string build_counter_prompt(const CounterRequest& request)
{
    std::string violations;
    if (request.violation.legal)
        violations = "legal violation";
    if (request.violation.ethical)
        violations += std::string(violations.empty() ? "" : ", ") + "ethical violation";
    if (violations.empty())
        violations = "none";

    return "Generate a counter speech for the following text. You are an observer. The response "
           "should be between 50-100 words, contextualizing the problematic statements for someone of " +
           request.national_origin + " origin and providing the counter speech in " + request.language +
           ".\n\nThe text was classified as: " + violations +
           ". Reason: " + request.violation.reason + ".\n\n<text>\n" +
           escape_block(request.original_text) + "\n</text>";
}

Classification parse_detection_reply(std::string_view reply)
{
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= reply.size()) {
        const std::size_t end = std::min(reply.find('\n', start), reply.size());
        lines.push_back(trim_lower(reply.substr(start, end - start)));
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    while (!lines.empty() && lines.front().empty())
        lines.erase(lines.begin());

    if (lines.empty())
        malformed(reply, "empty");
    const std::string& label = lines[0];

    if (label == "no-hate") {
        // Accept "no-hate" alone, or with "-" and a "no" denial line.
        if (lines.size() > 3)
            malformed(reply, "too many lines");
        if (lines.size() >= 2 && lines[1] != "-")
            malformed(reply, "no-hate with a severity");
        if (lines.size() == 3 && lines[2] != "holocaust-denial: no")
            malformed(reply, "no-hate with a denial line other than `holocaust-denial: no`");
        return Classification::no_hate();
    }
    if (label != "hate")
        malformed(reply, "first line must be `hate` or `no-hate`");
    if (lines.size() != 3)
        malformed(reply, "hate needs exactly three lines");
    if (lines[1].size() != 1 || lines[1][0] < '1' || lines[1][0] > '5')
        malformed(reply, "severity must be a single digit 1-5");
    const int severity = lines[1][0] - '0';
    if (lines[2] == "holocaust-denial: yes")
        return Classification::hate(severity, true);
    if (lines[2] == "holocaust-denial: no")
        return Classification::hate(severity, false);
    malformed(reply, "third line must be `holocaust-denial: yes|no`");
}

} // namespace modchat::detection
