// compliance-check: runs one compliance request against the rulebases and
// prints the verdict document.

#include <iostream>

#include "CLI11.hpp"
#include "modchat/common/errors.hpp"
#include "modchat/compliance/compliance.hpp"

using namespace modchat::compliance;

int main(int argc, char** argv)
{
    CLI::App app{"Check a message's legal and ethical compliance"};
    std::string location;
    int age = 0;
    std::string context = "adults_only";
    int score = 0;
    std::string hol = "none";
    std::string rulebase_dir;
    std::optional<int> threshold;
    bool pretty = false;
    app.add_option("--location", location, "Country code of the author, e.g. gr or us-ca")->required();
    app.add_option("--age", age, "Author age in years")->required();
    app.add_option("--context", context, "adults_only or minors_present");
    app.add_option("--score", score, "Hate speech score 0..5")->required();
    app.add_option("--hol", hol, "hol_denial or none");
    app.add_option("--rulebase-dir", rulebase_dir, "Directory with legal.rules and ethical.rules");
    app.add_option("--ethical-threshold", threshold, "Override ethicalThreshold/1");
    app.add_flag("--pretty", pretty, "Indented output");
    CLI11_PARSE(app, argc, argv);

    try {
        RulebasePair rulebases = rulebase_dir.empty() ? default_rulebases() : load_rulebases(rulebase_dir);
        if (threshold)
            rulebases.ethical = with_ethical_threshold(rulebases.ethical, *threshold);
        const ComplianceRequest request{location, age, parse_chat_context(context), score, parse_hol(hol)};
        std::cout << render(check(request, rulebases), pretty ? RenderStyle::Pretty : RenderStyle::Compact)
                  << "\n";
        return 0;
    } catch (const modchat::ValidationError& e) {
        std::cerr << "invalid request: " << e.what() << "\n";
        return 2;
    } catch (const modchat::ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    }
}
