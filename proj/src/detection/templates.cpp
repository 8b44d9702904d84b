#include "modchat/detection/templates.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace modchat::detection {

namespace {

enum class Topic { Holocaust, Hate, Minors, Other };

struct Language {
    const char* not_published;
    const char* legal_and_ethical; // {law} placeholder for the country phrase
    const char* ethical_only;
    const char* legal_only;
    const char* reason_label;
    std::map<Topic, const char*> body;
    const char* closing;
    std::map<std::string, const char*> law_of; // country code -> law phrase
    const char* law_of_unknown;
    std::map<std::string, const char*> reasons; // lowercase reason -> localized
    const char* category_both;
    const char* category_ethical;
    const char* category_legal;
};

const std::map<std::string, Language>& languages()
{
    static const std::map<std::string, Language> table = {
        {"en",
         Language{
             "Your message was not published.",
             "It breaks {law} and our community guidelines.",
             "It breaks our community guidelines.",
             "It breaks {law}.",
             "Reason:",
             {{Topic::Holocaust,
               "The Holocaust is documented beyond doubt by survivors, archives and court rulings. "
               "Denying it hurts the victims and their families and spreads hatred against Jewish "
               "people today."},
              {Topic::Hate,
               "Attacking people for who they are causes real harm and pushes them out of the "
               "conversation. Disagreement is welcome here, but it has to respect the dignity of "
               "every person."},
              {Topic::Minors,
               "Younger participants are currently in this room, so highly toxic content is "
               "withheld while they are present. The same message may appear once the room is for "
               "adults only again."},
              {Topic::Other,
               "Content like this harms other people and the conversation as a whole, and it "
               "undermines the trust that keeps this community open to everyone."}},
             "Please check reliable sources, rephrase your point without attacking anyone, and help "
             "keep this chat a place where everyone can take part safely.",
             {{"gr", "the law of Greece"},
              {"de", "the law of Germany"},
              {"at", "the law of Austria"},
              {"fr", "the law of France"},
              {"us", "the law of the United States"}},
             "the law of your country",
             {},
             "legal and ethical violation",
             "ethical violation",
             "legal violation",
         }},
        {"de",
         Language{
             "Deine Nachricht wurde nicht veröffentlicht.",
             "Sie verstößt gegen {law} und gegen unsere Community-Richtlinien.",
             "Sie verstößt gegen unsere Community-Richtlinien.",
             "Sie verstößt gegen {law}.",
             "Grund:",
             {{Topic::Holocaust,
               "Der Holocaust ist durch Überlebende, Archive und Gerichtsurteile zweifelsfrei "
               "belegt. Ihn zu leugnen verletzt die Opfer und ihre Familien und schürt heute Hass "
               "gegen jüdische Menschen."},
              {Topic::Hate,
               "Menschen dafür anzugreifen, wer sie sind, richtet echten Schaden an und drängt sie "
               "aus dem Gespräch. Widerspruch ist hier willkommen, aber er muss die Würde jedes "
               "Menschen achten."},
              {Topic::Minors,
               "In diesem Raum sind gerade jüngere Teilnehmende, deshalb werden stark toxische "
               "Inhalte zurückgehalten, solange sie anwesend sind. Dieselbe Nachricht kann "
               "erscheinen, sobald der Raum wieder nur für Erwachsene ist."},
              {Topic::Other,
               "Solche Inhalte schaden anderen Menschen und dem Gespräch insgesamt und untergraben "
               "das Vertrauen, das diese Gemeinschaft für alle offen hält."}},
             "Bitte prüfe verlässliche Quellen, formuliere deinen Punkt ohne Angriffe auf andere und "
             "hilf mit, dass sich alle in diesem Chat sicher beteiligen können.",
             {{"gr", "das Recht in Griechenland"},
              {"de", "das Recht in Deutschland"},
              {"at", "das Recht in Österreich"},
              {"fr", "das Recht in Frankreich"},
              {"us", "das Recht in den USA"}},
             "das Recht deines Landes",
             {{"holocaust denial", "Holocaustleugnung"},
              {"hate speech", "Hassrede"},
              {"protection of minors", "Jugendschutz"}},
             "Rechts- und Richtlinienverstoß",
             "Verstoß gegen die Community-Richtlinien",
             "Rechtsverstoß",
         }},
        {"el",
         Language{
             "Το μήνυμά σας δεν δημοσιεύτηκε.",
             "Παραβιάζει {law} και τις κατευθυντήριες γραμμές της κοινότητάς μας.",
             "Παραβιάζει τις κατευθυντήριες γραμμές της κοινότητάς μας.",
             "Παραβιάζει {law}.",
             "Λόγος:",
             {{Topic::Holocaust,
               "Το Ολοκαύτωμα είναι αδιαμφισβήτητα τεκμηριωμένο από επιζώντες, αρχεία και "
               "δικαστικές αποφάσεις. Η άρνησή του πληγώνει τα θύματα και τις οικογένειές τους και "
               "τροφοδοτεί σήμερα το μίσος κατά των Εβραίων."},
              {Topic::Hate,
               "Οι επιθέσεις σε ανθρώπους για το ποιοι είναι προκαλούν πραγματική βλάβη και τους "
               "αποκλείουν από τη συζήτηση. Η διαφωνία είναι ευπρόσδεκτη, αλλά πρέπει να σέβεται "
               "την αξιοπρέπεια κάθε ανθρώπου."},
              {Topic::Minors,
               "Σε αυτό το δωμάτιο συμμετέχουν αυτή τη στιγμή νεότερα άτομα, γι' αυτό το ιδιαίτερα "
               "τοξικό περιεχόμενο αποκρύπτεται όσο είναι παρόντα. Το ίδιο μήνυμα μπορεί να "
               "εμφανιστεί όταν το δωμάτιο είναι ξανά μόνο για ενήλικες."},
              {Topic::Other,
               "Τέτοιο περιεχόμενο βλάπτει άλλους ανθρώπους και τη συζήτηση συνολικά και "
               "υπονομεύει την εμπιστοσύνη που κρατά αυτή την κοινότητα ανοιχτή για όλους."}},
             "Σας παρακαλούμε να ελέγξετε αξιόπιστες πηγές, να διατυπώσετε την άποψή σας χωρίς "
             "επιθέσεις και να βοηθήσετε ώστε όλοι να συμμετέχουν με ασφάλεια σε αυτή τη συζήτηση.",
             {{"gr", "τη νομοθεσία της Ελλάδας"},
              {"de", "τη νομοθεσία της Γερμανίας"},
              {"at", "τη νομοθεσία της Αυστρίας"},
              {"fr", "τη νομοθεσία της Γαλλίας"},
              {"us", "τη νομοθεσία των ΗΠΑ"}},
             "τη νομοθεσία της χώρας σας",
             {{"holocaust denial", "Άρνηση του Ολοκαυτώματος"},
              {"hate speech", "ρητορική μίσους"},
              {"protection of minors", "προστασία ανηλίκων"}},
             "νομική και ηθική παραβίαση",
             "ηθική παραβίαση",
             "νομική παραβίαση",
         }},
    };
    return table;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string base_code(std::string_view tag)
{
    return lower(tag.substr(0, tag.find('-')));
}

const Language& language_for(std::string_view tag)
{
    const auto& table = languages();
    auto it = table.find(base_code(tag));
    return it == table.end() ? table.at("en") : it->second;
}

Topic topic_of(std::string_view reason)
{
    const std::string r = lower(reason);
    if (r == "holocaust denial")
        return Topic::Holocaust;
    if (r == "hate speech")
        return Topic::Hate;
    if (r == "protection of minors")
        return Topic::Minors;
    return Topic::Other;
}

std::string replace_law(std::string text, const std::string& law)
{
    const std::size_t at = text.find("{law}");
    if (at != std::string::npos)
        text.replace(at, 5, law);
    return text;
}

std::string render(const Language& lang, std::string_view language_tag, std::string_view origin,
                   const ViolationSummary& v)
{
    auto law_it = lang.law_of.find(base_code(origin));
    const std::string law = law_it == lang.law_of.end() ? lang.law_of_unknown : law_it->second;
    const char* violation = v.legal && v.ethical ? lang.legal_and_ethical
                            : v.legal            ? lang.legal_only
                                                 : lang.ethical_only;
    return std::string(lang.not_published) + " " + replace_law(violation, law) + " " + lang.reason_label +
           " " + localized_reason(v.reason, language_tag) + ". " + lang.body.at(topic_of(v.reason)) + " " +
           lang.closing;
}

} // namespace

std::string localized_reason(std::string_view reason, std::string_view language)
{
    const Language& lang = language_for(language);
    auto it = lang.reasons.find(lower(reason));
    return it == lang.reasons.end() ? std::string(reason) : it->second;
}

std::string localized_category(const ViolationSummary& violation, std::string_view language)
{
    const Language& lang = language_for(language);
    if (violation.legal && violation.ethical)
        return lang.category_both;
    return violation.legal ? lang.category_legal : lang.category_ethical;
}

std::string template_counter(const CounterRequest& request)
{
    return render(language_for(request.language), request.language, request.national_origin,
                  request.violation);
}

std::string generic_counter(const ViolationSummary& violation)
{
    return render(languages().at("en"), "en", "", violation);
}

} // namespace modchat::detection
