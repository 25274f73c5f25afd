#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spotdiff/actions.hpp"
#include "spotdiff/errors.hpp"
#include "spotdiff/rng.hpp"
#include "spotdiff/taxonomy.hpp"

namespace spotdiff {

enum class TransitionKind { Same, Diff, More, Less };

inline const char* to_string(TransitionKind k) {
    switch (k) {
        case TransitionKind::Same: return "same";
        case TransitionKind::Diff: return "diff";
        case TransitionKind::More: return "more";
        case TransitionKind::Less: return "less";
    }
    return "?";
}

class TemplateCatalog {
public:
    static TemplateCatalog parse(std::istream& in) {
        TemplateCatalog cat;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::string stripped = Taxonomy::trim(line);
            if (stripped.empty() || stripped[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw ParseError("templates line " + std::to_string(lineno) + ": missing tab");
            const std::string kind = Taxonomy::trim(line.substr(0, tab));
            const std::string pattern = Taxonomy::trim(line.substr(tab + 1));
            if (pattern.empty())
                throw ParseError("templates line " + std::to_string(lineno) + ": empty pattern");
            if (kind.rfind("transition-", 0) == 0) {
                cat.transitions_[transition_from_string(kind.substr(11))].push_back(pattern);
            } else {
                cat.questions_[subtype_from_string(kind)].push_back(pattern);
            }
        }
        return cat;
    }

    const std::vector<std::string>& question_patterns(QuestionSubtype s) const {
        auto it = questions_.find(s);
        if (it == questions_.end() || it->second.empty())
            throw RenderError(std::string("no templates for subtype ") + to_string(s));
        return it->second;
    }

    const std::vector<std::string>& transition_patterns(TransitionKind k) const {
        auto it = transitions_.find(k);
        if (it == transitions_.end() || it->second.empty())
            throw RenderError(std::string("no transition sentences for ") + to_string(k));
        return it->second;
    }

    std::size_t question_count() const {
        std::size_t n = 0;
        for (const auto& [k, v] : questions_) n += v.size();
        return n;
    }
    std::size_t transition_count() const {
        std::size_t n = 0;
        for (const auto& [k, v] : transitions_) n += v.size();
        return n;
    }
    std::size_t total_count() const { return question_count() + transition_count(); }

private:
    static TransitionKind transition_from_string(const std::string& s) {
        if (s == "same") return TransitionKind::Same;
        if (s == "diff") return TransitionKind::Diff;
        if (s == "more") return TransitionKind::More;
        if (s == "less") return TransitionKind::Less;
        throw ParseError("unknown transition kind '" + s + "'");
    }

    std::map<QuestionSubtype, std::vector<std::string>> questions_;
    std::map<TransitionKind, std::vector<std::string>> transitions_;
};

// Maps property sets to noun phrases. Phrases are produced from the
// attribute adjectives and a per-category noun form, with an exception table
// for mass nouns, pairwise items and a few awkward category names.
class PhraseCatalog {
public:
    explicit PhraseCatalog(const Taxonomy* taxonomy = nullptr) : taxonomy_(taxonomy) {
        exceptions_ = {
            {"furniture", {NounStyle::Piece, "furniture"}},
            {"sports equipment", {NounStyle::Piece, "sports equipment"}},
            {"kitchenware", {NounStyle::Piece, "kitchenware"}},
            {"tableware", {NounStyle::Piece, "tableware"}},
            {"office equipment", {NounStyle::Piece, "office equipment"}},
            {"stationery", {NounStyle::Piece, "stationery"}},
            {"baked food", {NounStyle::Piece, "baked food"}},
            {"food", {NounStyle::Regular, "food item"}},
            {"shoes", {NounStyle::Pair, "shoes"}},
            {"boots", {NounStyle::Pair, "boots"}},
            {"sandals", {NounStyle::Pair, "sandals"}},
            {"canvas shoes", {NounStyle::Pair, "canvas shoes"}},
            {"glasses", {NounStyle::Pair, "glasses"}},
            {"tennis", {NounStyle::Regular, "tennis ball"}},
            {"soccer", {NounStyle::Regular, "soccer ball"}},
            {"milk", {NounStyle::Bottle, "milk"}},
            {"tea", {NounStyle::Bottle, "tea"}},
            {"cola", {NounStyle::Bottle, "cola"}},
            {"beer", {NounStyle::Bottle, "beer"}},
            {"bread", {NounStyle::Loaf, "bread"}},
        };
    }

    // All phrase pairs for a property set; attribute-only sets have two
    // head-noun variants.
    std::vector<std::pair<std::string, std::string>> phrases_for(const PropertySet& pset) const {
        if (pset.is_identifier())
            throw RenderError("identifier property sets have no phrase");
        std::string adj;
        if (pset.color) adj += *pset.color;
        if (pset.material) adj += (adj.empty() ? "" : " ") + *pset.material;
        std::vector<std::pair<std::string, std::string>> out;
        if (!pset.category) {
            for (const char* head : {"thing", "object"}) {
                std::string base = adj.empty() ? head : adj + " " + head;
                out.emplace_back(base, pluralize(base));
            }
            return out;
        }
        const NounForm form = noun_form(*pset.category);
        switch (form.style) {
            case NounStyle::Regular: {
                std::string base = adj.empty() ? form.base : adj + " " + form.base;
                out.emplace_back(base, pluralize(base));
                break;
            }
            case NounStyle::Piece: {
                std::string tail = adj.empty() ? form.base : adj + " " + form.base;
                out.emplace_back("piece of " + tail, "pieces of " + tail);
                break;
            }
            case NounStyle::Pair: {
                std::string tail = adj.empty() ? form.base : adj + " " + form.base;
                out.emplace_back("pair of " + tail, "pairs of " + tail);
                break;
            }
            case NounStyle::Bottle: {
                std::string head = adj.empty() ? "bottle" : adj + " bottle";
                out.emplace_back(head + " of " + form.base, pluralize(head) + " of " + form.base);
                break;
            }
            case NounStyle::Loaf: {
                std::string head = adj.empty() ? "loaf" : adj + " loaf";
                std::string pl = adj.empty() ? "loaves" : adj + " loaves";
                out.emplace_back(head + " of " + form.base, pl + " of " + form.base);
                break;
            }
        }
        return out;
    }

    std::string phrase(const PropertySet& pset, bool plural, Rng& rng) const {
        const auto options = phrases_for(pset);
        const auto& pick = options[rng.range(options.size())];
        return plural ? pick.second : pick.first;
    }

    // Inverse lookup: maps a generated phrase (singular or plural) back to
    // its property set. Used to check that phrases are unambiguous.
    std::optional<PropertySet> parse_phrase(const std::string& phrase) const {
        std::string s = phrase;
        std::optional<std::string> forced_category;
        if (eat_prefix(s, "pieces of ") || eat_prefix(s, "piece of ")) {
            // fall through; category resolved from the tail
        } else if (eat_prefix(s, "pairs of ") || eat_prefix(s, "pair of ")) {
            // ditto
        }
        std::optional<std::string> color, material;
        for (const auto& c : color_vocabulary())
            if (eat_prefix(s, c + " ")) {
                color = c;
                break;
            }
        for (const auto& m : material_vocabulary())
            if (eat_prefix(s, m + " ")) {
                material = m;
                break;
            }
        // container forms: "<adj> bottle(s) of tea", "<adj> loaf/loaves of bread"
        if (eat_prefix(s, "bottles of ") || eat_prefix(s, "bottle of ") ||
            eat_prefix(s, "loaves of ") || eat_prefix(s, "loaf of ")) {
            forced_category = s;
        }
        if (forced_category) return PropertySet::of(color, material, *forced_category);
        if (s == "thing" || s == "things" || s == "object" || s == "objects") {
            PropertySet p = PropertySet::of(color, material, {});
            if (p.empty()) return std::nullopt;
            return p;
        }
        auto it = reverse_nouns().find(s);
        if (it == reverse_nouns().end()) return std::nullopt;
        return PropertySet::of(color, material, it->second);
    }

    // Distinct phrase strings over every property set reachable from the
    // asset catalog.
    std::size_t catalog_size(const AssetCatalog& assets) const {
        std::set<PropertySet> reachable;
        for (const auto& a : assets.assets())
            for (const auto& c : a.colors)
                for (const auto& m : a.materials) {
                    ObjectTraits traits{c, m, a.category};
                    for (const auto& p : taxonomy_->enumerate_property_sets(traits, "x"))
                        if (!p.is_identifier()) reachable.insert(p);
                }
        std::set<std::string> phrases;
        for (const auto& p : reachable)
            for (const auto& [sg, pl] : phrases_for(p)) {
                phrases.insert(sg);
                phrases.insert(pl);
            }
        return phrases.size();
    }

    static std::string pluralize(const std::string& word) {
        if (word.size() >= 2) {
            const char last = word.back();
            const char prev = word[word.size() - 2];
            if (last == 'y' && std::string("aeiou").find(prev) == std::string::npos)
                return word.substr(0, word.size() - 1) + "ies";
            if (last == 's' || last == 'x' || last == 'z') return word + "es";
            if ((last == 'h') && (prev == 'c' || prev == 's')) return word + "es";
        }
        return word + "s";
    }

private:
    enum class NounStyle { Regular, Piece, Pair, Bottle, Loaf };
    struct NounForm {
        NounStyle style;
        std::string base;
    };

    NounForm noun_form(const std::string& category) const {
        auto it = exceptions_.find(category);
        if (it != exceptions_.end()) return it->second;
        return NounForm{NounStyle::Regular, category};
    }

    const std::map<std::string, std::string>& reverse_nouns() const {
        if (reverse_.empty() && taxonomy_) {
            for (const auto& node : taxonomy_->nodes()) {
                const NounForm f = noun_form(node.name);
                if (f.style == NounStyle::Regular || f.style == NounStyle::Piece ||
                    f.style == NounStyle::Pair) {
                    reverse_[f.base] = node.name;
                    reverse_[pluralize(f.base)] = node.name;
                }
            }
        }
        return reverse_;
    }

    static bool eat_prefix(std::string& s, const std::string& prefix) {
        if (s.rfind(prefix, 0) == 0) {
            s = s.substr(prefix.size());
            return true;
        }
        return false;
    }

    const Taxonomy* taxonomy_;
    std::map<std::string, NounForm> exceptions_;
    mutable std::map<std::string, std::string> reverse_;
};

inline std::string number_word(int n) {
    static const char* words[] = {"zero", "one", "two",   "three", "four", "five",
                                  "six",  "seven", "eight", "nine",  "ten"};
    if (n >= 0 && n <= 10) return words[n];
    return std::to_string(n);
}

inline std::string with_article(const std::string& phrase) {
    if (phrase.empty()) return phrase;
    const char c = static_cast<char>(std::tolower(phrase.front()));
    const bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
    return (vowel ? "an " : "a ") + phrase;
}

inline std::string capitalize(std::string s) {
    for (auto& ch : s) {
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            break;
        }
    }
    return s;
}

// A question action realized into text; keeps the chosen template so the
// answer realization can react to self-disclosing patterns.
struct RealizedQuestion {
    QuestionAction action;
    int template_index = 0;
    std::string text;
};

namespace detail {

// Transition sentences are drawn with halving weights (the first listed
// variant is the most common), mirroring how stock acknowledgments dominate
// in conversation. Question templates stay uniform.
inline const std::string& pick_transition(const std::vector<std::string>& options, Rng& rng) {
    const std::size_t k = options.size();
    const std::uint64_t total = (1ull << k) - 1;
    std::uint64_t draw = rng.range(total);
    for (std::size_t i = 0; i < k; ++i) {
        const std::uint64_t weight = 1ull << (k - 1 - i);
        if (draw < weight) return options[i];
        draw -= weight;
    }
    return options.back();
}

inline bool replace_once(std::string& s, const std::string& marker, const std::string& value) {
    auto pos = s.find(marker);
    if (pos == std::string::npos) return false;
    s.replace(pos, marker.size(), value);
    return true;
}

inline void replace_all_of(std::string& s, const std::string& marker, const std::string& value) {
    while (replace_once(s, marker, value)) {
    }
}

inline void check_filled(const std::string& s) {
    if (s.find('[') != std::string::npos)
        throw RenderError("unfilled slot marker in rendered text: " + s);
}

}  // namespace detail

// Uniform template choice within the subtype, then slot filling. Counts up
// to ten are spelled out; property sets are realized through the phrase
// catalog with number agreement.
inline RealizedQuestion realize_question(const TemplateCatalog& templates,
                                         const PhraseCatalog& phrases, const QuestionAction& q,
                                         Rng& rng) {
    const auto& patterns = templates.question_patterns(q.subtype);
    const int pick = static_cast<int>(rng.range(patterns.size()));
    std::string s = patterns[static_cast<std::size_t>(pick)];

    switch (q.subtype) {
        case QuestionSubtype::CountNoHint: {
            detail::replace_all_of(s, "[f(X)]", phrases.phrase(*q.p_set, true, rng));
            break;
        }
        case QuestionSubtype::CountHint: {
            const int c = *q.count_hint;
            detail::replace_all_of(s, "[C]", number_word(c));
            detail::replace_all_of(s, "[f(X)]", phrases.phrase(*q.p_set, c != 1, rng));
            detail::replace_all_of(s, "[A]", c == 1 ? "is" : "are");
            break;
        }
        case QuestionSubtype::ExtremePic: {
            detail::replace_all_of(s, "[L]", to_string(*q.direction));
            if (q.self_desc)
                detail::replace_all_of(s, "[f(X)]",
                                       with_article(phrases.phrase(*q.self_desc, false, rng)));
            break;
        }
        case QuestionSubtype::ExtremeObj: {
            detail::replace_all_of(s, "[L1]", to_string(*q.direction));
            detail::replace_all_of(s, "[L]", to_string(*q.direction));
            detail::replace_all_of(s, "[f(X2)]", phrases.phrase(*q.anchor, false, rng));
            if (q.self_desc)
                detail::replace_all_of(s, "[f(X1)]",
                                       with_article(phrases.phrase(*q.self_desc, false, rng)));
            break;
        }
        case QuestionSubtype::ExtremeObj2: {
            detail::replace_all_of(s, "[L1]", to_string(*q.direction));
            detail::replace_all_of(s, "[L2]", to_string(*q.direction2));
            detail::replace_all_of(s, "[f(X2)]", phrases.phrase(*q.anchor, false, rng));
            if (q.self_desc)
                detail::replace_all_of(s, "[f(X1)]",
                                       with_article(phrases.phrase(*q.self_desc, false, rng)));
            break;
        }
        case QuestionSubtype::QueryColor: {
            detail::replace_all_of(s, "[f(X)]", phrases.phrase(*q.p_set, false, rng));
            if (q.self_value) detail::replace_all_of(s, "[C]", *q.self_value);
            break;
        }
        case QuestionSubtype::QueryMaterial: {
            detail::replace_all_of(s, "[f(X)]", phrases.phrase(*q.p_set, false, rng));
            if (q.self_value) detail::replace_all_of(s, "[M]", *q.self_value);
            break;
        }
        case QuestionSubtype::RefIt:
        case QuestionSubtype::RefThem:
            break;  // no slots
    }
    detail::check_filled(s);
    return RealizedQuestion{q, pick, capitalize(s)};
}

// Whether the chosen question template disclosed the asker's own value
// (count hint, own attribute value, or own extreme object).
inline bool question_discloses(const TemplateCatalog& templates, const RealizedQuestion& q) {
    const auto& patterns = templates.question_patterns(q.action.subtype);
    const std::string& p = patterns[static_cast<std::size_t>(q.template_index)];
    switch (q.action.subtype) {
        case QuestionSubtype::CountHint: return true;
        case QuestionSubtype::QueryColor: return p.find("[C]") != std::string::npos;
        case QuestionSubtype::QueryMaterial: return p.find("[M]") != std::string::npos;
        case QuestionSubtype::ExtremePic: return p.find("[f(X)]") != std::string::npos;
        case QuestionSubtype::ExtremeObj:
        case QuestionSubtype::ExtremeObj2: return p.find("[f(X1)]") != std::string::npos;
        default: return false;
    }
}

inline std::string realize_enumeration(const PhraseCatalog& phrases,
                                       const std::vector<DescGroup>& groups, Rng& rng) {
    std::vector<std::string> parts;
    for (const auto& g : groups) {
        if (g.count == 1)
            parts.push_back(with_article(phrases.phrase(g.desc, false, rng)));
        else
            parts.push_back(number_word(g.count) + " " + phrases.phrase(g.desc, true, rng));
    }
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) s += (i + 1 == parts.size()) ? " and " : ", ";
        s += parts[i];
    }
    return s;
}

// Answer realization. Count answers to hint questions become transition
// sentences comparing the two counts; attribute answers to self-disclosing
// query templates do the same. Descriptions render as grouped enumerations.
inline std::string realize_answer(const TemplateCatalog& templates, const PhraseCatalog& phrases,
                                  const AnswerAction& a, const RealizedQuestion& question,
                                  Rng& rng) {
    const QuestionAction& q = question.action;
    switch (a.kind) {
        case AnswerKind::Count: {
            if (q.subtype == QuestionSubtype::CountHint && q.count_hint) {
                TransitionKind kind = TransitionKind::Same;
                if (a.count > *q.count_hint)
                    kind = TransitionKind::More;
                else if (a.count < *q.count_hint)
                    kind = TransitionKind::Less;
                const auto& options = templates.transition_patterns(kind);
                return capitalize(detail::pick_transition(options, rng));
            }
            return capitalize(number_word(a.count));
        }
        case AnswerKind::Description:
            return capitalize(realize_enumeration(phrases, a.groups, rng));
        case AnswerKind::Attribute: {
            if (is_query(q.subtype) && q.self_value && question_discloses(templates, question)) {
                const bool same = a.value == *q.self_value;
                const auto& options = templates.transition_patterns(same ? TransitionKind::Same
                                                                         : TransitionKind::Diff);
                std::string t = detail::pick_transition(options, rng);
                if (!same) t += ", it is " + a.value;
                return capitalize(t);
            }
            return capitalize(a.value);
        }
        case AnswerKind::None:
            return a.reason == NoneReason::Absent ? "There is no such thing in my picture"
                                                  : "I can't tell which one you mean";
    }
    throw RenderError("unhandled answer kind");
}

}  // namespace spotdiff
