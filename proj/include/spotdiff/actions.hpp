#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spotdiff/errors.hpp"
#include "spotdiff/taxonomy.hpp"

namespace spotdiff {

enum class QuestionSubtype {
    CountNoHint,
    CountHint,
    ExtremePic,
    ExtremeObj,
    ExtremeObj2,
    QueryColor,
    QueryMaterial,
    RefIt,
    RefThem,
};

inline const std::vector<QuestionSubtype>& all_subtypes() {
    static const std::vector<QuestionSubtype> v = {
        QuestionSubtype::CountNoHint, QuestionSubtype::CountHint,  QuestionSubtype::ExtremePic,
        QuestionSubtype::ExtremeObj,  QuestionSubtype::ExtremeObj2, QuestionSubtype::QueryColor,
        QuestionSubtype::QueryMaterial, QuestionSubtype::RefIt,    QuestionSubtype::RefThem};
    return v;
}

inline const char* to_string(QuestionSubtype s) {
    switch (s) {
        case QuestionSubtype::CountNoHint: return "count-nohint";
        case QuestionSubtype::CountHint: return "count-hint";
        case QuestionSubtype::ExtremePic: return "extreme-pic";
        case QuestionSubtype::ExtremeObj: return "extreme-obj";
        case QuestionSubtype::ExtremeObj2: return "extreme-obj2";
        case QuestionSubtype::QueryColor: return "query-color";
        case QuestionSubtype::QueryMaterial: return "query-material";
        case QuestionSubtype::RefIt: return "ref-it";
        case QuestionSubtype::RefThem: return "ref-them";
    }
    return "?";
}

inline QuestionSubtype subtype_from_string(const std::string& s) {
    for (auto t : all_subtypes())
        if (s == to_string(t)) return t;
    throw ParseError("unknown question subtype '" + s + "'");
}

inline bool is_count(QuestionSubtype s) {
    return s == QuestionSubtype::CountNoHint || s == QuestionSubtype::CountHint;
}
inline bool is_extreme(QuestionSubtype s) {
    return s == QuestionSubtype::ExtremePic || s == QuestionSubtype::ExtremeObj ||
           s == QuestionSubtype::ExtremeObj2;
}
inline bool is_query(QuestionSubtype s) {
    return s == QuestionSubtype::QueryColor || s == QuestionSubtype::QueryMaterial;
}
inline bool is_refer(QuestionSubtype s) {
    return s == QuestionSubtype::RefIt || s == QuestionSubtype::RefThem;
}

enum class Direction { Left, Right, Front, Back };

inline const std::vector<Direction>& all_directions() {
    static const std::vector<Direction> v = {Direction::Left, Direction::Right, Direction::Front,
                                             Direction::Back};
    return v;
}

inline const char* to_string(Direction d) {
    switch (d) {
        case Direction::Left: return "left";
        case Direction::Right: return "right";
        case Direction::Front: return "front";
        case Direction::Back: return "back";
    }
    return "?";
}

inline Direction direction_from_string(const std::string& s) {
    for (auto d : all_directions())
        if (s == to_string(d)) return d;
    throw ParseError("unknown direction '" + s + "'");
}

// One question act. The populated slots depend on the subtype:
//   count-*      p_set (+ count_hint for count-hint)
//   extreme-pic  direction, self_desc (the asker's own extreme object)
//   extreme-obj  direction, anchor, self_desc
//   extreme-obj2 direction, direction2, anchor, self_desc
//   query-*      p_set (the referent), self_value (the asker's own value)
//   ref-*        p_set (the antecedent count's set), antecedent_round
struct QuestionAction {
    QuestionSubtype subtype = QuestionSubtype::CountNoHint;
    std::optional<PropertySet> p_set;
    std::optional<PropertySet> anchor;
    std::optional<PropertySet> self_desc;
    std::optional<Direction> direction;
    std::optional<Direction> direction2;
    std::optional<int> count_hint;
    std::optional<std::string> self_value;
    std::optional<int> antecedent_round;

    // Identity of the question for repeat suppression; self-disclosure slots
    // are derived, so they are not part of the key.
    std::string key() const {
        std::string k = to_string(subtype);
        if (is_count(subtype)) k = "count";  // hint/no-hint ask about the same set
        if (p_set) k += "|" + p_set->to_string();
        if (anchor) k += "|a" + anchor->to_string();
        if (direction) k += "|d" + std::string(to_string(*direction));
        if (direction2) k += "|e" + std::string(to_string(*direction2));
        if (antecedent_round) k += "|r" + std::to_string(*antecedent_round);
        return k;
    }
};

struct GuessAction {
    std::string object_id;
};

enum class AnswerKind { Count, Description, Attribute, None };

inline const char* to_string(AnswerKind k) {
    switch (k) {
        case AnswerKind::Count: return "count";
        case AnswerKind::Description: return "description";
        case AnswerKind::Attribute: return "attribute";
        case AnswerKind::None: return "none";
    }
    return "?";
}

enum class NoneReason { Absent, Ambiguous };

inline const char* to_string(NoneReason r) {
    return r == NoneReason::Absent ? "absent" : "ambiguous";
}

// A grouped object description: `count` objects matching `desc`.
struct DescGroup {
    int count = 0;
    PropertySet desc;
    friend bool operator==(const DescGroup& a, const DescGroup& b) {
        return a.count == b.count && a.desc == b.desc;
    }
};

struct AnswerAction {
    AnswerKind kind = AnswerKind::None;
    int count = 0;                  // Count
    std::vector<DescGroup> groups;  // Description
    std::string value;              // Attribute
    NoneReason reason = NoneReason::Absent;

    static AnswerAction of_count(int n) {
        AnswerAction a;
        a.kind = AnswerKind::Count;
        a.count = n;
        return a;
    }
    static AnswerAction of_description(std::vector<DescGroup> groups) {
        AnswerAction a;
        a.kind = AnswerKind::Description;
        a.groups = std::move(groups);
        return a;
    }
    static AnswerAction of_attribute(std::string v) {
        AnswerAction a;
        a.kind = AnswerKind::Attribute;
        a.value = std::move(v);
        return a;
    }
    static AnswerAction none(NoneReason r) {
        AnswerAction a;
        a.kind = AnswerKind::None;
        a.reason = r;
        return a;
    }

    friend bool operator==(const AnswerAction& a, const AnswerAction& b) {
        if (a.kind != b.kind) return false;
        switch (a.kind) {
            case AnswerKind::Count: return a.count == b.count;
            case AnswerKind::Description: return a.groups == b.groups;
            case AnswerKind::Attribute: return a.value == b.value;
            case AnswerKind::None: return a.reason == b.reason;
        }
        return false;
    }
    friend bool operator!=(const AnswerAction& a, const AnswerAction& b) { return !(a == b); }
};

}  // namespace spotdiff
