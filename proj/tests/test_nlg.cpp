#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "spotdiff/nlg.hpp"

using namespace spotdiff;
using spotdiff::testing::world;

namespace {

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

QuestionAction count_action(QuestionSubtype subtype, PropertySet p, std::optional<int> hint = {}) {
    QuestionAction q;
    q.subtype = subtype;
    q.p_set = std::move(p);
    q.count_hint = hint;
    return q;
}

}  // namespace

TEST_CASE("the shipped inventory holds exactly 43 templates") {
    const auto& t = world().templates;
    CHECK(t.question_count() == 30);
    CHECK(t.transition_count() == 13);
    CHECK(t.total_count() == 43);
    // per-subtype pattern counts
    CHECK(t.question_patterns(QuestionSubtype::CountNoHint).size() == 5);
    CHECK(t.question_patterns(QuestionSubtype::CountHint).size() == 4);
    CHECK(t.question_patterns(QuestionSubtype::RefIt).size() == 3);
    CHECK(t.question_patterns(QuestionSubtype::RefThem).size() == 3);
    CHECK(t.question_patterns(QuestionSubtype::ExtremePic).size() == 4);
    CHECK(t.question_patterns(QuestionSubtype::ExtremeObj).size() == 3);
    CHECK(t.question_patterns(QuestionSubtype::ExtremeObj2).size() == 3);
    CHECK(t.question_patterns(QuestionSubtype::QueryColor).size() == 3);
    CHECK(t.question_patterns(QuestionSubtype::QueryMaterial).size() == 2);
}

TEST_CASE("count questions realize with plural phrases") {
    const auto& w = world();
    Rng rng(4);
    std::set<std::string> seen;
    for (int i = 0; i < 50; ++i) {
        auto rq = realize_question(w.templates, w.phrases,
                                   count_action(QuestionSubtype::CountNoHint,
                                                PropertySet::of_color("white")),
                                   rng);
        CHECK((rq.text.find("white things") != std::string::npos ||
               rq.text.find("white objects") != std::string::npos));
        seen.insert(rq.text);
    }
    CHECK(seen.size() >= 5);  // all five patterns eventually drawn
    CHECK(seen.count("How many white things can you see?") +
              seen.count("How many white objects can you see?") >
          0);
}

TEST_CASE("count-hint questions spell the count and agree in number") {
    const auto& w = world();
    Rng rng(4);
    for (int i = 0; i < 40; ++i) {
        auto four = realize_question(w.templates, w.phrases,
                                     count_action(QuestionSubtype::CountHint,
                                                  PropertySet::of_color("white"), 4),
                                     rng);
        CHECK((four.text.find("four") != std::string::npos ||
               four.text.find("Four") != std::string::npos));
        CHECK(four.text.find("[") == std::string::npos);
        auto one = realize_question(w.templates, w.phrases,
                                    count_action(QuestionSubtype::CountHint,
                                                 PropertySet::of_color("white"), 1),
                                    rng);
        std::string lowered = one.text;
        lowered[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(lowered[0])));
        CHECK((lowered.find("one white thing") != std::string::npos ||
               lowered.find("one white object") != std::string::npos));
        CHECK(one.text.find("things") == std::string::npos);
        CHECK(one.text.find("objects") == std::string::npos);
    }
}

TEST_CASE("refer questions come from the fixed family") {
    const auto& w = world();
    Rng rng(4);
    QuestionAction q;
    q.subtype = QuestionSubtype::RefThem;
    q.p_set = PropertySet::of_category("decoration");
    q.antecedent_round = 0;
    std::set<std::string> seen;
    for (int i = 0; i < 30; ++i) seen.insert(realize_question(w.templates, w.phrases, q, rng).text);
    CHECK(seen.count("What are they?") == 1);
    for (const auto& s : seen) CHECK(s.find("[") == std::string::npos);
}

TEST_CASE("property sets realize with the documented special forms") {
    const auto& w = world();
    Rng rng(4);
    CHECK(w.phrases.phrase(PropertySet::of({}, "wooden", "furniture"), true, rng) ==
          "pieces of wooden furniture");
    CHECK(w.phrases.phrase(PropertySet::of({}, {}, "furniture"), false, rng) ==
          "piece of furniture");
    CHECK(w.phrases.phrase(PropertySet::of({}, {}, "shoes"), false, rng) == "pair of shoes");
    CHECK(w.phrases.phrase(PropertySet::of({}, {}, "tennis"), true, rng) == "tennis balls");
    CHECK(w.phrases.phrase(PropertySet::of({}, {}, "milk"), true, rng) == "bottles of milk");
    CHECK(w.phrases.phrase(PropertySet::of({}, {}, "bread"), false, rng) == "loaf of bread");
    CHECK(w.phrases.phrase(PropertySet::of("white", {}, "vase"), false, rng) == "white vase");
    CHECK(w.phrases.phrase(PropertySet::of({}, {}, "paperbox"), true, rng) == "paperboxes");
    CHECK(with_article("apple") == "an apple");
    CHECK(with_article("white vase") == "a white vase");
    CHECK_THROWS_AS(w.phrases.phrases_for(PropertySet::of_identifier("vase1")), RenderError);
}

TEST_CASE("every emitted phrase parses back to its property set") {
    const auto& w = world();
    // all property sets reachable from the catalog
    std::set<PropertySet> reachable;
    for (const auto& a : w.catalog.assets())
        for (const auto& c : a.colors)
            for (const auto& m : a.materials) {
                ObjectTraits t{c, m, a.category};
                for (const auto& p : w.taxonomy.enumerate_property_sets(t, "x"))
                    if (!p.is_identifier()) reachable.insert(p);
            }
    CHECK(reachable.size() > 500);
    for (const auto& p : reachable)
        for (const auto& [sg, pl] : w.phrases.phrases_for(p)) {
            auto back_sg = w.phrases.parse_phrase(sg);
            auto back_pl = w.phrases.parse_phrase(pl);
            REQUIRE(back_sg.has_value());
            REQUIRE(back_pl.has_value());
            CHECK(*back_sg == p);
            CHECK(*back_pl == p);
        }
}

TEST_CASE("phrase catalog size is reported") {
    const auto& w = world();
    const std::size_t n = w.phrases.catalog_size(w.catalog);
    CHECK(n > 1000);  // same order as a hand-annotated phrase inventory
    MESSAGE("phrase catalog size: ", n);
}

TEST_CASE("count answers: plain numbers without a hint, transitions with one") {
    const auto& w = world();
    Rng rng(4);
    auto nohint = realize_question(
        w.templates, w.phrases,
        count_action(QuestionSubtype::CountNoHint, PropertySet::of_color("white")), rng);
    CHECK(realize_answer(w.templates, w.phrases, AnswerAction::of_count(4), nohint, rng) ==
          "Four");

    auto hint4 = realize_question(
        w.templates, w.phrases,
        count_action(QuestionSubtype::CountHint, PropertySet::of_color("white"), 4), rng);
    std::set<std::string> same, less, more;
    for (int i = 0; i < 60; ++i) {
        same.insert(realize_answer(w.templates, w.phrases, AnswerAction::of_count(4), hint4, rng));
        less.insert(realize_answer(w.templates, w.phrases, AnswerAction::of_count(3), hint4, rng));
        more.insert(realize_answer(w.templates, w.phrases, AnswerAction::of_count(5), hint4, rng));
    }
    CHECK(same.count("So do I") == 1);
    CHECK(same.count("Yes") == 1);
    CHECK(less.count("Mine is less than yours") == 1);
    CHECK(more.count("I have one more than you") == 1);
    for (const auto& s : less) CHECK(same.count(s) == 0);
}

TEST_CASE("description answers render grouped enumerations") {
    const auto& w = world();
    Rng rng(4);
    QuestionAction q;
    q.subtype = QuestionSubtype::RefThem;
    q.p_set = PropertySet::of_category("decoration");
    auto rq = realize_question(w.templates, w.phrases, q, rng);
    AnswerAction a = AnswerAction::of_description(
        {DescGroup{2, PropertySet::of({}, {}, "decorative plate")},
         DescGroup{1, PropertySet::of({}, {}, "vase")}});
    CHECK(realize_answer(w.templates, w.phrases, a, rq, rng) ==
          "Two decorative plates and a vase");

    AnswerAction single =
        AnswerAction::of_description({DescGroup{1, PropertySet::of("black", {}, "frame")}});
    CHECK(realize_answer(w.templates, w.phrases, single, rq, rng) == "A black frame");
}

TEST_CASE("none answers use the fixed phrases") {
    const auto& w = world();
    Rng rng(4);
    QuestionAction q;
    q.subtype = QuestionSubtype::QueryColor;
    q.p_set = PropertySet::of_category("vase");
    auto rq = realize_question(w.templates, w.phrases, q, rng);
    CHECK(realize_answer(w.templates, w.phrases, AnswerAction::none(NoneReason::Absent), rq, rng) ==
          "There is no such thing in my picture");
    CHECK(realize_answer(w.templates, w.phrases, AnswerAction::none(NoneReason::Ambiguous), rq,
                         rng) == "I can't tell which one you mean");
}

TEST_CASE("query answers react to self-disclosing templates") {
    const auto& w = world();
    Rng rng(4);
    QuestionAction q;
    q.subtype = QuestionSubtype::QueryColor;
    q.p_set = PropertySet::of_category("vase");
    q.self_value = "white";
    int disclosed = 0, plain = 0;
    for (int i = 0; i < 120; ++i) {
        auto rq = realize_question(w.templates, w.phrases, q, rng);
        const std::string matching =
            realize_answer(w.templates, w.phrases, AnswerAction::of_attribute("white"), rq, rng);
        const std::string differing =
            realize_answer(w.templates, w.phrases, AnswerAction::of_attribute("blue"), rq, rng);
        if (question_discloses(w.templates, rq)) {
            ++disclosed;
            CHECK(matching != "White");
            CHECK(differing.find("it is blue") != std::string::npos);
        } else {
            ++plain;
            CHECK(matching == "White");
            CHECK(differing == "Blue");
        }
    }
    CHECK(disclosed > 0);
    CHECK(plain > 0);
}

TEST_CASE("extreme questions fill anchors, directions and self descriptions") {
    const auto& w = world();
    Rng rng(4);
    QuestionAction q;
    q.subtype = QuestionSubtype::ExtremeObj;
    q.direction = Direction::Left;
    q.anchor = PropertySet::of({}, {}, "tea table");
    q.self_desc = PropertySet::of("white", {}, "vase");
    std::set<std::string> seen;
    for (int i = 0; i < 40; ++i) {
        auto rq = realize_question(w.templates, w.phrases, q, rng);
        CHECK(rq.text.find("[") == std::string::npos);
        seen.insert(rq.text);
    }
    CHECK(seen.count("What is the leftmost thing on the tea table?") == 1);

    QuestionAction q2;
    q2.subtype = QuestionSubtype::ExtremeObj2;
    q2.direction = Direction::Front;
    q2.direction2 = Direction::Right;
    q2.anchor = PropertySet::of({}, {}, "plate");
    q2.self_desc = PropertySet::of("red", {}, "apple");
    for (int i = 0; i < 40; ++i) {
        auto rq = realize_question(w.templates, w.phrases, q2, rng);
        CHECK(rq.text.find("[") == std::string::npos);
        CHECK(rq.text.find("front") != std::string::npos);
    }
}

TEST_CASE("template coverage: every reachable action schema renders") {
    const auto& w = world();
    Rng rng(4);
    std::vector<QuestionAction> actions;
    actions.push_back(count_action(QuestionSubtype::CountNoHint, PropertySet::of_color("white")));
    actions.push_back(count_action(QuestionSubtype::CountHint, PropertySet::of_color("white"), 2));
    {
        QuestionAction q;
        q.subtype = QuestionSubtype::ExtremePic;
        q.direction = Direction::Right;
        q.self_desc = PropertySet::of({}, {}, "chair");
        actions.push_back(q);
        q.subtype = QuestionSubtype::ExtremeObj;
        q.anchor = PropertySet::of({}, {}, "tea table");
        actions.push_back(q);
        q.subtype = QuestionSubtype::ExtremeObj2;
        q.direction2 = Direction::Back;
        actions.push_back(q);
    }
    {
        QuestionAction q;
        q.subtype = QuestionSubtype::QueryColor;
        q.p_set = PropertySet::of({}, {}, "vase");
        q.self_value = "white";
        actions.push_back(q);
        q.subtype = QuestionSubtype::QueryMaterial;
        q.self_value = "ceramic";
        actions.push_back(q);
    }
    {
        QuestionAction q;
        q.subtype = QuestionSubtype::RefIt;
        q.p_set = PropertySet::of_category("vase");
        q.antecedent_round = 0;
        actions.push_back(q);
        q.subtype = QuestionSubtype::RefThem;
        actions.push_back(q);
    }
    for (const auto& action : actions) {
        const std::size_t patterns = w.templates.question_patterns(action.subtype).size();
        CHECK(patterns >= 1);
        for (int i = 0; i < 60; ++i) {
            auto rq = realize_question(w.templates, w.phrases, action, rng);
            CHECK(rq.text.find('[') == std::string::npos);
            CHECK_FALSE(rq.text.empty());
            CHECK(std::isupper(static_cast<unsigned char>(rq.text.front())));
        }
    }
}
