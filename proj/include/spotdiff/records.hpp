#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spotdiff/actions.hpp"
#include "spotdiff/scene.hpp"
#include "spotdiff/taxonomy.hpp"

namespace spotdiff {

using json = nlohmann::ordered_json;

inline constexpr const char* kDatasetSchema = "spotdiff.dataset.v1";

// --- property sets ---------------------------------------------------------

inline json to_json(const PropertySet& p) {
    json j;
    if (p.identifier) j["id"] = *p.identifier;
    if (p.color) j["color"] = *p.color;
    if (p.material) j["material"] = *p.material;
    if (p.category) j["category"] = *p.category;
    return j;
}

inline PropertySet property_set_from_json(const json& j) {
    PropertySet p;
    if (j.contains("id")) p.identifier = j.at("id").get<std::string>();
    if (j.contains("color")) p.color = j.at("color").get<std::string>();
    if (j.contains("material")) p.material = j.at("material").get<std::string>();
    if (j.contains("category")) p.category = j.at("category").get<std::string>();
    return p;
}

// --- actions ----------------------------------------------------------------

inline json to_json(const QuestionAction& q) {
    json slots = json::object();
    if (q.p_set) slots["p_set"] = to_json(*q.p_set);
    if (q.anchor) slots["p_set_2"] = to_json(*q.anchor);
    if (q.self_desc) slots["p_set_1"] = to_json(*q.self_desc);
    if (q.direction) slots["location"] = to_string(*q.direction);
    if (q.direction2) slots["location_2"] = to_string(*q.direction2);
    if (q.count_hint) slots["count"] = *q.count_hint;
    if (q.self_value) slots["value"] = *q.self_value;
    if (q.antecedent_round) slots["antecedent_round"] = *q.antecedent_round;
    json j;
    j["subtype"] = to_string(q.subtype);
    j["slots"] = slots;
    return j;
}

inline QuestionAction question_from_json(const json& j) {
    QuestionAction q;
    q.subtype = subtype_from_string(j.at("subtype").get<std::string>());
    const json& slots = j.at("slots");
    if (slots.contains("p_set")) q.p_set = property_set_from_json(slots.at("p_set"));
    if (slots.contains("p_set_2")) q.anchor = property_set_from_json(slots.at("p_set_2"));
    if (slots.contains("p_set_1")) q.self_desc = property_set_from_json(slots.at("p_set_1"));
    if (slots.contains("location"))
        q.direction = direction_from_string(slots.at("location").get<std::string>());
    if (slots.contains("location_2"))
        q.direction2 = direction_from_string(slots.at("location_2").get<std::string>());
    if (slots.contains("count")) q.count_hint = slots.at("count").get<int>();
    if (slots.contains("value")) q.self_value = slots.at("value").get<std::string>();
    if (slots.contains("antecedent_round"))
        q.antecedent_round = slots.at("antecedent_round").get<int>();
    return q;
}

inline json to_json(const AnswerAction& a) {
    json j;
    j["kind"] = to_string(a.kind);
    switch (a.kind) {
        case AnswerKind::Count:
            j["count"] = a.count;
            break;
        case AnswerKind::Description: {
            json items = json::array();
            for (const auto& g : a.groups) {
                json item;
                item["count"] = g.count;
                item["desc"] = to_json(g.desc);
                items.push_back(item);
            }
            j["items"] = items;
            break;
        }
        case AnswerKind::Attribute:
            j["value"] = a.value;
            break;
        case AnswerKind::None:
            j["reason"] = to_string(a.reason);
            break;
    }
    return j;
}

inline AnswerAction answer_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "count") return AnswerAction::of_count(j.at("count").get<int>());
    if (kind == "description") {
        std::vector<DescGroup> groups;
        for (const auto& item : j.at("items"))
            groups.push_back(
                DescGroup{item.at("count").get<int>(), property_set_from_json(item.at("desc"))});
        return AnswerAction::of_description(std::move(groups));
    }
    if (kind == "attribute") return AnswerAction::of_attribute(j.at("value").get<std::string>());
    if (kind == "none")
        return AnswerAction::none(j.at("reason").get<std::string>() == "absent"
                                      ? NoneReason::Absent
                                      : NoneReason::Ambiguous);
    throw ParseError("unknown answer kind '" + kind + "'");
}

// --- scenes -----------------------------------------------------------------

inline json to_json(const BoundingBox2D& b) { return json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

inline BoundingBox2D bbox_from_json(const json& j) {
    return BoundingBox2D{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
                         j.at(3).get<double>()};
}

// One scene record, mirroring the scene-graph annotation: objects carry their
// category chain, attributes, placement parent, 3D position and the projected
// 2D box. `diff_object_id` names the object absent from the partner scene.
inline json scene_to_json(const Taxonomy& taxonomy, const SceneGraph& scene,
                          const std::string& scene_id, const std::string& pair_id,
                          const std::string& role, const std::string& split,
                          const std::string& diff_object_id) {
    json j;
    j["scene_id"] = scene_id;
    j["pair_id"] = pair_id;
    j["role"] = role;
    j["split"] = split;
    j["bounds"] = {scene.floor_width, scene.floor_depth};
    j["diff_object_id"] = diff_object_id;
    json objects = json::array();
    for (const auto& o : scene.objects) {
        json obj;
        obj["id"] = o.id;
        obj["category"] = o.category;
        obj["chain"] = taxonomy.chain(o.category);
        obj["color"] = o.color;
        obj["material"] = o.material;
        obj["parent"] = o.parent_id;
        obj["position"] = {o.x, o.y, o.z};
        obj["size"] = {o.width, o.depth, o.height};
        obj["bbox"] = to_json(project_bbox2d(scene, o));
        objects.push_back(obj);
    }
    j["objects"] = objects;
    return j;
}

struct SceneRecord {
    std::string scene_id;
    std::string pair_id;
    std::string role;
    std::string split;
    std::string diff_object_id;
    SceneGraph scene;
};

inline SceneRecord scene_from_json(const json& j) {
    SceneRecord rec;
    rec.scene_id = j.at("scene_id").get<std::string>();
    rec.pair_id = j.at("pair_id").get<std::string>();
    rec.role = j.at("role").get<std::string>();
    rec.split = j.at("split").get<std::string>();
    rec.diff_object_id = j.at("diff_object_id").get<std::string>();
    rec.scene.floor_width = j.at("bounds").at(0).get<double>();
    rec.scene.floor_depth = j.at("bounds").at(1).get<double>();
    for (const auto& obj : j.at("objects")) {
        ObjectInstance o;
        o.id = obj.at("id").get<std::string>();
        o.category = obj.at("category").get<std::string>();
        o.color = obj.at("color").get<std::string>();
        o.material = obj.at("material").get<std::string>();
        o.parent_id = obj.at("parent").get<std::string>();
        o.x = obj.at("position").at(0).get<double>();
        o.y = obj.at("position").at(1).get<double>();
        o.z = obj.at("position").at(2).get<double>();
        o.width = obj.at("size").at(0).get<double>();
        o.depth = obj.at("size").at(1).get<double>();
        o.height = obj.at("size").at(2).get<double>();
        rec.scene.objects.push_back(o);
    }
    return rec;
}

// --- dialogs ----------------------------------------------------------------

struct Round {
    QuestionAction question;
    std::string question_text;
    AnswerAction answer;
    std::string answer_text;
};

struct DialogRecord {
    std::string pair_id;
    std::string orientation;  // "forward": questioner sees scene_q
    std::string scene_id;     // the questioner's scene
    std::string split;
    std::vector<Round> rounds;
    GuessAction guess;
    std::string target_id;
    bool success = false;
    std::vector<std::pair<std::string, BoundingBox2D>> correct_object_list;
};

inline json to_json(const DialogRecord& d) {
    json j;
    j["pair_id"] = d.pair_id;
    j["orientation"] = d.orientation;
    j["scene_id"] = d.scene_id;
    j["split"] = d.split;
    json rounds = json::array();
    for (const auto& r : d.rounds) {
        json round;
        round["q"] = to_json(r.question);
        round["q_text"] = r.question_text;
        round["a"] = to_json(r.answer);
        round["a_text"] = r.answer_text;
        rounds.push_back(round);
    }
    j["rounds"] = rounds;
    j["guess"] = d.guess.object_id;
    j["target"] = d.target_id;
    j["success"] = d.success;
    json correct = json::array();
    for (const auto& [category, bbox] : d.correct_object_list)
        correct.push_back(json::array({category, to_json(bbox)}));
    j["correct_object_list"] = correct;
    return j;
}

inline DialogRecord dialog_from_json(const json& j) {
    DialogRecord d;
    d.pair_id = j.at("pair_id").get<std::string>();
    d.orientation = j.at("orientation").get<std::string>();
    d.scene_id = j.at("scene_id").get<std::string>();
    d.split = j.at("split").get<std::string>();
    for (const auto& r : j.at("rounds")) {
        Round round;
        round.question = question_from_json(r.at("q"));
        round.question_text = r.at("q_text").get<std::string>();
        round.answer = answer_from_json(r.at("a"));
        round.answer_text = r.at("a_text").get<std::string>();
        d.rounds.push_back(round);
    }
    d.guess.object_id = j.at("guess").get<std::string>();
    d.target_id = j.at("target").get<std::string>();
    d.success = j.at("success").get<bool>();
    for (const auto& c : j.at("correct_object_list"))
        d.correct_object_list.emplace_back(c.at(0).get<std::string>(), bbox_from_json(c.at(1)));
    return d;
}

}  // namespace spotdiff
