#pragma once

// Test-only reference implementations: an exhaustive-scan answer oracle and a
// brute-force confirmation closure. Written as plain loops over raw
// representations, independent of the library's indexes and graph machinery,
// so they can arbitrate its answers.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spotdiff/actions.hpp"
#include "spotdiff/scene.hpp"
#include "spotdiff/taxonomy.hpp"

namespace spotdiff::testing::oracle {

inline bool sat(const Taxonomy& tax, const ObjectInstance& o, const PropertySet& p) {
    if (p.identifier) return o.id == *p.identifier;
    if (p.color && o.color != *p.color) return false;
    if (p.material && o.material != *p.material) return false;
    if (p.category) {
        bool found = false;
        for (const auto& c : tax.chain(o.category))
            if (c == *p.category) found = true;
        if (!found) return false;
    }
    return true;
}

inline int count(const Taxonomy& tax, const SceneGraph& s, const PropertySet& p) {
    int n = 0;
    for (const auto& o : s.objects)
        if (sat(tax, o, p)) ++n;
    return n;
}

inline double axis_value(const ObjectInstance& o, Direction d) {
    switch (d) {
        case Direction::Left: return -o.x;
        case Direction::Right: return o.x;
        case Direction::Back: return -o.y;
        case Direction::Front: return o.y;
    }
    return 0;
}

inline const ObjectInstance* extreme(const SceneGraph&, Direction d,
                                     const std::vector<const ObjectInstance*>& pool) {
    const ObjectInstance* best = nullptr;
    for (const ObjectInstance* o : pool) {
        if (!best || axis_value(*o, d) > axis_value(*best, d) ||
            (axis_value(*o, d) == axis_value(*best, d) && o->id < best->id))
            best = o;
    }
    return best;
}

// Re-derivation of the description policy from its stated contract: the most
// general ladder rung whose full-scene matches stay inside the enumerated
// set, raised until merged groups claim exactly their scene count.
inline std::vector<DescGroup> enumerate_descs(const Taxonomy& tax, const SceneGraph& s,
                                              const std::vector<const ObjectInstance*>& pool) {
    auto rung = [&](const ObjectInstance& o, int level) {
        switch (level) {
            case 0: return PropertySet::of({}, {}, o.category);
            case 1: return PropertySet::of(o.color, {}, o.category);
            case 2: return PropertySet::of({}, o.material, o.category);
            default: return PropertySet::of(o.color, o.material, o.category);
        }
    };
    auto inside = [&](const PropertySet& d) {
        for (const auto& o : s.objects) {
            if (!sat(tax, o, d)) continue;
            bool in_pool = false;
            for (const ObjectInstance* p : pool)
                if (p->id == o.id) in_pool = true;
            if (!in_pool) return false;
        }
        return true;
    };
    std::vector<int> level(pool.size(), 0);
    for (std::size_t i = 0; i < pool.size(); ++i)
        while (level[i] < 3 && !inside(rung(*pool[i], level[i]))) ++level[i];
    for (int pass = 0; pass < 4; ++pass) {
        std::map<PropertySet, int> members;
        for (std::size_t i = 0; i < pool.size(); ++i) ++members[rung(*pool[i], level[i])];
        bool changed = false;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const PropertySet d = rung(*pool[i], level[i]);
            if (count(tax, s, d) != members[d] && level[i] < 3) {
                ++level[i];
                changed = true;
            }
        }
        if (!changed) break;
    }
    std::map<PropertySet, int> merged;
    for (std::size_t i = 0; i < pool.size(); ++i) ++merged[rung(*pool[i], level[i])];
    std::vector<DescGroup> out;
    for (const auto& [d, n] : merged) out.push_back(DescGroup{n, d});
    std::sort(out.begin(), out.end(), [](const DescGroup& a, const DescGroup& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.desc < b.desc;
    });
    return out;
}

inline PropertySet describe_one(const Taxonomy& tax, const SceneGraph& s,
                                const ObjectInstance& o) {
    const PropertySet ladder[] = {PropertySet::of({}, {}, o.category),
                                  PropertySet::of(o.color, {}, o.category),
                                  PropertySet::of({}, o.material, o.category),
                                  PropertySet::of(o.color, o.material, o.category)};
    for (const auto& d : ladder)
        if (count(tax, s, d) == 1) return d;
    return ladder[3];
}

inline AnswerAction answer(const Taxonomy& tax, const SceneGraph& s, const QuestionAction& q) {
    if (is_count(q.subtype)) return AnswerAction::of_count(count(tax, s, *q.p_set));
    if (is_query(q.subtype)) {
        std::vector<const ObjectInstance*> matches;
        for (const auto& o : s.objects)
            if (sat(tax, o, *q.p_set)) matches.push_back(&o);
        if (matches.empty()) return AnswerAction::none(NoneReason::Absent);
        std::string value;
        for (const ObjectInstance* o : matches) {
            const std::string v = q.subtype == QuestionSubtype::QueryColor ? o->color : o->material;
            if (value.empty())
                value = v;
            else if (value != v)
                return AnswerAction::none(NoneReason::Ambiguous);
        }
        return AnswerAction::of_attribute(value);
    }
    if (is_refer(q.subtype)) {
        std::vector<const ObjectInstance*> pool;
        for (const auto& o : s.objects)
            if (sat(tax, o, *q.p_set)) pool.push_back(&o);
        if (pool.empty()) return AnswerAction::none(NoneReason::Absent);
        return AnswerAction::of_description(enumerate_descs(tax, s, pool));
    }
    std::vector<const ObjectInstance*> conditioned;
    if (q.subtype == QuestionSubtype::ExtremePic) {
        for (const auto& o : s.objects) conditioned.push_back(&o);
    } else if (q.subtype == QuestionSubtype::ExtremeObj) {
        std::vector<const ObjectInstance*> anchors;
        for (const auto& o : s.objects)
            if (sat(tax, o, *q.anchor)) anchors.push_back(&o);
        if (anchors.empty()) return AnswerAction::none(NoneReason::Absent);
        if (anchors.size() > 1) return AnswerAction::none(NoneReason::Ambiguous);
        for (const auto& o : s.objects)
            if (o.parent_id == anchors[0]->id) conditioned.push_back(&o);
    } else {
        std::vector<const ObjectInstance*> anchors;
        for (const auto& o : s.objects)
            if (sat(tax, o, *q.anchor)) anchors.push_back(&o);
        if (anchors.empty()) return AnswerAction::none(NoneReason::Absent);
        const ObjectInstance* anchor = extreme(s, *q.direction2, anchors);
        for (const auto& o : s.objects)
            if (o.parent_id == anchor->id) conditioned.push_back(&o);
    }
    if (conditioned.empty()) return AnswerAction::none(NoneReason::Absent);
    const ObjectInstance* best = extreme(s, *q.direction, conditioned);
    return AnswerAction::of_description({DescGroup{1, describe_one(tax, s, *best)}});
}

// Brute-force fixed point of {entailment reachability, union} over raw sets.
inline std::set<PropertySet> closure(const Taxonomy& tax, const ObjectTraits& traits,
                                     const std::string& id,
                                     const std::vector<PropertySet>& seeds) {
    const auto nodes = tax.enumerate_property_sets(traits, id);
    std::set<PropertySet> confirmed(seeds.begin(), seeds.end());
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<PropertySet> current(confirmed.begin(), confirmed.end());
        for (const auto& a : current) {
            for (const auto& n : nodes) {
                if (confirmed.count(n)) continue;
                ObjectInstance probe;
                probe.id = id;
                probe.category = traits.category;
                probe.color = traits.color;
                probe.material = traits.material;
                const bool entailed = a.is_identifier()
                                          ? (n.is_identifier() ? a == n : sat(tax, probe, n))
                                          : tax.entails(a, n);
                if (entailed) {
                    confirmed.insert(n);
                    changed = true;
                }
            }
        }
        current.assign(confirmed.begin(), confirmed.end());
        for (const auto& a : current)
            for (const auto& b : current) {
                if (a.is_identifier() || b.is_identifier()) continue;
                PropertySet u;
                u.color = a.color ? a.color : b.color;
                u.material = a.material ? a.material : b.material;
                if (a.category && b.category)
                    u.category =
                        tax.category_entails(*a.category, *b.category) ? a.category : b.category;
                else
                    u.category = a.category ? a.category : b.category;
                for (const auto& n : nodes)
                    if (n == u && !confirmed.count(n)) {
                        confirmed.insert(n);
                        changed = true;
                    }
            }
    }
    return confirmed;
}

}  // namespace spotdiff::testing::oracle
