#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spotdiff/actions.hpp"
#include "spotdiff/scene.hpp"
#include "spotdiff/taxonomy.hpp"

namespace spotdiff {

// Object descriptions: the leaf category plus whichever attributes are needed
// to pin the object down within its scene. Specificity ladder: category,
// category+color, category+material, category+color+material.

namespace detail {

inline std::vector<PropertySet> desc_ladder(const ObjectInstance& o) {
    return {
        PropertySet::of({}, {}, o.category),
        PropertySet::of(o.color, {}, o.category),
        PropertySet::of({}, o.material, o.category),
        PropertySet::of(o.color, o.material, o.category),
    };
}

}  // namespace detail

// Most general description that matches exactly this object in the scene.
// Scenes generated here keep attribute triples unique, so the final rung is
// always unique; the fallback covers hand-built scenes with twins.
inline PropertySet minimal_unique_desc(const Taxonomy& taxonomy, const SceneGraph& scene,
                                       const ObjectInstance& o) {
    for (const auto& desc : detail::desc_ladder(o))
        if (count_matching(taxonomy, scene, desc) == 1) return desc;
    return detail::desc_ladder(o).back();
}

// Same, but the description may not use the given attribute kind (a referent
// for "what color is X" must not already name the color).
inline std::optional<PropertySet> minimal_unique_desc_excluding(const Taxonomy& taxonomy,
                                                                const SceneGraph& scene,
                                                                const ObjectInstance& o,
                                                                PropertyKind excluded) {
    std::vector<PropertySet> ladder = {PropertySet::of({}, {}, o.category)};
    if (excluded == PropertyKind::Color)
        ladder.push_back(PropertySet::of({}, o.material, o.category));
    else
        ladder.push_back(PropertySet::of(o.color, {}, o.category));
    for (const auto& desc : ladder)
        if (count_matching(taxonomy, scene, desc) == 1) return desc;
    return std::nullopt;
}

// Grouped enumeration of the given objects. Each group's description is the
// most general rung whose scene matches stay inside the enumerated set, which
// makes every claimed count exact against the whole scene ("two decorative
// plates and a vase" only when no third plate exists elsewhere).
inline std::vector<DescGroup> describe_enumeration(const Taxonomy& taxonomy,
                                                   const SceneGraph& scene,
                                                   const std::vector<int>& indices) {
    std::vector<bool> in_set(scene.objects.size(), false);
    for (int i : indices) in_set[static_cast<std::size_t>(i)] = true;

    std::vector<int> level(indices.size(), 0);
    auto desc_of = [&](std::size_t k) {
        const auto& o = scene.objects[static_cast<std::size_t>(indices[k])];
        return detail::desc_ladder(o)[static_cast<std::size_t>(level[k])];
    };
    auto matches_inside_set = [&](const PropertySet& d) {
        for (std::size_t i = 0; i < scene.objects.size(); ++i)
            if (taxonomy.satisfies(scene.objects[i].traits(), d) && !in_set[i]) return false;
        return true;
    };

    // Raise each member to the first rung contained in the set, then keep
    // raising members whose merged group would claim more scene matches than
    // it has members (overlapping group descriptions).
    for (std::size_t k = 0; k < indices.size(); ++k)
        while (level[k] < 3 && !matches_inside_set(desc_of(k))) ++level[k];

    for (int pass = 0; pass < 4; ++pass) {
        std::map<PropertySet, int> members;
        for (std::size_t k = 0; k < indices.size(); ++k) ++members[desc_of(k)];
        bool changed = false;
        for (std::size_t k = 0; k < indices.size(); ++k) {
            const PropertySet d = desc_of(k);
            if (count_matching(taxonomy, scene, d) != members[d] && level[k] < 3) {
                ++level[k];
                changed = true;
            }
        }
        if (!changed) break;
    }

    std::map<PropertySet, int> merged;
    for (std::size_t k = 0; k < indices.size(); ++k) ++merged[desc_of(k)];
    std::vector<DescGroup> out;
    for (const auto& [desc, count] : merged) out.push_back(DescGroup{count, desc});
    std::sort(out.begin(), out.end(), [](const DescGroup& a, const DescGroup& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.desc < b.desc;
    });
    return out;
}

inline std::vector<DescGroup> describe_single(const Taxonomy& taxonomy, const SceneGraph& scene,
                                              const ObjectInstance& o) {
    return {DescGroup{1, minimal_unique_desc(taxonomy, scene, o)}};
}

}  // namespace spotdiff
