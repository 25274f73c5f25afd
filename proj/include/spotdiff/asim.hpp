#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "spotdiff/actions.hpp"
#include "spotdiff/describe.hpp"
#include "spotdiff/errors.hpp"
#include "spotdiff/rng.hpp"
#include "spotdiff/scene.hpp"

namespace spotdiff {

// Oracle answerer: every answer is retrieved from the answerer's own scene
// graph. Pure functions over immutable scenes.

inline int count_objects(const Taxonomy& taxonomy, const SceneGraph& scene,
                         const PropertySet& pset) {
    return count_matching(taxonomy, scene, pset);
}

// Index of the extreme object along a direction among `indices`; ties go to
// the lexicographically smaller id.
inline std::optional<int> extreme_index(const SceneGraph& scene, Direction d,
                                        const std::vector<int>& indices) {
    std::optional<int> best;
    for (int i : indices) {
        if (!best) {
            best = i;
            continue;
        }
        const auto& a = scene.objects[static_cast<std::size_t>(i)];
        const auto& b = scene.objects[static_cast<std::size_t>(*best)];
        double va = 0, vb = 0;
        switch (d) {
            case Direction::Left: va = -a.x; vb = -b.x; break;
            case Direction::Right: va = a.x; vb = b.x; break;
            case Direction::Back: va = -a.y; vb = -b.y; break;
            case Direction::Front: va = a.y; vb = b.y; break;
        }
        if (va > vb || (va == vb && a.id < b.id)) best = i;
    }
    return best;
}

inline std::vector<int> all_indices(const SceneGraph& scene) {
    std::vector<int> out(scene.objects.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
    return out;
}

// The object at a positional extreme among conditioned objects. The
// conditioned set is: the whole picture (pic), the children of the uniquely
// described anchor (obj), or the children of the direction2-extreme object
// among the anchor description's matches (obj2).
inline AnswerAction extreme_object(const Taxonomy& taxonomy, const SceneGraph& scene,
                                   const QuestionAction& q) {
    std::vector<int> conditioned;
    if (q.subtype == QuestionSubtype::ExtremePic) {
        conditioned = all_indices(scene);
    } else if (q.subtype == QuestionSubtype::ExtremeObj) {
        const auto anchors = matching_indices(taxonomy, scene, *q.anchor);
        if (anchors.empty()) return AnswerAction::none(NoneReason::Absent);
        if (anchors.size() > 1) return AnswerAction::none(NoneReason::Ambiguous);
        conditioned =
            scene.children_of(scene.objects[static_cast<std::size_t>(anchors[0])].id);
    } else {  // ExtremeObj2
        const auto anchors = matching_indices(taxonomy, scene, *q.anchor);
        if (anchors.empty()) return AnswerAction::none(NoneReason::Absent);
        const auto anchor = extreme_index(scene, *q.direction2, anchors);
        conditioned =
            scene.children_of(scene.objects[static_cast<std::size_t>(*anchor)].id);
    }
    const auto idx = extreme_index(scene, *q.direction, conditioned);
    if (!idx) return AnswerAction::none(NoneReason::Absent);
    return AnswerAction::of_description(
        describe_single(taxonomy, scene, scene.objects[static_cast<std::size_t>(*idx)]));
}

// Color/material of the referent; none when the referent is absent or cannot
// be determined uniquely (unless all matches agree on the value).
inline AnswerAction query_attribute(const Taxonomy& taxonomy, const SceneGraph& scene,
                                    const PropertySet& referent, PropertyKind which) {
    const auto matches = matching_indices(taxonomy, scene, referent);
    if (matches.empty()) return AnswerAction::none(NoneReason::Absent);
    auto value_of = [&](int i) {
        const auto& o = scene.objects[static_cast<std::size_t>(i)];
        return which == PropertyKind::Color ? o.color : o.material;
    };
    const std::string first = value_of(matches[0]);
    for (int i : matches)
        if (value_of(i) != first) return AnswerAction::none(NoneReason::Ambiguous);
    return AnswerAction::of_attribute(first);
}

// Enumerates the answerer-side objects matching the previous count's set.
inline AnswerAction resolve_refer(const Taxonomy& taxonomy, const SceneGraph& scene,
                                  const QuestionAction& q,
                                  const QuestionAction* previous_question) {
    if (previous_question && !is_count(previous_question->subtype))
        throw ProtocolError("refer question without a preceding count");
    if (!q.p_set) throw ProtocolError("refer question carries no antecedent set");
    const auto matches = matching_indices(taxonomy, scene, *q.p_set);
    if (matches.empty()) return AnswerAction::none(NoneReason::Absent);
    return AnswerAction::of_description(describe_enumeration(taxonomy, scene, matches));
}

// Ground-truth dispatch for all nine subtypes.
inline AnswerAction oracle_answer(const Taxonomy& taxonomy, const SceneGraph& scene,
                                  const QuestionAction& q,
                                  const QuestionAction* previous_question = nullptr) {
    switch (q.subtype) {
        case QuestionSubtype::CountNoHint:
        case QuestionSubtype::CountHint:
            return AnswerAction::of_count(count_objects(taxonomy, scene, *q.p_set));
        case QuestionSubtype::ExtremePic:
        case QuestionSubtype::ExtremeObj:
        case QuestionSubtype::ExtremeObj2:
            return extreme_object(taxonomy, scene, q);
        case QuestionSubtype::QueryColor:
            return query_attribute(taxonomy, scene, *q.p_set, PropertyKind::Color);
        case QuestionSubtype::QueryMaterial:
            return query_attribute(taxonomy, scene, *q.p_set, PropertyKind::Material);
        case QuestionSubtype::RefIt:
        case QuestionSubtype::RefThem:
            return resolve_refer(taxonomy, scene, q, previous_question);
    }
    throw ProtocolError("unhandled question subtype");
}

namespace detail {

inline PropertySet random_desc(const AssetCatalog& catalog, Rng& rng) {
    const auto cats = catalog.categories();
    PropertySet p = PropertySet::of({}, {}, cats[rng.range(cats.size())]);
    if (rng.coin(0.5)) p.color = rng.pick(color_vocabulary());
    if (rng.coin(0.3)) p.material = rng.pick(material_vocabulary());
    return p;
}

}  // namespace detail

// With probability epsilon, perturbs the answer into a different one: counts
// shift by one, descriptions drop or swap an element, attributes resample,
// none-markers flip. The perturbed answer always differs from the original.
inline AnswerAction noisy_answer(const AssetCatalog& catalog, const AnswerAction& oracle,
                                 double epsilon, Rng& rng) {
    if (epsilon <= 0.0 || !rng.coin(epsilon)) return oracle;
    AnswerAction a = oracle;
    switch (a.kind) {
        case AnswerKind::Count: {
            int delta = rng.coin(0.5) ? 1 : -1;
            if (a.count + delta < 0) delta = 1;
            a.count += delta;
            break;
        }
        case AnswerKind::Description: {
            int total = 0;
            for (const auto& g : a.groups) total += g.count;
            const bool drop = total > 1 && rng.coin(0.5);
            const std::size_t gi = rng.range(a.groups.size());
            if (drop) {
                if (--a.groups[gi].count == 0)
                    a.groups.erase(a.groups.begin() + static_cast<std::ptrdiff_t>(gi));
            } else {
                PropertySet replacement = detail::random_desc(catalog, rng);
                while (replacement == a.groups[gi].desc)
                    replacement = detail::random_desc(catalog, rng);
                if (a.groups[gi].count == 1) {
                    a.groups[gi].desc = replacement;
                } else {
                    --a.groups[gi].count;
                    a.groups.push_back(DescGroup{1, replacement});
                }
                std::sort(a.groups.begin(), a.groups.end(),
                          [](const DescGroup& x, const DescGroup& y) {
                              if (x.count != y.count) return x.count > y.count;
                              return x.desc < y.desc;
                          });
            }
            break;
        }
        case AnswerKind::Attribute: {
            const bool color = std::find(color_vocabulary().begin(), color_vocabulary().end(),
                                         a.value) != color_vocabulary().end();
            const auto& vocab = color ? color_vocabulary() : material_vocabulary();
            std::string v = rng.pick(vocab);
            while (v == a.value) v = rng.pick(vocab);
            a.value = v;
            break;
        }
        case AnswerKind::None:
            a.reason = a.reason == NoneReason::Absent ? NoneReason::Ambiguous : NoneReason::Absent;
            break;
    }
    return a;
}

}  // namespace spotdiff
