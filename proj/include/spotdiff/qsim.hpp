#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "spotdiff/actions.hpp"
#include "spotdiff/asim.hpp"
#include "spotdiff/describe.hpp"
#include "spotdiff/rng.hpp"
#include "spotdiff/state.hpp"

namespace spotdiff {

struct StrategyConfig {
    int n = 5;           // extreme/refer unlock when |candidates| < n
    int m = 4;           // refer unlocks after a count answered below m
    int max_rounds = 10;
};

// One completed round as the questioner remembers it.
struct HistoryEntry {
    QuestionAction question;
    AnswerAction answer;
};

// Question types currently worth asking. Count is always available; extreme,
// refer and query unlock late (small candidate set), and refer/query also
// unlock right after a count with a small answer, when the referent of "they"
// is determinable.
inline std::vector<QuestionSubtype> allowed_types(const TrackerState& tracker,
                                                  const std::vector<HistoryEntry>& history,
                                                  const StrategyConfig& cfg) {
    std::vector<QuestionSubtype> out = {QuestionSubtype::CountNoHint, QuestionSubtype::CountHint};
    const bool endgame = tracker.candidate_count() < cfg.n;
    bool after_small_count = false;
    if (!history.empty() && is_count(history.back().question.subtype) &&
        history.back().answer.kind == AnswerKind::Count &&
        history.back().answer.count < cfg.m)
        after_small_count = true;
    if (endgame) {
        out.push_back(QuestionSubtype::ExtremePic);
        out.push_back(QuestionSubtype::ExtremeObj);
        out.push_back(QuestionSubtype::ExtremeObj2);
    }
    if (endgame || after_small_count) {
        out.push_back(QuestionSubtype::RefIt);
        out.push_back(QuestionSubtype::RefThem);
        out.push_back(QuestionSubtype::QueryColor);
        out.push_back(QuestionSubtype::QueryMaterial);
    }
    return out;
}

inline std::set<std::string> asked_keys(const std::vector<HistoryEntry>& history) {
    std::set<std::string> keys;
    for (const auto& h : history) keys.insert(h.question.key());
    return keys;
}

// The count slot: among property sets that still have an unconfirmed node in
// some candidate and have not been asked, pick the one whose frequency is
// closest to half the candidate set. Ties prefer larger sets, then canonical
// order. Returns the set and the questioner-side count.
inline std::optional<std::pair<PropertySet, int>> select_count_slots(
    const TrackerState& tracker, const std::set<std::string>& asked) {
    std::set<PropertySet> universe;
    for (int i : tracker.candidates()) {
        const auto& g = tracker.graphs[static_cast<std::size_t>(i)];
        for (std::size_t n = 0; n < g.nodes.size(); ++n)
            if (!g.confirmed[n] && !g.nodes[n].is_identifier()) universe.insert(g.nodes[n]);
    }
    const double target = tracker.candidate_count() / 2.0;
    std::optional<PropertySet> best;
    double best_score = 0;
    int best_card = 0;
    for (const auto& pset : universe) {
        QuestionAction probe;
        probe.subtype = QuestionSubtype::CountNoHint;
        probe.p_set = pset;
        if (asked.count(probe.key())) continue;
        const double score = std::abs(frequency(tracker, pset) - target);
        const int card = pset.cardinality();
        if (!best || score < best_score || (score == best_score && card > best_card) ||
            (score == best_score && card == best_card && pset < *best)) {
            best = pset;
            best_score = score;
            best_card = card;
        }
    }
    if (!best) return std::nullopt;
    return std::make_pair(*best, count_matching(*tracker.taxonomy, *tracker.scene, *best));
}

namespace detail {

// All valid slot assignments for non-count subtypes whose answer could still
// teach the questioner something.
inline std::vector<QuestionAction> enumerate_slot_candidates(
    const TrackerState& tracker, QuestionSubtype subtype,
    const std::vector<HistoryEntry>& history, const std::set<std::string>& asked) {
    const Taxonomy& tax = *tracker.taxonomy;
    const SceneGraph& scene = *tracker.scene;
    std::vector<QuestionAction> out;
    auto push_if_new = [&](QuestionAction q) {
        if (!asked.count(q.key())) out.push_back(std::move(q));
    };

    switch (subtype) {
        case QuestionSubtype::ExtremePic: {
            for (Direction d : all_directions()) {
                auto idx = extreme_index(scene, d, all_indices(scene));
                if (!idx || tracker.presence[static_cast<std::size_t>(*idx)] != Presence::Unknown)
                    continue;
                QuestionAction q;
                q.subtype = subtype;
                q.direction = d;
                q.self_desc = minimal_unique_desc(
                    tax, scene, scene.objects[static_cast<std::size_t>(*idx)]);
                push_if_new(std::move(q));
            }
            break;
        }
        case QuestionSubtype::ExtremeObj: {
            for (const auto& surface : scene.objects) {
                const auto children = scene.children_of(surface.id);
                if (children.empty()) continue;
                const PropertySet anchor = minimal_unique_desc(tax, scene, surface);
                if (count_matching(tax, scene, anchor) != 1) continue;
                for (Direction d : all_directions()) {
                    auto idx = extreme_index(scene, d, children);
                    if (tracker.presence[static_cast<std::size_t>(*idx)] != Presence::Unknown)
                        continue;
                    QuestionAction q;
                    q.subtype = subtype;
                    q.direction = d;
                    q.anchor = anchor;
                    q.self_desc = minimal_unique_desc(
                        tax, scene, scene.objects[static_cast<std::size_t>(*idx)]);
                    push_if_new(std::move(q));
                }
            }
            break;
        }
        case QuestionSubtype::ExtremeObj2: {
            std::set<PropertySet> universe;
            for (const auto& o : scene.objects)
                for (const auto& p : tax.enumerate_property_sets(o.traits(), o.id))
                    if (!p.is_identifier()) universe.insert(p);
            for (const auto& anchor_set : universe) {
                const auto matchers = matching_indices(tax, scene, anchor_set);
                if (matchers.size() < 2) continue;  // a unique anchor is an extreme-obj question
                for (Direction d2 : all_directions()) {
                    auto anchor = extreme_index(scene, d2, matchers);
                    const auto children =
                        scene.children_of(scene.objects[static_cast<std::size_t>(*anchor)].id);
                    if (children.empty()) continue;
                    for (Direction d : all_directions()) {
                        auto idx = extreme_index(scene, d, children);
                        if (tracker.presence[static_cast<std::size_t>(*idx)] !=
                            Presence::Unknown)
                            continue;
                        QuestionAction q;
                        q.subtype = subtype;
                        q.direction = d;
                        q.direction2 = d2;
                        q.anchor = anchor_set;
                        q.self_desc = minimal_unique_desc(
                            tax, scene, scene.objects[static_cast<std::size_t>(*idx)]);
                        push_if_new(std::move(q));
                    }
                }
            }
            break;
        }
        case QuestionSubtype::RefIt:
        case QuestionSubtype::RefThem: {
            if (history.empty()) break;
            const auto& last = history.back();
            if (!is_count(last.question.subtype) || last.answer.kind != AnswerKind::Count) break;
            const int answered = last.answer.count;
            if (subtype == QuestionSubtype::RefIt ? answered != 1 : answered < 2) break;
            const PropertySet& pset = *last.question.p_set;
            bool informative = false;
            for (int i : matching_indices(tax, scene, pset))
                if (tracker.presence[static_cast<std::size_t>(i)] == Presence::Unknown)
                    informative = true;
            if (!informative) break;
            QuestionAction q;
            q.subtype = subtype;
            q.p_set = pset;
            q.antecedent_round = static_cast<int>(history.size()) - 1;
            push_if_new(std::move(q));
            break;
        }
        case QuestionSubtype::QueryColor:
        case QuestionSubtype::QueryMaterial: {
            const bool color = subtype == QuestionSubtype::QueryColor;
            const PropertyKind kind = color ? PropertyKind::Color : PropertyKind::Material;
            for (std::size_t i = 0; i < scene.objects.size(); ++i) {
                const auto& o = scene.objects[i];
                const auto& g = tracker.graphs[i];
                const PropertySet attr_node = color ? PropertySet::of_color(o.color)
                                                    : PropertySet::of_material(o.material);
                if (g.is_confirmed(attr_node)) continue;  // nothing new to learn
                auto desc = minimal_unique_desc_excluding(tax, scene, o, kind);
                if (!desc) continue;
                QuestionAction q;
                q.subtype = subtype;
                q.p_set = *desc;
                q.self_value = color ? o.color : o.material;
                push_if_new(std::move(q));
            }
            break;
        }
        default:
            break;
    }
    return out;
}

}  // namespace detail

// All informative slot assignments for a non-count subtype, in stable order.
inline std::vector<QuestionAction> enumerate_question_options(
    const TrackerState& tracker, QuestionSubtype subtype,
    const std::vector<HistoryEntry>& history, const std::set<std::string>& asked) {
    return detail::enumerate_slot_candidates(tracker, subtype, history, asked);
}

// Fills slots for a non-count subtype by sampling uniformly from the valid
// assignments; nullopt when the subtype has nothing informative to ask.
inline std::optional<QuestionAction> select_other_slots(const TrackerState& tracker,
                                                        QuestionSubtype subtype,
                                                        const std::vector<HistoryEntry>& history,
                                                        const std::set<std::string>& asked,
                                                        Rng& rng) {
    auto candidates = detail::enumerate_slot_candidates(tracker, subtype, history, asked);
    if (candidates.empty()) return std::nullopt;
    return candidates[rng.range(candidates.size())];
}

// Fallback guess when no subtype can be asked: the candidate about which the
// least is known.
inline GuessAction forced_guess(const TrackerState& tracker) {
    const auto cands = tracker.candidates();
    auto best_of = [&](const std::vector<int>& pool) {
        int best = pool.front();
        for (int i : pool) {
            const auto& g = tracker.graphs[static_cast<std::size_t>(i)];
            const auto& b = tracker.graphs[static_cast<std::size_t>(best)];
            if (g.confirmed_count() < b.confirmed_count() ||
                (g.confirmed_count() == b.confirmed_count() &&
                 g.object_id < b.object_id))
                best = i;
        }
        return tracker.scene->objects[static_cast<std::size_t>(best)].id;
    };
    if (!cands.empty()) return GuessAction{best_of(cands)};
    std::vector<int> unverified;
    for (std::size_t i = 0; i < tracker.presence.size(); ++i)
        if (tracker.presence[i] != Presence::Verified) unverified.push_back(static_cast<int>(i));
    if (!unverified.empty()) return GuessAction{best_of(unverified)};
    return GuessAction{tracker.scene->objects.front().id};
}

// One questioner step: guess as soon as the target is resolved, otherwise
// sample a subtype from the allowed list and fill its slots, falling through
// to other subtypes when a selector comes up empty.
inline std::variant<QuestionAction, GuessAction> next_step(const TrackerState& tracker,
                                                           const std::vector<HistoryEntry>& history,
                                                           const StrategyConfig& cfg, Rng& rng) {
    if (auto target = resolved_target(tracker)) return GuessAction{*target};

    const auto asked = asked_keys(history);
    std::vector<QuestionSubtype> remaining = allowed_types(tracker, history, cfg);
    while (!remaining.empty()) {
        const std::size_t pick = rng.range(remaining.size());
        const QuestionSubtype subtype = remaining[pick];
        if (is_count(subtype)) {
            if (auto slots = select_count_slots(tracker, asked)) {
                QuestionAction q;
                q.subtype = subtype;
                q.p_set = slots->first;
                if (subtype == QuestionSubtype::CountHint) q.count_hint = slots->second;
                return q;
            }
            // Both count subtypes share their slot pool; drop them together.
            remaining.erase(std::remove_if(remaining.begin(), remaining.end(),
                                           [](QuestionSubtype s) { return is_count(s); }),
                            remaining.end());
            continue;
        }
        if (auto q = select_other_slots(tracker, subtype, history, asked, rng)) return *q;
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return forced_guess(tracker);
}

}  // namespace spotdiff
