#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spotdiff/actions.hpp"
#include "spotdiff/describe.hpp"
#include "spotdiff/errors.hpp"
#include "spotdiff/scene.hpp"

namespace spotdiff {

// Per-object directed graph over property sets. Edges run from the more
// specific set to everything it entails; the transitive relation is stored
// directly. Confirming a node confirms everything reachable from it, and the
// union of two confirmed sets is confirmed as well.
struct ObjectStateGraph {
    std::string object_id;
    std::vector<PropertySet> nodes;  // canonical order; includes the identifier
    std::map<PropertySet, int> index;
    std::vector<std::vector<int>> reach;  // entailed nodes, self excluded
    std::vector<bool> confirmed;
    int identifier_node = -1;

    bool has(const PropertySet& p) const { return index.count(p) > 0; }

    int node_id(const PropertySet& p) const {
        auto it = index.find(p);
        if (it == index.end())
            throw LookupError("property set " + p.to_string() + " is not a node of " + object_id);
        return it->second;
    }

    bool is_confirmed(const PropertySet& p) const {
        return confirmed[static_cast<std::size_t>(node_id(p))];
    }

    int confirmed_count() const {
        return static_cast<int>(std::count(confirmed.begin(), confirmed.end(), true));
    }

    bool fully_confirmed() const {
        return std::all_of(confirmed.begin(), confirmed.end(), [](bool b) { return b; });
    }
};

inline ObjectStateGraph build_state_graph(const Taxonomy& taxonomy, const ObjectInstance& o) {
    ObjectStateGraph g;
    g.object_id = o.id;
    g.nodes = taxonomy.enumerate_property_sets(o.traits(), o.id);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) g.index[g.nodes[i]] = static_cast<int>(i);
    g.identifier_node = g.node_id(PropertySet::of_identifier(o.id));
    g.reach.assign(g.nodes.size(), {});
    g.confirmed.assign(g.nodes.size(), false);
    const ObjectTraits traits = o.traits();
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        for (std::size_t j = 0; j < g.nodes.size(); ++j) {
            if (i == j) continue;
            const bool edge = g.nodes[i].is_identifier()
                                  ? taxonomy.satisfies(traits, g.nodes[j])
                                  : taxonomy.entails(g.nodes[i], g.nodes[j]);
            if (edge) g.reach[i].push_back(static_cast<int>(j));
        }
    return g;
}

namespace detail {

inline void confirm_with_reach(ObjectStateGraph& g, int node) {
    if (g.confirmed[static_cast<std::size_t>(node)]) return;
    g.confirmed[static_cast<std::size_t>(node)] = true;
    for (int r : g.reach[static_cast<std::size_t>(node)])
        g.confirmed[static_cast<std::size_t>(r)] = true;
}

inline void union_closure(const Taxonomy& taxonomy, ObjectStateGraph& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            if (!g.confirmed[i] || g.nodes[i].is_identifier()) continue;
            for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
                if (!g.confirmed[j] || g.nodes[j].is_identifier()) continue;
                const PropertySet u = taxonomy.union_sets(g.nodes[i], g.nodes[j]);
                auto it = g.index.find(u);
                if (it == g.index.end()) continue;
                if (!g.confirmed[static_cast<std::size_t>(it->second)]) {
                    confirm_with_reach(g, it->second);
                    changed = true;
                }
            }
        }
    }
}

}  // namespace detail

// Confirms a node, propagates along entailment, then applies the union rule
// to a fixed point. Nodes are never unconfirmed.
inline void confirm(const Taxonomy& taxonomy, ObjectStateGraph& g, const PropertySet& pset) {
    detail::confirm_with_reach(g, g.node_id(pset));
    detail::union_closure(taxonomy, g);
}

enum class Presence { Unknown, Verified, Refuted };

// Questioner-side visual state: one state graph per object, presence marks,
// and the derived candidate set. An object is a candidate while its presence
// is unknown and some node is unconfirmed.
struct TrackerState {
    const Taxonomy* taxonomy = nullptr;
    const SceneGraph* scene = nullptr;  // the questioner's scene
    std::vector<ObjectStateGraph> graphs;
    std::vector<Presence> presence;
    std::vector<std::pair<QuestionAction, AnswerAction>> evidence_log;

    bool in_candidates(int i) const {
        return presence[static_cast<std::size_t>(i)] == Presence::Unknown &&
               !graphs[static_cast<std::size_t>(i)].fully_confirmed();
    }

    std::vector<int> candidates() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < graphs.size(); ++i)
            if (in_candidates(static_cast<int>(i))) out.push_back(static_cast<int>(i));
        return out;
    }

    int candidate_count() const { return static_cast<int>(candidates().size()); }

    int object_index(const std::string& id) const {
        int i = scene->find_index(id);
        if (i < 0) throw LookupError("tracker: unknown object '" + id + "'");
        return i;
    }
};

inline TrackerState init_tracker(const Taxonomy& taxonomy, const SceneGraph& scene) {
    TrackerState t;
    t.taxonomy = &taxonomy;
    t.scene = &scene;
    for (const auto& o : scene.objects) t.graphs.push_back(build_state_graph(taxonomy, o));
    t.presence.assign(scene.objects.size(), Presence::Unknown);
    return t;
}

// Number of candidate objects whose graph holds `pset` as an unconfirmed node.
inline int frequency(const TrackerState& t, const PropertySet& pset) {
    int n = 0;
    for (int i : t.candidates()) {
        const auto& g = t.graphs[static_cast<std::size_t>(i)];
        auto it = g.index.find(pset);
        if (it != g.index.end() && !g.confirmed[static_cast<std::size_t>(it->second)]) ++n;
    }
    return n;
}

namespace detail {

// Verification confirms the identifier node, which reaches every other node.
inline void set_verified(TrackerState& t, int i) {
    if (t.presence[static_cast<std::size_t>(i)] == Presence::Refuted)
        throw TrackerInconsistency("object " + t.scene->objects[static_cast<std::size_t>(i)].id +
                                   " verified after being refuted");
    t.presence[static_cast<std::size_t>(i)] = Presence::Verified;
    auto& g = t.graphs[static_cast<std::size_t>(i)];
    confirm_with_reach(g, g.identifier_node);
}

inline void set_refuted(TrackerState& t, int i) {
    for (std::size_t j = 0; j < t.presence.size(); ++j)
        if (t.presence[j] == Presence::Refuted && j != static_cast<std::size_t>(i))
            throw TrackerInconsistency("second refuted object " +
                                       t.scene->objects[static_cast<std::size_t>(i)].id);
    t.presence[static_cast<std::size_t>(i)] = Presence::Refuted;
}

inline void apply_count_evidence(TrackerState& t, const QuestionAction& q, const AnswerAction& a) {
    const PropertySet& pset = *q.p_set;
    const int mine = count_matching(*t.taxonomy, *t.scene, pset);
    const int theirs = a.count;
    const auto cands = t.candidates();
    if (mine == theirs) {
        // Counts agree: the set is accounted for on both sides.
        for (int i : cands) {
            auto& g = t.graphs[static_cast<std::size_t>(i)];
            if (g.has(pset) && !g.is_confirmed(pset)) confirm(*t.taxonomy, g, pset);
        }
    } else if (mine == theirs + 1) {
        // One of my matchers is the difference; everyone else is accounted for.
        for (int i : cands) {
            const auto& o = t.scene->objects[static_cast<std::size_t>(i)];
            if (!object_satisfies(*t.taxonomy, o, pset)) set_verified(t, i);
        }
    } else if (mine == theirs - 1) {
        // The replacement matches, my matchers all have counterparts.
        for (int i : cands) {
            const auto& o = t.scene->objects[static_cast<std::size_t>(i)];
            if (object_satisfies(*t.taxonomy, o, pset)) set_verified(t, i);
        }
    }
    // Larger deltas only occur with a noisy answerer; evidence is logged but
    // nothing is concluded.
}

// Matches an enumeration against my objects satisfying the condition. Forced
// matches verify; a single unaccounted object is the difference.
inline void apply_enumeration_evidence(TrackerState& t, const PropertySet& condition,
                                       const std::vector<DescGroup>& groups) {
    const auto mine = matching_indices(*t.taxonomy, *t.scene, condition);
    std::set<int> remaining(mine.begin(), mine.end());
    for (const auto& group : groups) {
        std::vector<int> matched;
        for (int i : remaining)
            if (t.taxonomy->satisfies(t.scene->objects[static_cast<std::size_t>(i)].traits(),
                                      group.desc))
                matched.push_back(i);
        if (static_cast<int>(matched.size()) <= group.count) {
            for (int i : matched) {
                if (t.presence[static_cast<std::size_t>(i)] == Presence::Unknown)
                    set_verified(t, i);
                remaining.erase(i);
            }
        } else {
            // More of mine fit the description than were enumerated; identity
            // is ambiguous, so none of them can be verified or refuted.
            for (int i : matched) remaining.erase(i);
        }
    }
    if (remaining.size() == 1) {
        const int i = *remaining.begin();
        if (t.presence[static_cast<std::size_t>(i)] == Presence::Unknown) set_refuted(t, i);
    }
}

inline std::optional<int> unique_match(const TrackerState& t, const PropertySet& desc) {
    const auto m = matching_indices(*t.taxonomy, *t.scene, desc);
    if (m.size() == 1) return m[0];
    return std::nullopt;
}

// My own extreme object under the question's condition.
inline std::optional<int> expected_extreme(const TrackerState& t, const QuestionAction& q) {
    const SceneGraph& scene = *t.scene;
    std::vector<int> conditioned;
    if (q.subtype == QuestionSubtype::ExtremePic) {
        conditioned = all_indices(scene);
    } else if (q.subtype == QuestionSubtype::ExtremeObj) {
        auto anchor = unique_match(t, *q.anchor);
        if (!anchor) return std::nullopt;
        conditioned = scene.children_of(scene.objects[static_cast<std::size_t>(*anchor)].id);
    } else {
        const auto anchors = matching_indices(*t.taxonomy, scene, *q.anchor);
        if (anchors.empty()) return std::nullopt;
        const auto anchor = extreme_index(scene, *q.direction2, anchors);
        conditioned = scene.children_of(scene.objects[static_cast<std::size_t>(*anchor)].id);
    }
    return extreme_index(scene, *q.direction, conditioned);
}

inline void apply_extreme_evidence(TrackerState& t, const QuestionAction& q,
                                   const AnswerAction& a) {
    if (a.kind == AnswerKind::None) {
        if (q.subtype == QuestionSubtype::ExtremeObj) {
            auto anchor = unique_match(t, *q.anchor);
            if (!anchor || t.presence[static_cast<std::size_t>(*anchor)] != Presence::Unknown)
                return;
            if (a.reason == NoneReason::Absent)
                set_refuted(t, *anchor);  // my anchor has no counterpart
            else
                set_verified(t, *anchor);  // a second matcher exists over there
        }
        return;
    }
    auto expected = expected_extreme(t, q);
    if (!expected || a.groups.empty()) return;
    const auto& o = t.scene->objects[static_cast<std::size_t>(*expected)];
    if (t.presence[static_cast<std::size_t>(*expected)] != Presence::Unknown) return;
    if (t.taxonomy->satisfies(o.traits(), a.groups.front().desc))
        set_verified(t, *expected);
    else
        set_refuted(t, *expected);
}

inline void apply_query_evidence(TrackerState& t, const QuestionAction& q, const AnswerAction& a) {
    auto referent = unique_match(t, *q.p_set);
    if (!referent) return;
    const int i = *referent;
    const auto& o = t.scene->objects[static_cast<std::size_t>(i)];
    const bool color = q.subtype == QuestionSubtype::QueryColor;
    if (a.kind == AnswerKind::None) {
        if (t.presence[static_cast<std::size_t>(i)] != Presence::Unknown) return;
        if (a.reason == NoneReason::Absent)
            set_refuted(t, i);
        else
            set_verified(t, i);  // several matches over there, so mine has a counterpart
        return;
    }
    const std::string& my_value = color ? o.color : o.material;
    if (a.value == my_value) {
        auto& g = t.graphs[static_cast<std::size_t>(i)];
        const PropertySet node =
            color ? PropertySet::of_color(my_value) : PropertySet::of_material(my_value);
        if (!g.is_confirmed(node)) confirm(*t.taxonomy, g, node);
    } else if (t.presence[static_cast<std::size_t>(i)] == Presence::Unknown) {
        set_refuted(t, i);  // the thing over there looks different
    }
}

}  // namespace detail

// Integrates one question/answer pair into the tracker. Confirmations are
// monotone: nothing is ever unconfirmed.
inline void apply_answer(TrackerState& t, const QuestionAction& q, const AnswerAction& a) {
    if (is_count(q.subtype)) {
        if (a.kind != AnswerKind::Count)
            throw ProtocolError("count question answered with " + std::string(to_string(a.kind)));
        detail::apply_count_evidence(t, q, a);
    } else if (is_refer(q.subtype)) {
        if (a.kind != AnswerKind::Description && a.kind != AnswerKind::None)
            throw ProtocolError("refer question answered with " + std::string(to_string(a.kind)));
        if (a.kind == AnswerKind::Description)
            detail::apply_enumeration_evidence(t, *q.p_set, a.groups);
    } else if (is_extreme(q.subtype)) {
        if (a.kind != AnswerKind::Description && a.kind != AnswerKind::None)
            throw ProtocolError("extreme question answered with " +
                                std::string(to_string(a.kind)));
        detail::apply_extreme_evidence(t, q, a);
    } else if (is_query(q.subtype)) {
        if (a.kind != AnswerKind::Attribute && a.kind != AnswerKind::None)
            throw ProtocolError("query question answered with " + std::string(to_string(a.kind)));
        detail::apply_query_evidence(t, q, a);
    }
    t.evidence_log.emplace_back(q, a);
}

// Snapshot of the tracker for debugging and the interactive mode: per-object
// presence, candidate membership and the confirmed property sets.
inline std::string tracker_snapshot(const TrackerState& t) {
    std::string out;
    for (std::size_t i = 0; i < t.graphs.size(); ++i) {
        const auto& g = t.graphs[i];
        out += g.object_id;
        out += t.presence[i] == Presence::Unknown
                   ? " [unknown]"
                   : (t.presence[i] == Presence::Verified ? " [verified]" : " [REFUTED]");
        if (t.in_candidates(static_cast<int>(i))) out += " [candidate]";
        out += " confirmed:";
        bool any = false;
        for (std::size_t n = 0; n < g.nodes.size(); ++n)
            if (g.confirmed[n]) {
                out += " " + g.nodes[n].to_string();
                any = true;
            }
        if (!any) out += " (none)";
        out += "\n";
    }
    return out;
}

// The refuted object, or the last candidate standing once everything else is
// verified or fully confirmed.
inline std::optional<std::string> resolved_target(const TrackerState& t) {
    std::vector<int> refuted;
    for (std::size_t i = 0; i < t.presence.size(); ++i)
        if (t.presence[i] == Presence::Refuted) refuted.push_back(static_cast<int>(i));
    if (refuted.size() > 1)
        throw TrackerInconsistency("multiple refuted objects");
    if (refuted.size() == 1)
        return t.scene->objects[static_cast<std::size_t>(refuted[0])].id;
    const auto cands = t.candidates();
    if (cands.size() == 1)
        return t.scene->objects[static_cast<std::size_t>(cands[0])].id;
    return std::nullopt;
}

}  // namespace spotdiff
