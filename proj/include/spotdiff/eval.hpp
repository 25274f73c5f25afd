#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spotdiff/asim.hpp"
#include "spotdiff/pipeline.hpp"
#include "spotdiff/records.hpp"
#include "spotdiff/state.hpp"

namespace spotdiff {

// Fraction of records whose guess names the ground-truth target.
inline double task_success(const std::vector<DialogRecord>& records) {
    if (records.empty()) throw Error("task_success: no records");
    int ok = 0;
    for (const auto& r : records)
        if (r.guess.object_id == r.target_id) ++ok;
    return static_cast<double>(ok) / static_cast<double>(records.size());
}

// A count question generalizing at least two different kinds of objects.
struct CateQ {
    PropertySet pset;
    std::optional<int> hint;
};

inline std::vector<CateQ> extract_cateq(const Taxonomy& taxonomy, const DialogRecord& record,
                                        const SceneGraph& scene_q) {
    std::vector<CateQ> out;
    for (const auto& round : record.rounds) {
        if (!is_count(round.question.subtype) || !round.question.p_set) continue;
        const PropertySet& pset = *round.question.p_set;
        std::set<std::string> kinds;
        for (int i : matching_indices(taxonomy, scene_q, pset))
            kinds.insert(scene_q.objects[static_cast<std::size_t>(i)].category);
        if (kinds.size() >= 2) out.push_back(CateQ{pset, round.question.count_hint});
    }
    return out;
}

// Fraction of hint-bearing Cate-Q whose hint matches the questioner scene;
// nullopt when the dialog has no hint-bearing Cate-Q.
inline std::optional<double> cateq_accuracy(const Taxonomy& taxonomy, const DialogRecord& record,
                                            const SceneGraph& scene_q) {
    int total = 0, correct = 0;
    for (const auto& cq : extract_cateq(taxonomy, record, scene_q)) {
        if (!cq.hint) continue;
        ++total;
        if (*cq.hint == count_matching(taxonomy, scene_q, cq.pset)) ++correct;
    }
    if (total == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(total);
}

// |A ∩ B| / |B| over the Cate-Q property-set sets of the evaluated and
// reference dialogs; nullopt when the reference has none.
inline std::optional<double> cateq_recall(const Taxonomy& taxonomy, const DialogRecord& evaluated,
                                          const DialogRecord& reference,
                                          const SceneGraph& scene_q) {
    std::set<PropertySet> a, b;
    for (const auto& cq : extract_cateq(taxonomy, evaluated, scene_q)) a.insert(cq.pset);
    for (const auto& cq : extract_cateq(taxonomy, reference, scene_q)) b.insert(cq.pset);
    if (b.empty()) return std::nullopt;
    int hit = 0;
    for (const auto& p : b)
        if (a.count(p)) ++hit;
    return static_cast<double>(hit) / static_cast<double>(b.size());
}

enum class Transition { Deepening, Converting };

inline const char* to_string(Transition t) {
    return t == Transition::Deepening ? "deepening" : "converting";
}

// The property set a question is "about" for transition analysis: count
// questions carry one, refer questions inherit their antecedent's.
inline std::optional<PropertySet> subject_pset(const QuestionAction& q) {
    if (is_count(q.subtype) || is_refer(q.subtype)) return q.p_set;
    return std::nullopt;
}

// Deepening iff the next set strictly refines (entails) the previous one;
// repeats and everything else convert.
inline std::optional<Transition> classify_transition(const Taxonomy& taxonomy,
                                                     const QuestionAction& prev,
                                                     const QuestionAction& next) {
    const auto a = subject_pset(prev);
    const auto b = subject_pset(next);
    if (!a || !b) return std::nullopt;
    if (*a != *b && taxonomy.entails(*b, *a)) return Transition::Deepening;
    return Transition::Converting;
}

struct MetricsReport {
    double success_rate = 0.0;
    // Success rate per accuracy/recall bucket: [0,.25) [.25,.5) [.5,.75) [.75,1].
    std::vector<double> bucket_edges = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<int> cateq_accuracy_bucket_sizes = {0, 0, 0, 0};
    std::vector<double> cateq_accuracy_bucket_success = {0, 0, 0, 0};
    std::vector<int> cateq_recall_bucket_sizes = {0, 0, 0, 0};
    std::vector<double> cateq_recall_bucket_success = {0, 0, 0, 0};
    // Success rate of dialogs containing at least one transition of each kind.
    int deepening_dialogs = 0;
    double deepening_success = 0.0;
    int converting_dialogs = 0;
    double converting_success = 0.0;
    std::map<std::string, double> per_subtype_accuracy;
    std::map<std::string, int> per_subtype_total;

    json to_json() const {
        json j;
        j["success_rate"] = success_rate;
        j["bucket_edges"] = bucket_edges;
        j["cateq_accuracy_buckets"] = {{"sizes", cateq_accuracy_bucket_sizes},
                                       {"success", cateq_accuracy_bucket_success}};
        j["cateq_recall_buckets"] = {{"sizes", cateq_recall_bucket_sizes},
                                     {"success", cateq_recall_bucket_success}};
        j["transitions"] = {{"deepening_dialogs", deepening_dialogs},
                            {"deepening_success", deepening_success},
                            {"converting_dialogs", converting_dialogs},
                            {"converting_success", converting_success}};
        j["per_subtype_accuracy"] = per_subtype_accuracy;
        j["per_subtype_total"] = per_subtype_total;
        return j;
    }
};

inline int bucket_of(double v) {
    if (v < 0.25) return 0;
    if (v < 0.5) return 1;
    if (v < 0.75) return 2;
    return 3;
}

// Per-subtype fraction of agent answers equal to the oracle answer over the
// dataset's recorded questions, answered against each record's answerer scene.
inline std::pair<std::map<std::string, double>, std::map<std::string, int>>
answer_accuracy_by_subtype(const World& world, const LoadedDataset& ds, const AnswerAgent& agent,
                           Rng& rng) {
    std::map<std::string, int> total, correct;
    for (const auto& d : ds.dialogs) {
        const std::string answer_scene_id =
            d.pair_id + (d.orientation == "forward" ? "_a" : "_q");
        const SceneGraph& scene = ds.scene(answer_scene_id).scene;
        const QuestionAction* prev = nullptr;
        for (const auto& round : d.rounds) {
            const AnswerAction oracle = oracle_answer(world.taxonomy, scene, round.question, prev);
            const AnswerAction got = agent.answer(world, scene, round.question, prev, rng);
            const std::string key = to_string(round.question.subtype);
            ++total[key];
            if (got == oracle) ++correct[key];
            prev = &round.question;
        }
    }
    std::map<std::string, double> accuracy;
    for (const auto& [key, n] : total)
        accuracy[key] = static_cast<double>(correct[key]) / static_cast<double>(n);
    return {accuracy, total};
}

// Full metric suite over a loaded dataset. Cate-Q recall is computed against
// the dialog's sibling (same pair, other orientation) when present, else
// against itself.
inline MetricsReport evaluate_records(const World& world, const LoadedDataset& ds,
                                      const AnswerAgent& agent, Rng& rng) {
    MetricsReport report;
    report.success_rate = task_success(ds.dialogs);

    std::vector<double> acc_success[4], rec_success[4];
    std::vector<int> deep, conv;
    for (const auto& d : ds.dialogs) {
        const SceneGraph& scene_q = ds.scene(d.scene_id).scene;
        const double success = d.guess.object_id == d.target_id ? 1.0 : 0.0;
        if (auto acc = cateq_accuracy(world.taxonomy, d, scene_q))
            acc_success[bucket_of(*acc)].push_back(success);
        // Recorded dialogs are their own reference; comparing fresh agent
        // dialogs against them happens in rerun_report.
        if (auto rec = cateq_recall(world.taxonomy, d, d, scene_q))
            rec_success[bucket_of(*rec)].push_back(success);

        bool has_deep = false, has_conv = false;
        for (std::size_t i = 1; i < d.rounds.size(); ++i) {
            auto t = classify_transition(world.taxonomy, d.rounds[i - 1].question,
                                         d.rounds[i].question);
            if (!t) continue;
            (*t == Transition::Deepening ? has_deep : has_conv) = true;
        }
        if (has_deep) deep.push_back(static_cast<int>(success));
        if (has_conv) conv.push_back(static_cast<int>(success));
    }
    auto mean = [](const auto& v) {
        if (v.empty()) return 0.0;
        double s = 0;
        for (auto x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    for (int b = 0; b < 4; ++b) {
        report.cateq_accuracy_bucket_sizes[static_cast<std::size_t>(b)] =
            static_cast<int>(acc_success[b].size());
        report.cateq_accuracy_bucket_success[static_cast<std::size_t>(b)] = mean(acc_success[b]);
        report.cateq_recall_bucket_sizes[static_cast<std::size_t>(b)] =
            static_cast<int>(rec_success[b].size());
        report.cateq_recall_bucket_success[static_cast<std::size_t>(b)] = mean(rec_success[b]);
    }
    report.deepening_dialogs = static_cast<int>(deep.size());
    report.deepening_success = mean(deep);
    report.converting_dialogs = static_cast<int>(conv.size());
    report.converting_success = mean(conv);

    auto [accuracy, totals] = answer_accuracy_by_subtype(world, ds, agent, rng);
    report.per_subtype_accuracy = accuracy;
    report.per_subtype_total = totals;
    return report;
}

// Fresh self-play on the dataset's pairs with the given answer agent, scored
// over all episodes (no retention gate). New dialogs are compared to the
// dataset's retained dialogs of the same pair and orientation: their Cate-Q
// recall against that reference buckets the success rates.
struct RerunReport {
    int episodes = 0;
    double success_rate = 0.0;
    std::vector<int> recall_bucket_sizes = {0, 0, 0, 0};
    std::vector<double> recall_bucket_success = {0, 0, 0, 0};

    json to_json() const {
        json j;
        j["episodes"] = episodes;
        j["success_rate"] = success_rate;
        j["recall_buckets"] = {{"sizes", recall_bucket_sizes},
                               {"success", recall_bucket_success}};
        return j;
    }
};

inline RerunReport rerun_report(const World& world, const LoadedDataset& ds, const RunConfig& cfg,
                                const AnswerAgent& agent, std::uint64_t seed) {
    std::map<std::string, const SceneRecord*> by_id;
    for (const auto& s : ds.scenes) by_id[s.scene_id] = &s;
    std::map<std::pair<std::string, std::string>, const DialogRecord*> reference;
    for (const auto& d : ds.dialogs) reference[{d.pair_id, d.orientation}] = &d;

    RerunReport report;
    int ok = 0;
    std::vector<double> bucket_success[4];
    Rng root(seed);
    int index = 0;
    for (const auto& s : ds.scenes) {
        if (s.role != "q") continue;
        auto it = by_id.find(s.pair_id + "_a");
        if (it == by_id.end()) continue;
        ScenePair pair;
        pair.scene_q = s.scene;
        pair.scene_a = it->second->scene;
        pair.target_id = s.diff_object_id;
        pair.replacement_id = it->second->diff_object_id;
        for (const char* orientation : {"forward", "reverse"}) {
            auto ep = run_selfplay(world, pair, orientation, cfg,
                                   root.fork(static_cast<std::uint64_t>(index++)), agent);
            ++report.episodes;
            if (ep.record.success) ++ok;
            auto ref = reference.find({s.pair_id, orientation});
            if (ref == reference.end()) continue;
            const SceneGraph& scene_q =
                orientation == std::string("forward") ? pair.scene_q : pair.scene_a;
            if (auto rec = cateq_recall(world.taxonomy, ep.record, *ref->second, scene_q))
                bucket_success[bucket_of(*rec)].push_back(ep.record.success ? 1.0 : 0.0);
        }
    }
    if (report.episodes == 0) throw Error("rerun_report: no pairs in dataset");
    report.success_rate = static_cast<double>(ok) / report.episodes;
    for (int b = 0; b < 4; ++b) {
        report.recall_bucket_sizes[static_cast<std::size_t>(b)] =
            static_cast<int>(bucket_success[b].size());
        double sum = 0;
        for (double v : bucket_success[b]) sum += v;
        report.recall_bucket_success[static_cast<std::size_t>(b)] =
            bucket_success[b].empty() ? 0.0 : sum / static_cast<double>(bucket_success[b].size());
    }
    return report;
}

inline double rerun_success(const World& world, const LoadedDataset& ds, const RunConfig& cfg,
                            const AnswerAgent& agent, std::uint64_t seed) {
    return rerun_report(world, ds, cfg, agent, seed).success_rate;
}

}  // namespace spotdiff
