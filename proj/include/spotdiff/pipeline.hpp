#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spotdiff/asim.hpp"
#include "spotdiff/config.hpp"
#include "spotdiff/nlg.hpp"
#include "spotdiff/qsim.hpp"
#include "spotdiff/records.hpp"
#include "spotdiff/state.hpp"
#include "spotdiff/world.hpp"

namespace spotdiff {

struct EpisodeResult {
    DialogRecord record;
    bool retained = false;
    std::string discard_reason;  // empty when retained
    int rounds_used = 0;
};

// An answer agent: the oracle, optionally wrapped in noise.
struct AnswerAgent {
    double epsilon = 0.0;

    AnswerAction answer(const World& world, const SceneGraph& scene, const QuestionAction& q,
                        const QuestionAction* prev, Rng& rng) const {
        AnswerAction a = oracle_answer(world.taxonomy, scene, q, prev);
        if (epsilon > 0.0) a = noisy_answer(world.catalog, a, epsilon, rng);
        return a;
    }
};

// One self-play episode. The questioner tracks state and picks actions, the
// answerer retrieves ground truth from its own scene, and both sides are
// rendered to text. Episodes that guess wrong, run past the round limit
// without resolving, or trip an internal inconsistency are marked discarded.
inline EpisodeResult run_selfplay(const World& world, const ScenePair& pair,
                                  const std::string& orientation, const RunConfig& cfg, Rng rng,
                                  const AnswerAgent& agent = {}) {
    const bool forward = orientation == "forward";
    const SceneGraph& scene_q = forward ? pair.scene_q : pair.scene_a;
    const SceneGraph& scene_a = forward ? pair.scene_a : pair.scene_q;
    const std::string target = forward ? pair.target_id : pair.replacement_id;

    EpisodeResult result;
    result.record.pair_id = "";  // assigned by the dataset assembler
    result.record.orientation = orientation;
    result.record.target_id = target;
    for (const auto& o : scene_q.objects)
        result.record.correct_object_list.emplace_back(o.category, project_bbox2d(scene_q, o));

    TrackerState tracker = init_tracker(world.taxonomy, scene_q);
    std::vector<HistoryEntry> history;
    std::optional<GuessAction> guess;
    bool forced = false;

    try {
        while (true) {
            auto step = next_step(tracker, history, cfg.strategy, rng);
            if (std::holds_alternative<GuessAction>(step)) {
                guess = std::get<GuessAction>(step);
                forced = !resolved_target(tracker).has_value();
                break;
            }
            const QuestionAction q = std::get<QuestionAction>(step);
            const QuestionAction* prev = history.empty() ? nullptr : &history.back().question;
            const AnswerAction a = agent.answer(world, scene_a, q, prev, rng);

            RealizedQuestion rq = realize_question(world.templates, world.phrases, q, rng);
            Round round;
            round.question = q;
            round.question_text = rq.text;
            round.answer = a;
            round.answer_text = realize_answer(world.templates, world.phrases, a, rq, rng);
            result.record.rounds.push_back(round);

            apply_answer(tracker, q, a);
            history.push_back(HistoryEntry{q, a});
            if (static_cast<int>(history.size()) >= cfg.strategy.max_rounds) {
                if (auto resolved = resolved_target(tracker)) {
                    guess = GuessAction{*resolved};
                } else {
                    guess = forced_guess(tracker);
                    forced = true;
                }
                break;
            }
        }
    } catch (const TrackerInconsistency& e) {
        result.record.guess = GuessAction{""};
        result.retained = false;
        result.discard_reason = std::string("tracker inconsistency: ") + e.what();
        result.rounds_used = static_cast<int>(result.record.rounds.size());
        return result;
    }

    result.record.guess = *guess;
    result.record.success = guess->object_id == target;
    result.rounds_used = static_cast<int>(result.record.rounds.size());
    if (!result.record.success)
        result.discard_reason = forced ? "unresolved at round limit" : "wrong guess";
    else if (result.record.rounds.empty())
        result.discard_reason = "empty dialog";
    result.retained = result.discard_reason.empty();
    return result;
}

// --- dataset assembly --------------------------------------------------------

struct PairOutcome {
    std::string pair_id;
    ScenePair pair;
    std::vector<EpisodeResult> episodes;  // forward, reverse
};

struct Manifest {
    std::string schema = kDatasetSchema;
    std::string config_hash;
    json config;
    int pairs_requested = 0;
    int pairs_generated = 0;
    int episodes_run = 0;
    int dialogs_retained = 0;
    double discard_rate = 0.0;
    std::map<std::string, int> split_pairs;
    std::map<std::string, int> split_dialogs;

    json to_json() const {
        json j;
        j["schema"] = schema;
        j["config_hash"] = config_hash;
        j["config"] = config;
        j["pairs_requested"] = pairs_requested;
        j["pairs_generated"] = pairs_generated;
        j["episodes_run"] = episodes_run;
        j["dialogs_retained"] = dialogs_retained;
        j["discard_rate"] = discard_rate;
        j["split_pairs"] = split_pairs;
        j["split_dialogs"] = split_dialogs;
        j["files"] = {{"scenes", "scenes.jsonl"}, {"dialogs", "dialogs.jsonl"}};
        return j;
    }
};

namespace detail {

inline std::string pair_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%06d", index);
    return buf;
}

// Deterministic per-pair work: generate the pair (reseeding derived streams
// on constraint failures) and run both orientations.
inline PairOutcome produce_pair(const World& world, const RunConfig& cfg, std::uint64_t seed,
                                int index, const AnswerAgent& agent) {
    PairOutcome out;
    out.pair_id = pair_name(index);
    Rng base = Rng(seed).fork(0x5ce4e).fork(static_cast<std::uint64_t>(index));
    bool built = false;
    for (int attempt = 0; attempt < 32 && !built; ++attempt) {
        Rng r = base.fork(static_cast<std::uint64_t>(attempt));
        try {
            SceneGraph scene =
                generate_scene(world.taxonomy, world.catalog, world.placement, cfg.scene, r);
            out.pair = inject_difference(world.taxonomy, world.catalog, world.placement, scene,
                                         cfg.scene, r);
            built = true;
        } catch (const GenerationError&) {
            // try the next derived stream
        }
    }
    if (!built)
        throw GenerationError("pair " + out.pair_id + " failed after 32 generation attempts");
    out.episodes.push_back(
        run_selfplay(world, out.pair, "forward", cfg, base.fork(1000), agent));
    out.episodes.push_back(
        run_selfplay(world, out.pair, "reverse", cfg, base.fork(1001), agent));
    return out;
}

inline std::vector<std::string> assign_splits(const RunConfig& cfg, int n, std::uint64_t seed) {
    // Pair-level split: shuffle indices deterministically, then cut by ratio.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng(seed).fork(0x511f7);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.range(i)]);
    const int n_valid = static_cast<int>(std::lround(cfg.split_valid * n));
    const int n_test = static_cast<int>(std::lround(cfg.split_test * n));
    std::vector<std::string> split(static_cast<std::size_t>(n), "train");
    for (int i = 0; i < n_valid && i < n; ++i) split[static_cast<std::size_t>(order[i])] = "valid";
    for (int i = n_valid; i < n_valid + n_test && i < n; ++i)
        split[static_cast<std::size_t>(order[i])] = "test";
    return split;
}

}  // namespace detail

// Generates `cfg.pairs` scene pairs, runs both orientations of self-play per
// pair, assigns pair-level splits, and produces the dataset in memory. Work
// is partitioned over workers by pair index; outputs are ordered by pair id,
// so results do not depend on the worker count.
struct DatasetBundle {
    std::vector<PairOutcome> pairs;
    std::vector<std::string> splits;  // parallel to pairs
    Manifest manifest;
};

inline DatasetBundle generate_dataset(const World& world, const RunConfig& cfg,
                                      const AnswerAgent& agent = {}) {
    DatasetBundle bundle;
    bundle.pairs.resize(static_cast<std::size_t>(cfg.pairs));
    const int workers = std::max(1, std::min(cfg.workers, cfg.pairs));
    std::vector<std::thread> threads;
    std::vector<std::string> worker_errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w]() {
            try {
                for (int i = w; i < cfg.pairs; i += workers)
                    bundle.pairs[static_cast<std::size_t>(i)] =
                        detail::produce_pair(world, cfg, cfg.seed, i, agent);
            } catch (const std::exception& e) {
                worker_errors[static_cast<std::size_t>(w)] = e.what();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& err : worker_errors)
        if (!err.empty()) throw GenerationError(err);

    bundle.splits = detail::assign_splits(cfg, cfg.pairs, cfg.seed);

    Manifest& m = bundle.manifest;
    m.config = cfg.to_json();
    m.config_hash = cfg.hash();
    m.pairs_requested = cfg.pairs;
    m.pairs_generated = cfg.pairs;
    for (std::size_t i = 0; i < bundle.pairs.size(); ++i) {
        m.split_pairs[bundle.splits[i]] += 1;
        for (const auto& ep : bundle.pairs[i].episodes) {
            m.episodes_run += 1;
            if (ep.retained) {
                m.dialogs_retained += 1;
                m.split_dialogs[bundle.splits[i]] += 1;
            }
        }
    }
    m.discard_rate =
        m.episodes_run == 0
            ? 0.0
            : 1.0 - static_cast<double>(m.dialogs_retained) / static_cast<double>(m.episodes_run);
    return bundle;
}

// Writes scenes.jsonl / dialogs.jsonl / manifest.json under `out_dir`
// (created if needed). Returns the manifest.
inline Manifest write_dataset(const World& world, const DatasetBundle& bundle,
                              const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string scenes_path = out_dir + "/scenes.jsonl";
    const std::string dialogs_path = out_dir + "/dialogs.jsonl";
    const std::string manifest_path = out_dir + "/manifest.json";
    try {
        std::ofstream scenes(scenes_path, std::ios::binary);
        std::ofstream dialogs(dialogs_path, std::ios::binary);
        if (!scenes || !dialogs) throw Error("cannot open output files in " + out_dir);
        for (std::size_t i = 0; i < bundle.pairs.size(); ++i) {
            const PairOutcome& p = bundle.pairs[i];
            const std::string& split = bundle.splits[i];
            scenes << scene_to_json(world.taxonomy, p.pair.scene_q, p.pair_id + "_q", p.pair_id,
                                    "q", split, p.pair.target_id)
                          .dump()
                   << "\n";
            scenes << scene_to_json(world.taxonomy, p.pair.scene_a, p.pair_id + "_a", p.pair_id,
                                    "a", split, p.pair.replacement_id)
                          .dump()
                   << "\n";
            for (const auto& ep : p.episodes) {
                if (!ep.retained) continue;
                DialogRecord rec = ep.record;
                rec.pair_id = p.pair_id;
                rec.scene_id = p.pair_id + (rec.orientation == "forward" ? "_q" : "_a");
                rec.split = split;
                dialogs << to_json(rec).dump() << "\n";
            }
        }
        std::ofstream manifest(manifest_path, std::ios::binary);
        manifest << bundle.manifest.to_json().dump(2) << "\n";
    } catch (...) {
        // Do not leave a half-written dataset behind.
        std::error_code ec;
        fs::remove(scenes_path, ec);
        fs::remove(dialogs_path, ec);
        fs::remove(manifest_path, ec);
        throw;
    }
    return bundle.manifest;
}

// --- loading -----------------------------------------------------------------

struct LoadedDataset {
    std::vector<SceneRecord> scenes;
    std::vector<DialogRecord> dialogs;
    json manifest;

    const SceneRecord& scene(const std::string& scene_id) const {
        for (const auto& s : scenes)
            if (s.scene_id == scene_id) return s;
        throw LookupError("dataset has no scene '" + scene_id + "'");
    }
};

inline LoadedDataset load_dataset(const std::string& dir) {
    LoadedDataset ds;
    std::ifstream manifest(dir + "/manifest.json");
    if (!manifest) throw ParseError("cannot open " + dir + "/manifest.json");
    manifest >> ds.manifest;
    std::ifstream scenes(dir + "/scenes.jsonl");
    if (!scenes) throw ParseError("cannot open " + dir + "/scenes.jsonl");
    std::string line;
    while (std::getline(scenes, line)) {
        if (line.empty()) continue;
        ds.scenes.push_back(scene_from_json(json::parse(line)));
    }
    std::ifstream dialogs(dir + "/dialogs.jsonl");
    if (!dialogs) throw ParseError("cannot open " + dir + "/dialogs.jsonl");
    while (std::getline(dialogs, line)) {
        if (line.empty()) continue;
        ds.dialogs.push_back(dialog_from_json(json::parse(line)));
    }
    return ds;
}

// --- statistics ---------------------------------------------------------------

struct StatsReport {
    int dialogs = 0;
    double mean_rounds = 0.0;
    int unique_questions = 0;
    int unique_answers = 0;
    double mean_question_tokens = 0.0;
    std::map<std::string, int> subtype_counts;
    double count_fraction = 0.0;
    double top6_answer_mass = 0.0;
    std::vector<std::pair<std::string, int>> top_answers;  // most frequent first

    json to_json() const {
        json j;
        j["dialogs"] = dialogs;
        j["mean_rounds"] = mean_rounds;
        j["unique_questions"] = unique_questions;
        j["unique_answers"] = unique_answers;
        j["mean_question_tokens"] = mean_question_tokens;
        j["subtype_counts"] = subtype_counts;
        j["count_fraction"] = count_fraction;
        j["top6_answer_mass"] = top6_answer_mass;
        json top = json::array();
        for (const auto& [text, n] : top_answers) top.push_back(json::array({text, n}));
        j["top_answers"] = top;
        return j;
    }
};

inline int token_count(const std::string& s) {
    std::istringstream in(s);
    int n = 0;
    std::string tok;
    while (in >> tok) ++n;
    return n;
}

inline StatsReport compute_stats(const std::vector<DialogRecord>& dialogs) {
    if (dialogs.empty()) throw Error("compute_stats: empty dataset");
    StatsReport r;
    r.dialogs = static_cast<int>(dialogs.size());
    std::map<std::string, int> questions, answers;
    long long total_rounds = 0, total_tokens = 0, total_questions = 0, count_questions = 0;
    for (const auto& d : dialogs) {
        total_rounds += static_cast<long long>(d.rounds.size());
        for (const auto& round : d.rounds) {
            ++questions[round.question_text];
            ++answers[round.answer_text];
            total_tokens += token_count(round.question_text);
            ++total_questions;
            ++r.subtype_counts[to_string(round.question.subtype)];
            if (is_count(round.question.subtype)) ++count_questions;
        }
    }
    r.mean_rounds = static_cast<double>(total_rounds) / r.dialogs;
    r.unique_questions = static_cast<int>(questions.size());
    r.unique_answers = static_cast<int>(answers.size());
    r.mean_question_tokens =
        total_questions == 0 ? 0.0 : static_cast<double>(total_tokens) / total_questions;
    r.count_fraction =
        total_questions == 0 ? 0.0 : static_cast<double>(count_questions) / total_questions;

    std::vector<std::pair<std::string, int>> sorted(answers.begin(), answers.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    long long top6 = 0, total_answers = 0;
    for (const auto& [text, n] : sorted) total_answers += n;
    for (std::size_t i = 0; i < sorted.size() && i < 6; ++i) {
        top6 += sorted[i].second;
        r.top_answers.push_back(sorted[i]);
    }
    r.top6_answer_mass =
        total_answers == 0 ? 0.0 : static_cast<double>(top6) / static_cast<double>(total_answers);
    return r;
}

}  // namespace spotdiff
