// spotdiff: paired-scene dialog dataset generator, statistics, evaluation,
// constraint validation and an interactive play mode.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spotdiff/eval.hpp"
#include "spotdiff/pipeline.hpp"
#include "spotdiff/world.hpp"

using namespace spotdiff;

namespace {

struct CommonOpts {
    std::string data_dir = default_data_dir();
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<double> epsilon;
};

RunConfig resolve_config(const CommonOpts& opts) {
    RunConfig cfg;
    if (!opts.config_path.empty()) cfg = RunConfig::load(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.workers) cfg.workers = *opts.workers;
    if (opts.epsilon) cfg.epsilon = *opts.epsilon;
    cfg.validate();
    return cfg;
}

void print_manifest_summary(const Manifest& m) {
    std::printf("pairs:            %d\n", m.pairs_generated);
    std::printf("episodes run:     %d\n", m.episodes_run);
    std::printf("dialogs retained: %d\n", m.dialogs_retained);
    std::printf("discard rate:     %.3f\n", m.discard_rate);
    std::printf("config hash:      %s\n", m.config_hash.c_str());
    for (const auto& [split, n] : m.split_pairs)
        std::printf("split %-6s %5d pairs, %d dialogs\n", split.c_str(), n,
                    m.split_dialogs.count(split) ? m.split_dialogs.at(split) : 0);
}

void print_stats(const StatsReport& s) {
    std::printf("dialogs:              %d\n", s.dialogs);
    std::printf("mean rounds:          %.2f\n", s.mean_rounds);
    std::printf("unique questions:     %d\n", s.unique_questions);
    std::printf("unique answers:       %d\n", s.unique_answers);
    std::printf("mean question tokens: %.2f\n", s.mean_question_tokens);
    std::printf("count-type fraction:  %.3f\n", s.count_fraction);
    std::printf("top-6 answer mass:    %.3f\n", s.top6_answer_mass);
    std::printf("question subtypes:\n");
    for (const auto& [subtype, n] : s.subtype_counts) std::printf("  %-15s %d\n", subtype.c_str(), n);
    std::printf("most frequent answers:\n");
    for (const auto& [text, n] : s.top_answers) std::printf("  %5d  %s\n", n, text.c_str());
}

void print_metrics(const MetricsReport& r) {
    std::printf("SUCC: %.4f\n", r.success_rate);
    std::printf("per-subtype answer accuracy:\n");
    for (const auto& [subtype, acc] : r.per_subtype_accuracy)
        std::printf("  %-15s %.4f  (n=%d)\n", subtype.c_str(), acc, r.per_subtype_total.at(subtype));
    std::printf("Cate-Q accuracy buckets (success rate / dialogs):\n");
    for (int b = 0; b < 4; ++b)
        std::printf("  [%.2f,%.2f%s  %.3f / %d\n", r.bucket_edges[b], r.bucket_edges[b + 1],
                    b == 3 ? "]" : ")", r.cateq_accuracy_bucket_success[b],
                    r.cateq_accuracy_bucket_sizes[b]);
    std::printf("Cate-Q recall buckets (success rate / dialogs):\n");
    for (int b = 0; b < 4; ++b)
        std::printf("  [%.2f,%.2f%s  %.3f / %d\n", r.bucket_edges[b], r.bucket_edges[b + 1],
                    b == 3 ? "]" : ")", r.cateq_recall_bucket_success[b],
                    r.cateq_recall_bucket_sizes[b]);
    std::printf("action transitions (success rate / dialogs):\n");
    std::printf("  deepening   %.4f / %d\n", r.deepening_success, r.deepening_dialogs);
    std::printf("  converting  %.4f / %d\n", r.converting_success, r.converting_dialogs);
}

int cmd_generate(const CommonOpts& opts, std::optional<int> pairs_flag,
                 const std::string& out_dir) {
    RunConfig cfg = resolve_config(opts);
    if (pairs_flag) cfg.pairs = *pairs_flag;
    cfg.validate();
    World world = load_world(opts.data_dir);
    DatasetBundle bundle = generate_dataset(world, cfg);
    Manifest manifest = write_dataset(world, bundle, out_dir);
    std::printf("wrote %s/{scenes.jsonl,dialogs.jsonl,manifest.json}\n", out_dir.c_str());
    print_manifest_summary(manifest);
    return 0;
}

int cmd_stats(const CommonOpts& opts, const std::string& dataset_dir, bool as_json) {
    World world = load_world(opts.data_dir);
    LoadedDataset ds = load_dataset(dataset_dir);
    StatsReport report = compute_stats(ds.dialogs);
    if (as_json)
        std::cout << report.to_json().dump(2) << "\n";
    else
        print_stats(report);
    return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& dataset_dir, double hint_noise,
             bool rerun, bool as_json) {
    RunConfig cfg = resolve_config(opts);
    World world = load_world(opts.data_dir);
    LoadedDataset ds = load_dataset(dataset_dir);
    AnswerAgent agent;
    agent.epsilon = cfg.epsilon;
    Rng rng(cfg.seed);

    if (hint_noise > 0.0) {
        // Perturb disclosed count hints to probe the accuracy/success relation.
        Rng hrng = rng.fork(0x417);
        for (auto& d : ds.dialogs)
            for (auto& round : d.rounds)
                if (round.question.count_hint && hrng.coin(hint_noise))
                    round.question.count_hint =
                        std::max(0, *round.question.count_hint + (hrng.coin(0.5) ? 1 : -1));
    }

    MetricsReport report = evaluate_records(world, ds, agent, rng);
    if (as_json) {
        json j = report.to_json();
        if (rerun || agent.epsilon > 0.0)
            j["rerun"] = rerun_report(world, ds, cfg, agent, cfg.seed + 1).to_json();
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    print_metrics(report);
    if (rerun || agent.epsilon > 0.0) {
        const RerunReport rr = rerun_report(world, ds, cfg, agent, cfg.seed + 1);
        std::printf("self-play rerun with this agent (%d episodes): SUCC %.4f\n", rr.episodes,
                    rr.success_rate);
        std::printf("rerun Cate-Q recall vs reference dialogs (success rate / dialogs):\n");
        for (int b = 0; b < 4; ++b)
            std::printf("  [%.2f,%.2f%s  %.3f / %d\n", report.bucket_edges[b],
                        report.bucket_edges[b + 1], b == 3 ? "]" : ")",
                        rr.recall_bucket_success[b], rr.recall_bucket_sizes[b]);
    }
    return 0;
}

int cmd_validate(const CommonOpts& opts, const std::string& dataset_dir, int fresh_pairs) {
    RunConfig cfg = resolve_config(opts);
    World world = load_world(opts.data_dir);
    long long violations = 0;
    if (!dataset_dir.empty()) {
        LoadedDataset ds = load_dataset(dataset_dir);
        std::map<std::string, const SceneRecord*> by_id;
        for (const auto& s : ds.scenes) by_id[s.scene_id] = &s;
        int pairs = 0;
        for (const auto& s : ds.scenes) {
            if (s.role != "q") continue;
            const SceneRecord* partner = by_id.count(s.pair_id + "_a") ? by_id.at(s.pair_id + "_a")
                                                                       : nullptr;
            if (!partner) {
                std::printf("%s: missing partner scene\n", s.pair_id.c_str());
                ++violations;
                continue;
            }
            ScenePair pair;
            pair.scene_q = s.scene;
            pair.scene_a = partner->scene;
            pair.target_id = s.diff_object_id;
            pair.replacement_id = partner->diff_object_id;
            for (const auto& v : validate_pair(world.taxonomy, world.placement, cfg.scene, pair)) {
                std::printf("%s: %s\n", s.pair_id.c_str(), v.c_str());
                ++violations;
            }
            ++pairs;
        }
        for (const auto& d : ds.dialogs) {
            if (static_cast<int>(d.rounds.size()) > cfg.strategy.max_rounds) {
                std::printf("%s: dialog exceeds round limit\n", d.pair_id.c_str());
                ++violations;
            }
            if (d.success != (d.guess.object_id == d.target_id)) {
                std::printf("%s: success flag inconsistent\n", d.pair_id.c_str());
                ++violations;
            }
        }
        std::printf("validated %d pairs, %zu dialogs: %lld violations\n", pairs,
                    ds.dialogs.size(), violations);
    } else {
        Rng root(cfg.seed);
        for (int i = 0; i < fresh_pairs; ++i) {
            Rng rng = root.fork(static_cast<std::uint64_t>(i));
            try {
                SceneGraph scene =
                    generate_scene(world.taxonomy, world.catalog, world.placement, cfg.scene, rng);
                ScenePair pair = inject_difference(world.taxonomy, world.catalog, world.placement,
                                                   scene, cfg.scene, rng);
                for (const auto& v :
                     validate_pair(world.taxonomy, world.placement, cfg.scene, pair)) {
                    std::printf("pair %d: %s\n", i, v.c_str());
                    ++violations;
                }
            } catch (const GenerationError& e) {
                std::printf("pair %d: %s\n", i, e.what());
                ++violations;
            }
        }
        std::printf("validated %d fresh pairs: %lld violations\n", fresh_pairs, violations);
        std::printf("data: %zu assets, %zu categories, %zu templates, %zu phrases\n",
                    world.catalog.size(), world.taxonomy.size(), world.templates.total_count(),
                    world.phrases.catalog_size(world.catalog));
    }
    return violations == 0 ? 0 : 1;
}

// Interactive mode: the human is the questioner. Menus enumerate the
// subtypes the strategy would allow and the slot assignments it considers
// informative; the oracle answers from the hidden scene.
int cmd_play(const CommonOpts& opts, bool debug) {
    RunConfig cfg = resolve_config(opts);
    World world = load_world(opts.data_dir);
    Rng root(cfg.seed);
    ScenePair pair;
    bool built = false;
    for (int attempt = 0; attempt < 32 && !built; ++attempt) {
        Rng rng = root.fork(static_cast<std::uint64_t>(attempt));
        try {
            SceneGraph scene =
                generate_scene(world.taxonomy, world.catalog, world.placement, cfg.scene, rng);
            pair = inject_difference(world.taxonomy, world.catalog, world.placement, scene,
                                     cfg.scene, rng);
            built = true;
        } catch (const GenerationError&) {
        }
    }
    if (!built) {
        std::fprintf(stderr, "could not generate a scene pair from this seed\n");
        return 1;
    }

    const SceneGraph& scene_q = pair.scene_q;
    const SceneGraph& scene_a = pair.scene_a;
    std::printf("You are the questioner. One object of your scene was replaced on the other side.\n");
    std::printf("Your scene (%zu objects):\n", scene_q.objects.size());
    for (const auto& o : scene_q.objects)
        std::printf("  %-16s %-9s %-8s %-18s on %s\n", o.id.c_str(), o.color.c_str(),
                    o.material.c_str(), o.category.c_str(), o.parent_id.c_str());

    TrackerState tracker = init_tracker(world.taxonomy, scene_q);
    std::vector<HistoryEntry> history;
    Rng rng = root.fork(0xF1A7);

    auto read_int = [](int lo, int hi) -> std::optional<int> {
        std::string line;
        while (std::getline(std::cin, line)) {
            try {
                const int v = std::stoi(line);
                if (v >= lo && v <= hi) return v;
            } catch (...) {
            }
            std::printf("enter a number between %d and %d\n", lo, hi);
        }
        return std::nullopt;  // EOF
    };

    auto show_debug = [&]() {
        if (!debug) return;
        std::printf("-- tracker --\n");
        for (std::size_t i = 0; i < tracker.graphs.size(); ++i) {
            const auto& g = tracker.graphs[i];
            const char* presence = tracker.presence[i] == Presence::Unknown
                                       ? "unknown"
                                       : (tracker.presence[i] == Presence::Verified ? "verified"
                                                                                    : "REFUTED");
            std::printf("  %-16s %2d/%2zu confirmed, %s%s\n", g.object_id.c_str(),
                        g.confirmed_count(), g.nodes.size(), presence,
                        tracker.in_candidates(static_cast<int>(i)) ? ", candidate" : "");
        }
    };

    auto finish = [&](const std::string& guess) {
        const bool win = guess == pair.target_id;
        std::printf("you guessed %s; the different object was %s\n", guess.c_str(),
                    pair.target_id.c_str());
        std::printf(win ? "=== success ===\n" : "=== not this time ===\n");
        return 0;
    };

    for (int round = 1;; ++round) {
        if (static_cast<int>(history.size()) >= cfg.strategy.max_rounds) {
            std::printf("round limit reached; you must guess now.\n");
        } else {
            show_debug();
            auto allowed = allowed_types(tracker, history, cfg.strategy);
            std::printf("round %d  (candidates: %d)\n", round, tracker.candidate_count());
            std::printf("  0) make a guess\n");
            for (std::size_t i = 0; i < allowed.size(); ++i)
                std::printf("  %zu) %s\n", i + 1, to_string(allowed[i]));
            std::printf("choose a question type: ");
            auto pick = read_int(0, static_cast<int>(allowed.size()));
            if (!pick) return 1;
            if (*pick != 0) {
                const QuestionSubtype subtype = allowed[static_cast<std::size_t>(*pick - 1)];
                std::vector<QuestionAction> options;
                if (is_count(subtype)) {
                    auto slots = select_count_slots(tracker, asked_keys(history));
                    if (slots) {
                        QuestionAction q;
                        q.subtype = subtype;
                        q.p_set = slots->first;
                        if (subtype == QuestionSubtype::CountHint) q.count_hint = slots->second;
                        options.push_back(q);
                    }
                } else {
                    options = enumerate_question_options(tracker, subtype, history,
                                                         asked_keys(history));
                }
                if (options.empty()) {
                    std::printf("nothing informative to ask with that type; pick another.\n");
                    --round;
                    continue;
                }
                std::printf("  0) back\n");
                for (std::size_t i = 0; i < options.size() && i < 30; ++i) {
                    Rng preview = rng;  // do not consume the stream on preview
                    std::printf("  %zu) %s\n", i + 1,
                                realize_question(world.templates, world.phrases, options[i],
                                                 preview)
                                    .text.c_str());
                }
                auto slot = read_int(0, static_cast<int>(std::min<std::size_t>(options.size(), 30)));
                if (!slot) return 1;
                if (*slot == 0) {
                    --round;
                    continue;
                }
                const QuestionAction q = options[static_cast<std::size_t>(*slot - 1)];
                RealizedQuestion rq = realize_question(world.templates, world.phrases, q, rng);
                const QuestionAction* prev = history.empty() ? nullptr : &history.back().question;
                AnswerAction a = oracle_answer(world.taxonomy, scene_a, q, prev);
                std::printf("Q: %s\n", rq.text.c_str());
                std::printf("A: %s\n",
                            realize_answer(world.templates, world.phrases, a, rq, rng).c_str());
                apply_answer(tracker, q, a);
                history.push_back(HistoryEntry{q, a});
                if (auto resolved = resolved_target(tracker))
                    std::printf("(the tracker points at %s)\n", resolved->c_str());
                continue;
            }
        }
        // guess menu
        std::printf("your guess:\n");
        for (std::size_t i = 0; i < scene_q.objects.size(); ++i)
            std::printf("  %zu) %s\n", i + 1, scene_q.objects[i].id.c_str());
        std::printf("choose an object: ");
        auto pick = read_int(1, static_cast<int>(scene_q.objects.size()));
        if (!pick) return 1;
        return finish(scene_q.objects[static_cast<std::size_t>(*pick - 1)].id);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spot-the-difference scene-pair and dialog dataset tool"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts opts;
    app.add_option("--data", opts.data_dir, "Data directory (taxonomy, catalog, ...)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "JSON config file");
        sub->add_option("--seed", opts.seed, "Master seed");
        sub->add_option("--workers", opts.workers, "Worker threads");
        sub->add_option("--epsilon", opts.epsilon, "Answerer noise rate");
    };

    // generate
    auto* generate = app.add_subcommand("generate", "Generate a dataset");
    std::optional<int> pairs_flag;
    std::string out_dir = "out";
    add_common(generate);
    generate->add_option("--pairs", pairs_flag, "Number of scene pairs");
    generate->add_option("--out", out_dir, "Output directory");

    // stats
    auto* stats = app.add_subcommand("stats", "Report dataset statistics");
    std::string dataset_dir;
    bool as_json = false;
    stats->add_option("--dataset", dataset_dir, "Dataset directory")->required();
    stats->add_flag("--json", as_json, "Emit JSON");

    // eval
    auto* eval = app.add_subcommand("eval", "Run the metric suite");
    double hint_noise = 0.0;
    bool rerun = false;
    add_common(eval);
    eval->add_option("--dataset", dataset_dir, "Dataset directory")->required();
    eval->add_option("--hint-noise", hint_noise, "Perturbation rate for disclosed count hints");
    eval->add_flag("--rerun", rerun, "Replay self-play with the configured agent");
    eval->add_flag("--json", as_json, "Emit JSON");

    // validate
    auto* validate = app.add_subcommand("validate", "Check scene and dataset constraints");
    int fresh_pairs = 100;
    add_common(validate);
    validate->add_option("--dataset", dataset_dir, "Dataset directory (omit to check fresh pairs)");
    validate->add_option("--pairs", fresh_pairs, "Fresh pairs to generate and check");

    // play
    auto* play = app.add_subcommand("play", "Interactive game against the oracle answerer");
    bool debug = false;
    add_common(play);
    play->add_flag("--debug", debug, "Show the tracker state each round");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(opts, pairs_flag, out_dir);
        if (stats->parsed()) return cmd_stats(opts, dataset_dir, as_json);
        if (eval->parsed()) return cmd_eval(opts, dataset_dir, hint_noise, rerun, as_json);
        if (validate->parsed()) return cmd_validate(opts, dataset_dir, fresh_pairs);
        if (play->parsed()) return cmd_play(opts, debug);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
