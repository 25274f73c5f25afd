#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"
#include "spotdiff/eval.hpp"

using namespace spotdiff;
using spotdiff::testing::SceneBuilder;
using spotdiff::testing::world;

namespace {

DialogRecord record_with(std::vector<QuestionAction> questions, bool success = true) {
    DialogRecord d;
    d.pair_id = "p0";
    d.orientation = "forward";
    for (auto& q : questions) {
        Round r;
        r.question = q;
        r.answer = AnswerAction::of_count(0);
        d.rounds.push_back(r);
    }
    d.guess.object_id = success ? "t" : "x";
    d.target_id = "t";
    d.success = success;
    return d;
}

QuestionAction count_q(PropertySet p, std::optional<int> hint = {}) {
    QuestionAction q;
    q.subtype = hint ? QuestionSubtype::CountHint : QuestionSubtype::CountNoHint;
    q.p_set = std::move(p);
    q.count_hint = hint;
    return q;
}

const std::string kEvalDir = []() {
    auto dir = std::filesystem::temp_directory_path() / "spotdiff_test_eval";
    std::filesystem::remove_all(dir);
    return dir.string();
}();

const LoadedDataset& dataset() {
    static LoadedDataset ds = []() {
        RunConfig cfg;
        cfg.pairs = 40;
        cfg.seed = 31;
        write_dataset(world(), generate_dataset(world(), cfg), kEvalDir);
        return load_dataset(kEvalDir);
    }();
    return ds;
}

}  // namespace

TEST_CASE("task success is the fraction of correct guesses") {
    std::vector<DialogRecord> records = {record_with({}, true), record_with({}, true),
                                         record_with({}, false), record_with({}, true)};
    CHECK(task_success(records) == doctest::Approx(0.75));
    CHECK(task_success({records[0]}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(task_success({}), Error);
}

TEST_CASE("Cate-Q extraction needs two kinds of matching objects") {
    const auto& w = world();
    SceneBuilder b;
    b.add("vase1", "vase", "white", "ceramic", 1, 1);
    b.add("nightstand1", "nightstand", "white", "wooden", 2, 1);
    b.add("apple1", "apple", "red", "plastic", 3, 1);
    b.add("apple2", "apple", "green", "plastic", 4, 1);
    b.add("plate1", "decorative plate", "white", "ceramic", 5, 1);

    DialogRecord d = record_with({
        count_q(PropertySet::of_color("white")),          // vase + nightstand + plate
        count_q(PropertySet::of_category("apple")),       // one kind only
        count_q(PropertySet::of_category("decoration"), 2),  // plate + vase, with hint
    });
    auto cqs = extract_cateq(w.taxonomy, d, b.scene);
    REQUIRE(cqs.size() == 2);
    CHECK(cqs[0].pset == PropertySet::of_color("white"));
    CHECK_FALSE(cqs[0].hint.has_value());
    CHECK(cqs[1].pset == PropertySet::of_category("decoration"));
    CHECK(cqs[1].hint == 2);

    // monotone: adding an object never removes a Cate-Q
    SceneBuilder larger = b;
    larger.add("banana1", "banana", "yellow", "plastic", 6, 1);
    auto more = extract_cateq(w.taxonomy, d, larger.scene);
    CHECK(more.size() >= cqs.size());
}

TEST_CASE("Cate-Q accuracy compares hints to the questioner scene") {
    const auto& w = world();
    SceneBuilder b;
    b.add("vase1", "vase", "white", "ceramic", 1, 1);
    b.add("plate1", "decorative plate", "white", "ceramic", 2, 1);
    b.add("frame1", "frame", "black", "wooden", 3, 1);

    DialogRecord all_right = record_with({count_q(PropertySet::of_category("decoration"), 3),
                                          count_q(PropertySet::of_color("white"), 2)});
    CHECK(cateq_accuracy(w.taxonomy, all_right, b.scene) == doctest::Approx(1.0));

    DialogRecord half = record_with({count_q(PropertySet::of_category("decoration"), 3),
                                     count_q(PropertySet::of_color("white"), 1)});
    CHECK(cateq_accuracy(w.taxonomy, half, b.scene) == doctest::Approx(0.5));

    DialogRecord no_hints = record_with({count_q(PropertySet::of_color("white"))});
    CHECK_FALSE(cateq_accuracy(w.taxonomy, no_hints, b.scene).has_value());
}

TEST_CASE("Cate-Q recall is intersection over the reference set") {
    const auto& w = world();
    SceneBuilder b;
    b.add("vase1", "vase", "white", "ceramic", 1, 1);
    b.add("plate1", "decorative plate", "white", "ceramic", 2, 1);
    b.add("nightstand1", "nightstand", "white", "wooden", 3, 1);
    b.add("chair1", "chair", "brown", "wooden", 4, 1);

    DialogRecord mine = record_with({count_q(PropertySet::of_color("white")),
                                     count_q(PropertySet::of_category("decoration"))});
    DialogRecord ref = record_with({count_q(PropertySet::of_category("decoration")),
                                    count_q(PropertySet::of_category("furniture"))});
    CHECK(cateq_recall(w.taxonomy, mine, ref, b.scene) == doctest::Approx(0.5));
    CHECK(cateq_recall(w.taxonomy, mine, mine, b.scene) == doctest::Approx(1.0));

    DialogRecord disjoint = record_with({count_q(PropertySet::of({}, "wooden", {}))});
    CHECK(cateq_recall(w.taxonomy, disjoint, ref, b.scene) == doctest::Approx(0.0));

    DialogRecord empty_ref = record_with({count_q(PropertySet::of_category("apple"))});
    CHECK_FALSE(cateq_recall(w.taxonomy, mine, empty_ref, b.scene).has_value());
}

TEST_CASE("transition classification: refinement deepens, everything else converts") {
    const auto& w = world();
    auto t = [&](PropertySet a, PropertySet b) {
        return classify_transition(w.taxonomy, count_q(a), count_q(b));
    };
    CHECK(t(PropertySet::of_category("furniture"),
            PropertySet::of("brown", "wooden", "furniture")) == Transition::Deepening);
    CHECK(t(PropertySet::of_color("black"), PropertySet::of("black", {}, "decoration")) ==
          Transition::Deepening);
    CHECK(t(PropertySet::of_color("white"), PropertySet::of_category("furniture")) ==
          Transition::Converting);
    CHECK(t(PropertySet::of_category("furniture"), PropertySet::of_category("toy")) ==
          Transition::Converting);
    // repeats convert by the strictness clause
    CHECK(t(PropertySet::of_color("white"), PropertySet::of_color("white")) ==
          Transition::Converting);
    // asymmetry
    CHECK(t(PropertySet::of("brown", "wooden", "furniture"),
            PropertySet::of_category("furniture")) == Transition::Converting);

    // refer inherits the antecedent's set
    QuestionAction refer;
    refer.subtype = QuestionSubtype::RefThem;
    refer.p_set = PropertySet::of_category("furniture");
    CHECK(classify_transition(w.taxonomy, count_q(PropertySet::of_category("furniture")), refer) ==
          Transition::Converting);
    QuestionAction extreme;
    extreme.subtype = QuestionSubtype::ExtremePic;
    extreme.direction = Direction::Left;
    CHECK_FALSE(classify_transition(w.taxonomy, count_q(PropertySet::of_color("white")), extreme)
                    .has_value());
}

TEST_CASE("oracle agents score perfectly on retained data") {
    const auto& w = world();
    const LoadedDataset& ds = dataset();
    REQUIRE(ds.dialogs.size() > 20);
    CHECK(task_success(ds.dialogs) == doctest::Approx(1.0));

    Rng rng(5);
    AnswerAgent oracle;
    auto [accuracy, totals] = answer_accuracy_by_subtype(w, ds, oracle, rng);
    for (const auto& [subtype, acc] : accuracy) CHECK(acc == doctest::Approx(1.0));
    CHECK(totals.at("count-nohint") > 0);
}

TEST_CASE("noisy answer agents degrade per-subtype accuracy by epsilon") {
    const auto& w = world();
    const LoadedDataset& ds = dataset();
    Rng rng(6);
    AnswerAgent noisy;
    noisy.epsilon = 0.25;
    auto [accuracy, totals] = answer_accuracy_by_subtype(w, ds, noisy, rng);
    long long n = 0;
    double weighted = 0;
    for (const auto& [subtype, acc] : accuracy) {
        weighted += acc * totals.at(subtype);
        n += totals.at(subtype);
    }
    CHECK(weighted / static_cast<double>(n) == doctest::Approx(0.75).epsilon(0.03));
}

TEST_CASE("full metric report aggregates consistently") {
    const auto& w = world();
    const LoadedDataset& ds = dataset();
    Rng rng(7);
    AnswerAgent oracle;
    MetricsReport report = evaluate_records(w, ds, oracle, rng);
    CHECK(report.success_rate == doctest::Approx(1.0));
    // bucketed success rates aggregate back to the overall rate
    double weighted = 0;
    int n = 0;
    for (int b = 0; b < 4; ++b) {
        weighted += report.cateq_accuracy_bucket_success[static_cast<std::size_t>(b)] *
                    report.cateq_accuracy_bucket_sizes[static_cast<std::size_t>(b)];
        n += report.cateq_accuracy_bucket_sizes[static_cast<std::size_t>(b)];
    }
    if (n > 0) CHECK(weighted / n == doctest::Approx(1.0));
    // oracle hints are always right: every bucketed dialog lands in the top bucket
    CHECK(report.cateq_accuracy_bucket_sizes[0] == 0);
    CHECK(report.cateq_accuracy_bucket_sizes[1] == 0);
    CHECK(report.cateq_accuracy_bucket_sizes[2] == 0);
    CHECK(report.per_subtype_accuracy.at("count-nohint") == doctest::Approx(1.0));
}

TEST_CASE("noisy replay succeeds strictly less often than the oracle record set") {
    const auto& w = world();
    const LoadedDataset& ds = dataset();
    RunConfig cfg;
    AnswerAgent noisy;
    noisy.epsilon = 0.3;
    const RerunReport rr = rerun_report(w, ds, cfg, noisy, 17);
    MESSAGE("noisy rerun success ", rr.success_rate);
    CHECK(rr.episodes == 80);
    CHECK(rr.success_rate < 1.0);
    CHECK(rr.success_rate > 0.0);
    int bucketed = 0;
    for (int n : rr.recall_bucket_sizes) bucketed += n;
    CHECK(bucketed > 0);

    AnswerAgent oracle;
    const double oracle_succ = rerun_success(w, ds, cfg, oracle, 17);
    CHECK(oracle_succ > rr.success_rate);
}
