#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <vector>

#include "phaselab/analysis.hpp"
#include "phaselab/generators.hpp"

using namespace phaselab;

namespace {

std::vector<int> flip_some(std::vector<int> v, double rate, std::uint64_t seed) {
    CounterRng rng(seed);
    for (auto& x : v)
        if (rng.next_double() < rate) x = -x;
    return v;
}

EvalTraces synthetic_traces() {
    CounterRng rng(50);
    EvalTraces t;
    for (int i = 0; i < 300; ++i)
        t.labels.push_back(rng.next_double() < 0.5 ? 1 : -1);
    t.boundary_steps = {0, 10, 20};

    // three checkpoints of increasing accuracy, three staged prefixes
    for (int c = 0; c < 3; ++c) {
        EvalTraces::FTrace f;
        f.step = 10 * c;
        f.phase = c == 0 ? 0 : c - 1;
        f.preds = flip_some(t.labels, 0.4 - 0.15 * c, 100 + c);
        t.f.push_back(std::move(f));
    }
    for (int s = 1; s <= 3; ++s) {
        EvalTraces::GTrace g;
        g.stage = s;
        g.preds = flip_some(t.labels, 0.45 - 0.15 * s, 200 + s);
        t.g.push_back(std::move(g));
    }
    return t;
}

} // namespace

TEST_CASE("eval traces JSON round trip") {
    EvalTraces t = synthetic_traces();
    EvalTraces back = eval_traces_from_json(eval_traces_to_json(t));
    CHECK(back.labels == t.labels);
    CHECK(back.boundary_steps == t.boundary_steps);
    REQUIRE(back.f.size() == t.f.size());
    for (std::size_t i = 0; i < t.f.size(); ++i) {
        CHECK(back.f[i].step == t.f[i].step);
        CHECK(back.f[i].preds == t.f[i].preds);
        CHECK(back.f[i].scores == t.f[i].scores);
    }
    REQUIRE(back.g.size() == t.g.size());
    CHECK(back.g[0].preds == t.g[0].preds);
}

TEST_CASE("phase matrix zero cells for trace-equal and perfect conditioners") {
    EvalTraces t = synthetic_traces();
    t.f[1].preds = t.g[0].preds; // checkpoint equals the stage-1 prefix
    t.g[2].preds = t.labels;     // perfect stage

    AnalysisOptions opt;
    opt.trials = 100;
    opt.seed = 9;
    PhaseReport r = phase_matrix(t, opt);
    CHECK(r.cmi_f_given_g[1][0] == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t a = 0; a < t.f.size(); ++a)
        CHECK(r.cmi_f_given_g[a][2] == doctest::Approx(0.0).epsilon(1e-12));
    for (const auto& row : r.cmi_f_given_g)
        for (double v : row) CHECK(v >= 0.0);
    CHECK_FALSE(r.significance.empty());
}

TEST_CASE("checkpoint selection: exact zero wins, ties go earliest") {
    PhaseReport r;
    r.checkpoint_steps = {0, 10, 20};
    r.stages = {1, 2};
    r.cmi_f_given_g = {{0.5, 0.3}, {0.4, 0.0}, {0.3, 0.2}};
    r.cmi_g_given_f = {{0.2, 0.9}, {0.0, 0.8}, {0.1, 0.7}};
    select_phase_checkpoints(r, 1);
    REQUIRE(r.selected_steps.size() == 1);
    CHECK(r.selected_steps[0] == 10); // max(0.0, 0.0) at step 10
    CHECK(r.selection_feasible);

    // two equal minima -> earlier step
    r.cmi_f_given_g = {{0.1, 0.2}, {0.1, 0.2}, {0.3, 0.2}};
    r.cmi_g_given_f = {{0.1, 0.9}, {0.1, 0.8}, {0.4, 0.7}};
    select_phase_checkpoints(r, 1);
    CHECK(r.selected_steps[0] == 0);
}

TEST_CASE("selection past the covered stages reports a diagnostic") {
    PhaseReport r;
    r.checkpoint_steps = {0, 10};
    r.stages = {1, 2};
    r.cmi_f_given_g = {{0.1, 0.1}, {0.1, 0.1}};
    r.cmi_g_given_f = r.cmi_f_given_g;
    select_phase_checkpoints(r, 3);
    CHECK_FALSE(r.selection_feasible);
    CHECK_FALSE(r.selection_diagnostic.empty());
    CHECK(r.selected_steps.size() == 1);
    // strictly increasing where assigned
    for (std::size_t i = 1; i < r.selected_steps.size(); ++i)
        CHECK(r.selected_steps[i] > r.selected_steps[i - 1]);
}

TEST_CASE("sub-classifier correlation conventions") {
    std::vector<std::vector<double>> stump_preds = {
        {1, -1, 1, -1, 1, -1}, {1, 1, 1, -1, -1, -1}};
    std::vector<std::vector<double>> sub_scores = {
        {1, -1, 1, -1, 1, -1},       // identical to stump 0
        {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}}; // constant
    Matrix corr = subclassifier_corr(sub_scores, stump_preds);
    CHECK(corr[0][0] == doctest::Approx(1.0));
    CHECK(corr[1][0] == 0.0);
    CHECK(corr[1][1] == 0.0);
}

TEST_CASE("pearson basics") {
    std::vector<double> a = {1, 2, 3, 4};
    std::vector<double> up = {2, 4, 6, 8};
    std::vector<double> down = {4, 3, 2, 1};
    CHECK(pearson(a, up) == doctest::Approx(1.0));
    CHECK(pearson(a, down) == doctest::Approx(-1.0));
    std::vector<double> flat = {5, 5, 5, 5};
    CHECK(pearson(a, flat) == 0.0);
}

TEST_CASE("kendall tau against the step index") {
    CHECK(kendall_tau_vs_index({1, 2, 3, 4}) == doctest::Approx(1.0));
    CHECK(kendall_tau_vs_index({4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(kendall_tau_vs_index({1, 1, 1}) == 0.0);
}

TEST_CASE("correlation trajectories from scores: flat run and single spec") {
    std::vector<std::vector<double>> stump_preds = {
        {1, -1, 1, -1, 1, 1}, {1, 1, -1, -1, 1, -1}};
    std::vector<std::vector<double>> frozen = {
        {0.5, -0.3, 0.4, -0.2, 0.6, 0.1}, {0.2, 0.3, -0.4, -0.1, 0.2, -0.5}};
    std::vector<std::vector<std::vector<double>>> scores = {frozen, frozen,
                                                            frozen};
    auto traj = correlation_trajectories_from_scores({0, 10, 20}, scores,
                                                     stump_preds);
    CHECK(traj.pairwise_defined);
    for (std::size_t i = 1; i < traj.mean_matched_corr.size(); ++i) {
        CHECK(traj.mean_matched_corr[i] ==
              doctest::Approx(traj.mean_matched_corr[0]));
        CHECK(traj.mean_pairwise_corr[i] ==
              doctest::Approx(traj.mean_pairwise_corr[0]));
    }
    CHECK(traj.kendall_matched == 0.0);

    std::vector<std::vector<std::vector<double>>> solo = {
        {frozen[0]}, {frozen[0]}};
    auto single = correlation_trajectories_from_scores({0, 10}, solo,
                                                       stump_preds);
    CHECK_FALSE(single.pairwise_defined);
    CHECK(single.mean_pairwise_corr.empty());
}

TEST_CASE("error KL trajectories: identical traces give zero divergence") {
    std::vector<int> labels = {1, -1, 1, -1, 1, -1, -1, 1};
    std::vector<std::vector<double>> stump_preds = {
        {1, -1, 1, -1, 1, -1, 1, -1}, {1, 1, -1, -1, 1, 1, -1, -1}};
    // sub 0 reproduces stump 0 exactly; sub 1 is a copy of sub 0
    std::vector<std::vector<double>> subs = {stump_preds[0], stump_preds[0]};
    std::vector<std::vector<std::vector<double>>> scores = {subs, subs};

    auto traj = error_kl_trajectories_from_scores({0, 10}, scores, stump_preds,
                                                  labels, 1e-6);
    // the matched pair that landed on stump 0 has KL exactly 0
    bool found_zero = false;
    for (std::size_t p = 0; p < traj.matched_pairs.size(); ++p)
        if (traj.matched_pairs[p].second == 0) {
            found_zero = true;
            for (double v : traj.matched_kl_fh[p])
                CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
        }
    CHECK(found_zero);
    // identical sub-classifiers: pairwise KL is 0 throughout
    for (double v : traj.mean_pairwise_kl)
        CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("max single-step delta finds the jump and its step") {
    SeriesDelta d = max_single_step_delta({1.0, 1.1, 0.2, 0.3}, {0, 10, 20, 30});
    CHECK(d.max_abs_delta == doctest::Approx(0.9));
    CHECK(d.signed_delta == doctest::Approx(-0.9));
    CHECK(d.step == 20);
}

TEST_CASE("difficulty scores: centroid distance and duplicates") {
    CounterRng rng(60);
    MlpModel m = MlpModel::random_init(6, 3, rng);
    Dataset ds;
    ds.n = 6;
    ds.d = 3;
    ds.features = {1, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0};
    ds.labels = {1, 1, 1, -1, -1, -1};
    auto scores = difficulty_scores(m, ds, 2);
    REQUIRE(scores.size() == 6);
    // duplicate rows share identical scores
    CHECK(scores[0].centroid_distance == scores[1].centroid_distance);
    CHECK(scores[0].bin == scores[1].bin);
    CHECK(scores[3].centroid_distance == scores[4].centroid_distance);
    for (const auto& s : scores) {
        CHECK(s.centroid_distance >= 0.0);
        CHECK(s.bin >= 0);
        CHECK(s.bin < 2);
    }
}

TEST_CASE("difficulty bins partition the examples into quantiles") {
    CounterRng rng(61);
    MlpModel m = MlpModel::random_init(8, 4, rng);
    Dataset ds;
    ds.n = 40;
    ds.d = 4;
    ds.features.resize(160);
    for (auto& x : ds.features) x = rng.next_gaussian();
    ds.labels.resize(40);
    for (std::size_t i = 0; i < 40; ++i) ds.labels[i] = i % 2 == 0 ? 1 : -1;
    auto scores = difficulty_scores(m, ds, 4);
    std::vector<int> counts(4, 0);
    for (const auto& s : scores) ++counts[s.bin];
    for (int c : counts) CHECK(c == 10);
}

TEST_CASE("learning order: perfect model degenerates, equal traces agree") {
    EvalTraces t = synthetic_traces();
    std::vector<DifficultyScore> scores(t.labels.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        scores[i].bin = static_cast<int>(i % 4);

    EvalTraces perfect = t;
    for (auto& f : perfect.f) f.preds = perfect.labels;
    for (auto& g : perfect.g) g.preds = perfect.labels;
    auto curves = learning_order_curves(perfect, scores);
    CHECK(curves.degenerate);
    CHECK_FALSE(curves.note.empty());

    // identical F and G traces that master bins in a staggered order
    EvalTraces staged = t;
    staged.f.resize(3);
    staged.g.resize(3);
    for (int c = 0; c < 3; ++c) {
        std::vector<int> preds = staged.labels;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            int bin = scores[i].bin;
            if (bin > c) preds[i] = -preds[i]; // bin b mastered at index b
        }
        staged.f[c].preds = preds;
        staged.g[c].preds = preds;
    }
    auto agree = learning_order_curves(staged, scores);
    CHECK_FALSE(agree.degenerate);
    CHECK(agree.rank_agreement == doctest::Approx(1.0));
}

TEST_CASE("final error comparison of identical series has gap 0") {
    XorClusterConfig cfg;
    cfg.n = 80;
    cfg.d = 3;
    cfg.seed = 3;
    Dataset ds = gen_xor_clusters(cfg);
    CounterRng rng(4);
    MlpModel init = MlpModel::random_init(6, 3, rng);
    PhaseSchedule s;
    s.boundaries = {0, 20};
    s.learning_rate = 0.05;
    s.batch_size = 8;
    CheckpointSeries a = train(init, ds, &ds, s, nullptr, 5);
    FinalErrorComparison cmp = final_error_comparison(a, a, ds);
    CHECK(cmp.gap == 0.0);
    CHECK(cmp.constrained_error == cmp.vanilla_error);
}
