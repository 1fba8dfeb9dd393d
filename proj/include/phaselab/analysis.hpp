#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "phaselab/adaboost.hpp"
#include "phaselab/assignment.hpp"
#include "phaselab/info.hpp"
#include "phaselab/train.hpp"

namespace phaselab {

// Discrete traces of every checkpoint and staged ensemble over a shared
// evaluation set. Reports are pure functions of these, so persisting them is
// enough to regenerate any report.
struct EvalTraces {
    std::vector<int> labels;
    struct FTrace {
        std::int64_t step = 0;
        int phase = 0;
        std::vector<int> preds;
        std::vector<double> scores; // raw margins
    };
    struct GTrace {
        int stage = 0; // 1-based prefix length
        std::vector<int> preds;
    };
    std::vector<FTrace> f;
    std::vector<GTrace> g;
    std::vector<std::int64_t> boundary_steps;
};

EvalTraces make_eval_traces(const CheckpointSeries& series,
                            const BoostEnsemble& ensemble,
                            const Dataset& eval_set,
                            const std::vector<std::int64_t>& boundary_steps);

nlohmann::json eval_traces_to_json(const EvalTraces& t);
EvalTraces eval_traces_from_json(const nlohmann::json& j);

struct SignificanceEntry {
    std::string kind; // "boundary" or "selected"
    int phase = 0;    // i of the (i, i+1) pair
    std::int64_t f_step = 0;
    int g_stage = 0;
    CmiSignificance sig;
};

struct PhaseReport {
    std::vector<std::int64_t> checkpoint_steps;
    std::vector<int> stages;
    Matrix cmi_f_given_g; // [a][b] = I(F_a ; Y | G_b)
    Matrix cmi_g_given_f; // [a][b] = I(G_b ; Y | F_a)
    std::vector<SignificanceEntry> significance;
    std::vector<std::int64_t> selected_steps;
    bool selection_feasible = true;
    std::string selection_diagnostic;
    nlohmann::json metadata;
};

struct AnalysisOptions {
    int trials = 200;
    std::uint64_t seed = 0;
    int threads = 1;
    double cmi_threshold = 0.05; // reported, never asserted
    double epsilon = 1e-6;       // error-distribution smoothing
    int bins = 4;
};

// Fills both CMI matrices over the full checkpoint x stage grid and attaches
// significance for each diagonal phase pair at its boundary checkpoint.
PhaseReport phase_matrix(const EvalTraces& traces, const AnalysisOptions& opt);

// T_i = argmin over checkpoint steps of max(I(F;Y|G_{i+1}), I(G_i;Y|F))
// subject to T_i > T_{i-1}; ties to the earliest step. Infeasible rungs leave
// a partial assignment plus a diagnostic.
void select_phase_checkpoints(PhaseReport& report, int phases);

// Significance records for the selected (T_i, G_{i+1}) pairs.
void attach_selected_significance(PhaseReport& report, const EvalTraces& traces,
                                  const AnalysisOptions& opt);

nlohmann::json phase_report_to_json(const PhaseReport& r);
void write_matrix_csv(const Matrix& m, const std::vector<std::int64_t>& row_keys,
                      const std::vector<int>& col_keys, const std::string& path);

enum class SubclassifierMode { Neuron, Subnetwork };

// Per-sub-classifier score sequences over the eval set: hidden activations in
// neuron mode, f^J outputs in subnetwork mode.
std::vector<std::vector<double>> subclassifier_scores(
    const MlpModel& m, const Dataset& eval_set, SubclassifierMode mode,
    const std::vector<SubnetworkSpec>& specs);

// +-1 stump predictions over the eval set, one row per round
std::vector<std::vector<double>> stump_prediction_rows(
    const BoostEnsemble& ensemble, const Dataset& eval_set);

// Pearson correlation of each sub-classifier sequence against each stump's
// +-1 predictions; zero-variance sequences correlate 0 by convention.
Matrix subclassifier_corr(const std::vector<std::vector<double>>& sub_scores,
                          const BoostEnsemble& ensemble, const Dataset& eval_set);
Matrix subclassifier_corr(const std::vector<std::vector<double>>& sub_scores,
                          const std::vector<std::vector<double>>& stump_preds);

double pearson(const std::vector<double>& a, const std::vector<double>& b);
double kendall_tau_vs_index(const std::vector<double>& series);

// Exact assignment maximizing total correlation (see max_assignment).
Assignment match_subclassifiers(const Matrix& corr);

struct CorrelationTrajectories {
    std::vector<std::int64_t> steps;
    std::vector<std::pair<int, int>> matched_pairs; // (sub idx, stump idx)
    std::vector<double> mean_matched_corr;          // per checkpoint
    std::vector<double> mean_pairwise_corr;         // per checkpoint
    bool pairwise_defined = false;
    double kendall_matched = 0.0;
    double kendall_pairwise = 0.0;
};

// Matching fixed from the final checkpoint unless rematch_each is set.
CorrelationTrajectories correlation_trajectories(
    const CheckpointSeries& series, const BoostEnsemble& ensemble,
    const Dataset& eval_set, SubclassifierMode mode,
    const std::vector<SubnetworkSpec>& specs, bool rematch_each = false);

// Same computation from pre-evaluated scores ([checkpoint][sub][example]);
// this is what report regeneration runs against persisted traces.
CorrelationTrajectories correlation_trajectories_from_scores(
    const std::vector<std::int64_t>& steps,
    const std::vector<std::vector<std::vector<double>>>& sub_scores,
    const std::vector<std::vector<double>>& stump_preds,
    bool rematch_each = false);

struct SeriesDelta {
    double max_abs_delta = 0.0;
    double signed_delta = 0.0;
    std::int64_t step = 0; // step at which the largest single-step jump lands
};
SeriesDelta max_single_step_delta(const std::vector<double>& series,
                                  const std::vector<std::int64_t>& steps);

struct ErrorKlTrajectories {
    std::vector<std::int64_t> steps;
    std::vector<std::pair<int, int>> matched_pairs;
    // [pair][checkpoint]
    std::vector<std::vector<double>> matched_kl_fh;
    std::vector<std::vector<double>> matched_kl_hf;
    std::vector<std::vector<double>> matched_js;
    std::vector<double> mean_matched_kl_fh; // per checkpoint
    std::vector<double> mean_pairwise_kl;   // per checkpoint
    bool pairwise_defined = false;
    SeriesDelta matched_change;
    SeriesDelta pairwise_change;
};

// Scores on both sides are squashed (tanh of the standardized score) before
// |score - y| so errors(f_j) and errors(h_j) live on the same scale and a
// sub-classifier reproducing its stump's trace gives exactly KL 0.
ErrorKlTrajectories error_kl_trajectories(const CheckpointSeries& series,
                                          const BoostEnsemble& ensemble,
                                          const Dataset& eval_set,
                                          SubclassifierMode mode,
                                          const std::vector<SubnetworkSpec>& specs,
                                          double eps);

ErrorKlTrajectories error_kl_trajectories_from_scores(
    const std::vector<std::int64_t>& steps,
    const std::vector<std::vector<std::vector<double>>>& sub_scores,
    const std::vector<std::vector<double>>& stump_preds,
    const std::vector<int>& labels, double eps);

struct DifficultyScore {
    int class_label = 0; // +1 or -1
    int class_rank = 0;  // 0 = easiest class
    double centroid_distance = 0.0;
    int bin = 0;
};

// Difficulty = (rank of the example's class, distance of its embedding from
// its class centroid); examples are binned into `bins` quantiles ordered
// lexicographically by that pair. Class rank defaults to the per-class error
// of the given (final) model.
std::vector<DifficultyScore> difficulty_scores(
    const MlpModel& final_model, const Dataset& ds, int bins = 4,
    const std::vector<int>* class_order = nullptr);

struct LearningOrderCurves {
    std::vector<std::vector<double>> f_bin_acc; // [checkpoint][bin]
    std::vector<std::vector<double>> g_bin_acc; // [stage][bin]
    std::vector<double> f_mastery; // first index with bin acc >= threshold, +inf if never
    std::vector<double> g_mastery;
    double rank_agreement = 0.0; // Spearman over bins mastered by both
    bool degenerate = false;
    std::string note;
};

LearningOrderCurves learning_order_curves(const EvalTraces& traces,
                                          const std::vector<DifficultyScore>& scores,
                                          double mastery_threshold = 0.9);

struct FinalErrorComparison {
    double constrained_error = 0.0;
    double vanilla_error = 0.0;
    double gap = 0.0; // constrained - vanilla; reported, never asserted
};

FinalErrorComparison final_error_comparison(const CheckpointSeries& constrained,
                                            const CheckpointSeries& vanilla,
                                            const Dataset& test_set);

} // namespace phaselab
