#include "phaselab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "phaselab/dataset.hpp"

namespace phaselab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

EvalTraces make_eval_traces(const CheckpointSeries& series,
                            const BoostEnsemble& ensemble,
                            const Dataset& eval_set,
                            const std::vector<std::int64_t>& boundary_steps) {
    if (series.checkpoints.empty())
        throw std::invalid_argument("make_eval_traces: empty checkpoint series");
    eval_set.validate();

    EvalTraces t;
    t.labels = eval_set.labels;
    t.boundary_steps = boundary_steps;

    for (const auto& c : series.checkpoints) {
        EvalTraces::FTrace ft;
        ft.step = c.step;
        ft.phase = c.phase;
        ft.preds.resize(eval_set.n);
        ft.scores.resize(eval_set.n);
        std::vector<double> hidden(c.model.hidden_units);
        for (std::size_t i = 0; i < eval_set.n; ++i) {
            double s = c.model.forward(eval_set.row(i), hidden);
            ft.scores[i] = s;
            ft.preds[i] = sign_pm1(s);
        }
        t.f.push_back(std::move(ft));
    }

    for (std::size_t stage = 1; stage <= ensemble.rounds(); ++stage) {
        EvalTraces::GTrace gt;
        gt.stage = static_cast<int>(stage);
        gt.preds.resize(eval_set.n);
        for (std::size_t i = 0; i < eval_set.n; ++i)
            gt.preds[i] = ensemble.staged_predict(stage, eval_set.row(i)).second;
        t.g.push_back(std::move(gt));
    }
    return t;
}

nlohmann::json eval_traces_to_json(const EvalTraces& t) {
    nlohmann::json j;
    j["labels"] = t.labels;
    j["boundary_steps"] = t.boundary_steps;
    j["f"] = nlohmann::json::array();
    for (const auto& ft : t.f)
        j["f"].push_back({{"step", ft.step},
                          {"phase", ft.phase},
                          {"preds", ft.preds},
                          {"scores", ft.scores}});
    j["g"] = nlohmann::json::array();
    for (const auto& gt : t.g)
        j["g"].push_back({{"stage", gt.stage}, {"preds", gt.preds}});
    return j;
}

EvalTraces eval_traces_from_json(const nlohmann::json& j) {
    EvalTraces t;
    t.labels = j.at("labels").get<std::vector<int>>();
    t.boundary_steps = j.at("boundary_steps").get<std::vector<std::int64_t>>();
    for (const auto& ft : j.at("f")) {
        EvalTraces::FTrace f;
        f.step = ft.at("step").get<std::int64_t>();
        f.phase = ft.at("phase").get<int>();
        f.preds = ft.at("preds").get<std::vector<int>>();
        f.scores = ft.at("scores").get<std::vector<double>>();
        t.f.push_back(std::move(f));
    }
    for (const auto& gt : j.at("g")) {
        EvalTraces::GTrace g;
        g.stage = gt.at("stage").get<int>();
        g.preds = gt.at("preds").get<std::vector<int>>();
        t.g.push_back(std::move(g));
    }
    return t;
}

PhaseReport phase_matrix(const EvalTraces& traces, const AnalysisOptions& opt) {
    if (traces.f.empty() || traces.g.empty() || traces.labels.empty())
        throw std::invalid_argument("phase_matrix: empty traces or eval set");

    PhaseReport r;
    for (const auto& ft : traces.f) r.checkpoint_steps.push_back(ft.step);
    for (const auto& gt : traces.g) r.stages.push_back(gt.stage);

    r.cmi_f_given_g.assign(traces.f.size(),
                           std::vector<double>(traces.g.size(), 0.0));
    r.cmi_g_given_f = r.cmi_f_given_g;
    for (std::size_t a = 0; a < traces.f.size(); ++a)
        for (std::size_t b = 0; b < traces.g.size(); ++b) {
            r.cmi_f_given_g[a][b] =
                conditional_mi(traces.f[a].preds, traces.labels, traces.g[b].preds);
            r.cmi_g_given_f[a][b] =
                conditional_mi(traces.g[b].preds, traces.labels, traces.f[a].preds);
        }

    // diagonal phase pairs (i, i+1) evaluated at the boundary snapshots T_i
    for (std::size_t i = 1; i + 1 <= traces.g.size() &&
                            i < traces.boundary_steps.size(); ++i) {
        std::int64_t step = traces.boundary_steps[i];
        auto it = std::find_if(traces.f.begin(), traces.f.end(),
                               [&](const auto& ft) { return ft.step == step; });
        if (it == traces.f.end()) continue;
        PredictionTrace f{"F@" + std::to_string(step), it->preds, {}};
        PredictionTrace g{"G_" + std::to_string(i + 1),
                          traces.g[i].preds, {}};
        SignificanceEntry e;
        e.kind = "boundary";
        e.phase = static_cast<int>(i);
        e.f_step = step;
        e.g_stage = static_cast<int>(i + 1);
        e.sig = cmi_significance(f, traces.labels, g, opt.trials,
                                 CounterRng::derive(opt.seed, i), opt.threads);
        r.significance.push_back(std::move(e));
    }

    r.metadata = {{"units", "bits"},
                  {"trials", opt.trials},
                  {"significance_seed", opt.seed},
                  {"cmi_threshold", opt.cmi_threshold}};
    return r;
}

void select_phase_checkpoints(PhaseReport& report, int phases) {
    report.selected_steps.clear();
    report.selection_feasible = true;
    report.selection_diagnostic.clear();

    std::int64_t prev = std::numeric_limits<std::int64_t>::min();
    for (int i = 1; i <= phases; ++i) {
        if (static_cast<std::size_t>(i + 1) > report.stages.size()) {
            report.selection_feasible = false;
            report.selection_diagnostic =
                "phase " + std::to_string(i) + " needs stage " +
                std::to_string(i + 1) + " which the grid does not cover";
            break;
        }
        // stages are 1-based prefixes stored in order
        std::size_t col_next = static_cast<std::size_t>(i);     // G_{i+1}
        std::size_t col_cur = static_cast<std::size_t>(i - 1);  // G_i

        int best_idx = -1;
        double best_score = kInf;
        for (std::size_t a = 0; a < report.checkpoint_steps.size(); ++a) {
            if (report.checkpoint_steps[a] <= prev) continue;
            double score = std::max(report.cmi_f_given_g[a][col_next],
                                    report.cmi_g_given_f[a][col_cur]);
            if (score < best_score) {
                best_score = score;
                best_idx = static_cast<int>(a);
            }
        }
        if (best_idx < 0) {
            report.selection_feasible = false;
            report.selection_diagnostic =
                "phase " + std::to_string(i) +
                ": no checkpoint after step " + std::to_string(prev);
            break;
        }
        prev = report.checkpoint_steps[best_idx];
        report.selected_steps.push_back(prev);
    }
}

void attach_selected_significance(PhaseReport& report, const EvalTraces& traces,
                                  const AnalysisOptions& opt) {
    for (std::size_t i = 0; i < report.selected_steps.size(); ++i) {
        std::int64_t step = report.selected_steps[i];
        auto it = std::find_if(traces.f.begin(), traces.f.end(),
                               [&](const auto& ft) { return ft.step == step; });
        if (it == traces.f.end() || i + 1 >= traces.g.size()) continue;
        PredictionTrace f{"F@" + std::to_string(step), it->preds, {}};
        PredictionTrace g{"G_" + std::to_string(i + 2), traces.g[i + 1].preds, {}};
        SignificanceEntry e;
        e.kind = "selected";
        e.phase = static_cast<int>(i + 1);
        e.f_step = step;
        e.g_stage = static_cast<int>(i + 2);
        e.sig = cmi_significance(f, traces.labels, g, opt.trials,
                                 CounterRng::derive(opt.seed, 1000 + i),
                                 opt.threads);
        report.significance.push_back(std::move(e));
    }
}

nlohmann::json phase_report_to_json(const PhaseReport& r) {
    nlohmann::json j;
    j["checkpoint_steps"] = r.checkpoint_steps;
    j["stages"] = r.stages;
    j["cmi_f_given_g"] = r.cmi_f_given_g;
    j["cmi_g_given_f"] = r.cmi_g_given_f;
    j["selected_steps"] = r.selected_steps;
    j["selection_feasible"] = r.selection_feasible;
    j["selection_diagnostic"] = r.selection_diagnostic;
    j["metadata"] = r.metadata;
    j["significance"] = nlohmann::json::array();
    for (const auto& e : r.significance) {
        double mi_gap = std::fabs(e.sig.observed_mi - e.sig.baseline_mi_mean);
        j["significance"].push_back(
            {{"kind", e.kind},
             {"phase", e.phase},
             {"f_step", e.f_step},
             {"g_stage", e.g_stage},
             {"observed", e.sig.observed},
             {"matched_accuracy", e.sig.matched_accuracy},
             {"baseline_mean", e.sig.baseline_mean},
             {"baseline_stddev", e.sig.baseline_stddev},
             {"z_score", e.sig.z_score},
             {"empirical_p", e.sig.empirical_p},
             {"trials", e.sig.trials},
             {"observed_mi", e.sig.observed_mi},
             {"baseline_mi_mean", e.sig.baseline_mi_mean},
             {"mi_gap_flagged", mi_gap > 0.01}});
    }
    return j;
}

void write_matrix_csv(const Matrix& m, const std::vector<std::int64_t>& row_keys,
                      const std::vector<int>& col_keys, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "step";
    for (int c : col_keys) out << ",stage_" << c;
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << row_keys[i];
        for (double v : m[i]) out << ',' << format_double(v);
        out << '\n';
    }
}

std::vector<std::vector<double>> subclassifier_scores(
    const MlpModel& m, const Dataset& eval_set, SubclassifierMode mode,
    const std::vector<SubnetworkSpec>& specs) {
    std::vector<std::vector<double>> out;
    if (mode == SubclassifierMode::Neuron) {
        out.assign(m.hidden_units, std::vector<double>(eval_set.n));
        std::vector<double> hidden(m.hidden_units);
        for (std::size_t i = 0; i < eval_set.n; ++i) {
            m.forward(eval_set.row(i), hidden);
            for (std::size_t j = 0; j < m.hidden_units; ++j) out[j][i] = hidden[j];
        }
    } else {
        if (specs.empty())
            throw std::invalid_argument("subclassifier_scores: no sub-network specs");
        out.assign(specs.size(), std::vector<double>(eval_set.n));
        for (std::size_t s = 0; s < specs.size(); ++s)
            for (std::size_t i = 0; i < eval_set.n; ++i)
                out[s][i] = m.subnetwork_output(specs[s], eval_set.row(i));
    }
    return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("pearson: length mismatch");
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double ca = a[i] - ma, cb = b[i] - mb;
        sab += ca * cb;
        saa += ca * ca;
        sbb += cb * cb;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0; // zero-variance convention
    return sab / std::sqrt(saa * sbb);
}

double kendall_tau_vs_index(const std::vector<double>& series) {
    std::size_t n = series.size();
    if (n < 2) return 0.0;
    long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (series[j] > series[i]) ++concordant;
            else if (series[j] < series[i]) ++discordant;
        }
    double pairs = static_cast<double>(n) * (n - 1) / 2.0;
    return (concordant - discordant) / pairs;
}

std::vector<std::vector<double>> stump_prediction_rows(
    const BoostEnsemble& ensemble, const Dataset& eval_set) {
    std::vector<std::vector<double>> stump_preds(ensemble.rounds(),
                                                 std::vector<double>(eval_set.n));
    for (std::size_t t = 0; t < ensemble.rounds(); ++t)
        for (std::size_t i = 0; i < eval_set.n; ++i)
            stump_preds[t][i] = ensemble.stumps[t].predict(eval_set.row(i));
    return stump_preds;
}

Matrix subclassifier_corr(const std::vector<std::vector<double>>& sub_scores,
                          const std::vector<std::vector<double>>& stump_preds) {
    if (sub_scores.empty())
        throw std::invalid_argument("subclassifier_corr: no sub-classifiers");
    Matrix corr(sub_scores.size(), std::vector<double>(stump_preds.size()));
    for (std::size_t s = 0; s < sub_scores.size(); ++s)
        for (std::size_t t = 0; t < stump_preds.size(); ++t)
            corr[s][t] = pearson(sub_scores[s], stump_preds[t]);
    return corr;
}

Matrix subclassifier_corr(const std::vector<std::vector<double>>& sub_scores,
                          const BoostEnsemble& ensemble, const Dataset& eval_set) {
    return subclassifier_corr(sub_scores, stump_prediction_rows(ensemble, eval_set));
}

Assignment match_subclassifiers(const Matrix& corr) {
    return max_assignment(corr);
}

CorrelationTrajectories correlation_trajectories(
    const CheckpointSeries& series, const BoostEnsemble& ensemble,
    const Dataset& eval_set, SubclassifierMode mode,
    const std::vector<SubnetworkSpec>& specs, bool rematch_each) {
    if (series.checkpoints.size() < 2)
        throw std::invalid_argument("correlation_trajectories: need >= 2 checkpoints");
    std::vector<std::int64_t> steps;
    std::vector<std::vector<std::vector<double>>> all_scores;
    for (const auto& c : series.checkpoints) {
        steps.push_back(c.step);
        all_scores.push_back(subclassifier_scores(c.model, eval_set, mode, specs));
    }
    return correlation_trajectories_from_scores(
        steps, all_scores, stump_prediction_rows(ensemble, eval_set), rematch_each);
}

CorrelationTrajectories correlation_trajectories_from_scores(
    const std::vector<std::int64_t>& steps,
    const std::vector<std::vector<std::vector<double>>>& sub_scores,
    const std::vector<std::vector<double>>& stump_preds, bool rematch_each) {
    if (sub_scores.size() < 2 || sub_scores.size() != steps.size())
        throw std::invalid_argument(
            "correlation_trajectories: need >= 2 checkpoints of scores");

    CorrelationTrajectories out;
    out.steps = steps;

    Matrix final_corr = subclassifier_corr(sub_scores.back(), stump_preds);
    Assignment matching = match_subclassifiers(final_corr);
    std::vector<int> matched_subs;
    for (std::size_t s = 0; s < matching.row_to_col.size(); ++s)
        if (matching.row_to_col[s] >= 0) {
            out.matched_pairs.emplace_back(static_cast<int>(s),
                                           matching.row_to_col[s]);
            matched_subs.push_back(static_cast<int>(s));
        }
    out.pairwise_defined = matched_subs.size() >= 2;

    for (const auto& scores : sub_scores) {
        Matrix corr = subclassifier_corr(scores, stump_preds);

        double matched_sum = 0.0;
        if (rematch_each) {
            Assignment local = match_subclassifiers(corr);
            std::size_t cnt = 0;
            for (std::size_t s = 0; s < local.row_to_col.size(); ++s)
                if (local.row_to_col[s] >= 0) {
                    matched_sum += corr[s][local.row_to_col[s]];
                    ++cnt;
                }
            matched_sum /= static_cast<double>(cnt);
        } else {
            for (const auto& [s, t] : out.matched_pairs) matched_sum += corr[s][t];
            matched_sum /= static_cast<double>(out.matched_pairs.size());
        }
        out.mean_matched_corr.push_back(matched_sum);

        if (out.pairwise_defined) {
            double pw = 0.0;
            std::size_t cnt = 0;
            for (std::size_t a = 0; a < matched_subs.size(); ++a)
                for (std::size_t b = a + 1; b < matched_subs.size(); ++b) {
                    pw += pearson(scores[matched_subs[a]], scores[matched_subs[b]]);
                    ++cnt;
                }
            out.mean_pairwise_corr.push_back(pw / static_cast<double>(cnt));
        }
    }

    out.kendall_matched = kendall_tau_vs_index(out.mean_matched_corr);
    out.kendall_pairwise = out.pairwise_defined
                               ? kendall_tau_vs_index(out.mean_pairwise_corr)
                               : 0.0;
    return out;
}

SeriesDelta max_single_step_delta(const std::vector<double>& series,
                                  const std::vector<std::int64_t>& steps) {
    SeriesDelta d;
    for (std::size_t i = 1; i < series.size(); ++i) {
        double delta = series[i] - series[i - 1];
        if (std::fabs(delta) > d.max_abs_delta) {
            d.max_abs_delta = std::fabs(delta);
            d.signed_delta = delta;
            d.step = steps[i];
        }
    }
    return d;
}

namespace {

// tanh of the standardized score sequence; zero-variance collapses to zeros
std::vector<double> squash_scores(const std::vector<double>& scores) {
    double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / scores.size();
    double var = 0.0;
    for (double s : scores) {
        double c = s - mean;
        var += c * c;
    }
    var /= scores.size();
    std::vector<double> out(scores.size(), 0.0);
    if (var > 0.0) {
        double sd = std::sqrt(var);
        for (std::size_t i = 0; i < scores.size(); ++i)
            out[i] = std::tanh((scores[i] - mean) / sd);
    }
    return out;
}

} // namespace

ErrorKlTrajectories error_kl_trajectories(const CheckpointSeries& series,
                                          const BoostEnsemble& ensemble,
                                          const Dataset& eval_set,
                                          SubclassifierMode mode,
                                          const std::vector<SubnetworkSpec>& specs,
                                          double eps) {
    std::vector<std::int64_t> steps;
    std::vector<std::vector<std::vector<double>>> all_scores;
    for (const auto& c : series.checkpoints) {
        steps.push_back(c.step);
        all_scores.push_back(subclassifier_scores(c.model, eval_set, mode, specs));
    }
    return error_kl_trajectories_from_scores(
        steps, all_scores, stump_prediction_rows(ensemble, eval_set),
        eval_set.labels, eps);
}

ErrorKlTrajectories error_kl_trajectories_from_scores(
    const std::vector<std::int64_t>& steps,
    const std::vector<std::vector<std::vector<double>>>& sub_scores,
    const std::vector<std::vector<double>>& stump_preds,
    const std::vector<int>& labels, double eps) {
    if (sub_scores.empty() || sub_scores.size() != steps.size())
        throw std::invalid_argument("error_kl_trajectories: empty score series");

    ErrorKlTrajectories out;
    out.steps = steps;

    Matrix final_corr = subclassifier_corr(sub_scores.back(), stump_preds);
    Assignment matching = match_subclassifiers(final_corr);
    std::vector<int> matched_subs;
    for (std::size_t s = 0; s < matching.row_to_col.size(); ++s)
        if (matching.row_to_col[s] >= 0) {
            out.matched_pairs.emplace_back(static_cast<int>(s),
                                           matching.row_to_col[s]);
            matched_subs.push_back(static_cast<int>(s));
        }
    out.pairwise_defined = matched_subs.size() >= 2;

    // both sides go through the same squash so identical traces give KL 0
    std::vector<ErrorDistribution> stump_errors(stump_preds.size());
    for (std::size_t t = 0; t < stump_preds.size(); ++t)
        stump_errors[t] =
            error_distribution(squash_scores(stump_preds[t]), labels, eps);

    out.matched_kl_fh.assign(out.matched_pairs.size(), {});
    out.matched_kl_hf.assign(out.matched_pairs.size(), {});
    out.matched_js.assign(out.matched_pairs.size(), {});

    for (const auto& scores : sub_scores) {
        std::vector<ErrorDistribution> sub_errors(scores.size());
        for (std::size_t s = 0; s < scores.size(); ++s)
            sub_errors[s] =
                error_distribution(squash_scores(scores[s]), labels, eps);

        double matched_sum = 0.0;
        for (std::size_t p = 0; p < out.matched_pairs.size(); ++p) {
            auto [s, t] = out.matched_pairs[p];
            double fh = kl_divergence(sub_errors[s], stump_errors[t]);
            out.matched_kl_fh[p].push_back(fh);
            out.matched_kl_hf[p].push_back(
                kl_divergence(stump_errors[t], sub_errors[s]));
            out.matched_js[p].push_back(js_divergence(sub_errors[s], stump_errors[t]));
            matched_sum += fh;
        }
        out.mean_matched_kl_fh.push_back(
            matched_sum / static_cast<double>(out.matched_pairs.size()));

        if (out.pairwise_defined) {
            double pw = 0.0;
            std::size_t cnt = 0;
            for (int a : matched_subs)
                for (int b : matched_subs) {
                    if (a == b) continue;
                    pw += kl_divergence(sub_errors[a], sub_errors[b]);
                    ++cnt;
                }
            out.mean_pairwise_kl.push_back(pw / static_cast<double>(cnt));
        }
    }

    out.matched_change = max_single_step_delta(out.mean_matched_kl_fh, out.steps);
    if (out.pairwise_defined)
        out.pairwise_change = max_single_step_delta(out.mean_pairwise_kl, out.steps);
    return out;
}

std::vector<DifficultyScore> difficulty_scores(
    const MlpModel& final_model, const Dataset& ds, int bins,
    const std::vector<int>* class_order) {
    ds.validate();
    if (bins < 1) throw std::invalid_argument("difficulty_scores: bins must be >= 1");

    std::vector<std::vector<double>> embeddings(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i)
        embeddings[i] = final_model.embed(ds.row(i));
    const std::size_t k = final_model.hidden_units;

    // per-class centroid and per-class error of the reference model
    std::vector<int> classes = {1, -1};
    std::vector<std::vector<double>> centroid(2, std::vector<double>(k, 0.0));
    std::vector<std::size_t> count(2, 0);
    std::vector<std::size_t> wrong(2, 0);
    auto cls_idx = [](int label) { return label == 1 ? 0 : 1; };
    for (std::size_t i = 0; i < ds.n; ++i) {
        int c = cls_idx(ds.labels[i]);
        ++count[c];
        for (std::size_t j = 0; j < k; ++j) centroid[c][j] += embeddings[i][j];
        if (sign_pm1(final_model.output(ds.row(i))) != ds.labels[i]) ++wrong[c];
    }
    for (int c = 0; c < 2; ++c)
        if (count[c] > 0)
            for (std::size_t j = 0; j < k; ++j)
                centroid[c][j] /= static_cast<double>(count[c]);

    std::vector<int> rank(2, 0);
    if (class_order) {
        if (class_order->size() != 2)
            throw std::invalid_argument("difficulty_scores: class_order must list both labels");
        for (int r = 0; r < 2; ++r) rank[cls_idx((*class_order)[r])] = r;
    } else {
        double err_pos = count[0] ? static_cast<double>(wrong[0]) / count[0] : 0.0;
        double err_neg = count[1] ? static_cast<double>(wrong[1]) / count[1] : 0.0;
        // lower error = easier class; tie goes to +1
        rank[0] = err_pos <= err_neg ? 0 : 1;
        rank[1] = 1 - rank[0];
    }

    std::vector<DifficultyScore> out(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        int c = cls_idx(ds.labels[i]);
        double dist2 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            double diff = embeddings[i][j] - centroid[c][j];
            dist2 += diff * diff;
        }
        out[i].class_label = ds.labels[i];
        out[i].class_rank = rank[c];
        out[i].centroid_distance = count[c] < 2 ? 0.0 : std::sqrt(dist2);
    }

    std::vector<std::size_t> order(ds.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (out[a].class_rank != out[b].class_rank)
            return out[a].class_rank < out[b].class_rank;
        return out[a].centroid_distance < out[b].centroid_distance;
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        out[order[pos]].bin = static_cast<int>(pos * static_cast<std::size_t>(bins) / ds.n);
    return out;
}

namespace {

// average-rank Spearman; returns false if either side has zero variance
bool spearman(const std::vector<double>& a, const std::vector<double>& b,
              double& rho) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
            double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
            for (std::size_t p = i; p <= j; ++p) r[order[p]] = avg;
            i = j + 1;
        }
        return r;
    };
    auto ra = ranks(a), rb = ranks(b);
    double value = pearson(ra, rb);
    bool ok = true;
    auto flat = [](const std::vector<double>& v) {
        for (double x : v)
            if (x != v[0]) return false;
        return true;
    };
    if (flat(ra) || flat(rb)) ok = false;
    rho = value;
    return ok;
}

} // namespace

LearningOrderCurves learning_order_curves(const EvalTraces& traces,
                                          const std::vector<DifficultyScore>& scores,
                                          double mastery_threshold) {
    if (scores.size() != traces.labels.size())
        throw std::invalid_argument("learning_order_curves: score/eval size mismatch");

    int bins = 0;
    for (const auto& s : scores) bins = std::max(bins, s.bin + 1);
    std::vector<std::vector<std::size_t>> members(bins);
    for (std::size_t i = 0; i < scores.size(); ++i)
        members[scores[i].bin].push_back(i);

    auto bin_accuracy = [&](const std::vector<int>& preds) {
        std::vector<double> acc(bins, 0.0);
        for (int b = 0; b < bins; ++b) {
            if (members[b].empty()) continue;
            std::size_t correct = 0;
            for (std::size_t i : members[b])
                if (preds[i] == traces.labels[i]) ++correct;
            acc[b] = static_cast<double>(correct) / members[b].size();
        }
        return acc;
    };

    LearningOrderCurves out;
    for (const auto& ft : traces.f) out.f_bin_acc.push_back(bin_accuracy(ft.preds));
    for (const auto& gt : traces.g) out.g_bin_acc.push_back(bin_accuracy(gt.preds));

    auto mastery = [&](const std::vector<std::vector<double>>& curves) {
        std::vector<double> m(bins, kInf);
        for (int b = 0; b < bins; ++b)
            for (std::size_t t = 0; t < curves.size(); ++t)
                if (curves[t][b] >= mastery_threshold) {
                    m[b] = static_cast<double>(t);
                    break;
                }
        return m;
    };
    out.f_mastery = mastery(out.f_bin_acc);
    out.g_mastery = mastery(out.g_bin_acc);

    // bins never mastered on either side drop out pairwise
    std::vector<double> fa, ga;
    for (int b = 0; b < bins; ++b)
        if (std::isfinite(out.f_mastery[b]) && std::isfinite(out.g_mastery[b])) {
            fa.push_back(out.f_mastery[b]);
            ga.push_back(out.g_mastery[b]);
        }
    if (fa.size() < 2) {
        out.degenerate = true;
        out.note = "fewer than two bins mastered by both families";
    } else {
        double rho = 0.0;
        if (!spearman(fa, ga, rho)) {
            out.degenerate = true;
            out.note = "mastery order constant; rank agreement undefined";
            out.rank_agreement = rho;
        } else {
            out.rank_agreement = rho;
        }
    }
    return out;
}

FinalErrorComparison final_error_comparison(const CheckpointSeries& constrained,
                                            const CheckpointSeries& vanilla,
                                            const Dataset& test_set) {
    FinalErrorComparison out;
    out.constrained_error =
        1.0 - evaluate(constrained.final_checkpoint().model, test_set,
                       LossKind::Hinge).second;
    out.vanilla_error =
        1.0 - evaluate(vanilla.final_checkpoint().model, test_set,
                       LossKind::Hinge).second;
    out.gap = out.constrained_error - out.vanilla_error;
    return out;
}

} // namespace phaselab
