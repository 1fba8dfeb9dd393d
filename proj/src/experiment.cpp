#include "phaselab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "phaselab/cifar10.hpp"
#include "phaselab/generators.hpp"
#include "phaselab/svg.hpp"
#include "phaselab/vc_bounds.hpp"

namespace phaselab {

namespace fs = std::filesystem;

namespace {

void reject_unknown_keys(const nlohmann::json& obj,
                         const std::vector<std::string>& allowed,
                         const std::string& section) {
    if (!obj.is_object())
        throw std::invalid_argument("config: section '" + section +
                                    "' must be a table");
    for (const auto& [key, value] : obj.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::invalid_argument("config: unknown key '" + section +
                                        (section.empty() ? "" : ".") + key + "'");
}

template <typename T>
T get_or(const nlohmann::json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument("config: bad value for key '" + key + "'");
    }
}

} // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
    reject_unknown_keys(
        doc, {"seed", "data", "boost", "mlp", "subnetworks", "analysis"}, "");

    ExperimentConfig cfg;
    cfg.seed = get_or<std::uint64_t>(doc, "seed", 0);

    nlohmann::json data = doc.value("data", nlohmann::json::object());
    reject_unknown_keys(data,
                        {"generator", "n", "d", "train_fraction", "label_noise",
                         "cluster_separation", "cluster_stddev", "signal_dims",
                         "frequency", "paths", "positive_classes", "standardize"},
                        "data");
    cfg.generator = get_or<std::string>(data, "generator", cfg.generator);
    if (cfg.generator != "xor" && cfg.generator != "sinusoid" &&
        cfg.generator != "cifar10")
        throw std::invalid_argument("config: unknown generator '" + cfg.generator +
                                    "'");
    cfg.n = get_or<std::size_t>(data, "n", cfg.n);
    cfg.d = get_or<std::size_t>(data, "d", cfg.d);
    cfg.train_fraction = get_or<double>(data, "train_fraction", cfg.train_fraction);
    cfg.label_noise = get_or<double>(data, "label_noise", cfg.label_noise);
    cfg.cluster_separation =
        get_or<double>(data, "cluster_separation", cfg.cluster_separation);
    cfg.cluster_stddev = get_or<double>(data, "cluster_stddev", cfg.cluster_stddev);
    cfg.signal_dims = get_or<std::size_t>(data, "signal_dims", cfg.signal_dims);
    cfg.frequency = get_or<double>(data, "frequency", cfg.frequency);
    cfg.cifar_paths = get_or<std::vector<std::string>>(data, "paths", {});
    cfg.positive_classes = get_or<std::vector<int>>(data, "positive_classes",
                                                    {0, 1, 2, 3, 4});
    cfg.standardize_features = get_or<bool>(data, "standardize", true);
    if (cfg.generator == "cifar10" && cfg.cifar_paths.empty())
        throw std::invalid_argument("config: cifar10 generator needs data.paths");
    if (cfg.train_fraction <= 0.0 || cfg.train_fraction >= 1.0)
        throw std::invalid_argument("config: train_fraction must be in (0,1)");

    nlohmann::json boost = doc.value("boost", nlohmann::json::object());
    reject_unknown_keys(boost, {"rounds"}, "boost");
    cfg.rounds = get_or<std::size_t>(boost, "rounds", cfg.rounds);
    if (cfg.rounds == 0)
        throw std::invalid_argument("config: boost.rounds must be >= 1");

    nlohmann::json mlp = doc.value("mlp", nlohmann::json::object());
    reject_unknown_keys(mlp,
                        {"hidden_units", "learning_rate", "batch_size", "loss",
                         "schedule", "boundaries", "warmup_steps",
                         "steps_per_phase", "checkpoint_every",
                         "train_output_weights"},
                        "mlp");
    cfg.hidden_units = get_or<std::size_t>(mlp, "hidden_units", cfg.hidden_units);
    cfg.schedule.learning_rate = get_or<double>(mlp, "learning_rate", 0.05);
    cfg.schedule.batch_size = get_or<std::size_t>(mlp, "batch_size", 32);
    cfg.schedule.loss = parse_loss(get_or<std::string>(mlp, "loss", "hinge"));
    std::string mode = get_or<std::string>(mlp, "schedule", "uniform");
    if (mode == "uniform")
        cfg.schedule.mode = SamplingMode::Uniform;
    else if (mode == "boosting_aligned")
        cfg.schedule.mode = SamplingMode::BoostingAligned;
    else
        throw std::invalid_argument("config: unknown schedule '" + mode + "'");
    cfg.schedule.checkpoint_every =
        get_or<std::int64_t>(mlp, "checkpoint_every", 0);
    cfg.schedule.train_output_weights =
        get_or<bool>(mlp, "train_output_weights", true);
    if (mlp.contains("boundaries")) {
        if (mlp.contains("warmup_steps") || mlp.contains("steps_per_phase"))
            throw std::invalid_argument(
                "config: give either mlp.boundaries or "
                "mlp.warmup_steps/steps_per_phase, not both");
        cfg.schedule.boundaries =
            mlp.at("boundaries").get<std::vector<std::int64_t>>();
    } else {
        std::int64_t warmup = get_or<std::int64_t>(mlp, "warmup_steps", 0);
        std::int64_t per = get_or<std::int64_t>(mlp, "steps_per_phase", 200);
        if (per <= 0)
            throw std::invalid_argument("config: steps_per_phase must be >= 1");
        for (std::size_t i = 0; i <= cfg.rounds; ++i)
            cfg.schedule.boundaries.push_back(
                warmup + per * static_cast<std::int64_t>(i));
    }

    nlohmann::json subs = doc.value("subnetworks", nlohmann::json::object());
    reject_unknown_keys(subs, {"count", "rematch_each"}, "subnetworks");
    cfg.subnetwork_count = get_or<std::size_t>(subs, "count", 0);
    cfg.rematch_each = get_or<bool>(subs, "rematch_each", false);

    nlohmann::json analysis = doc.value("analysis", nlohmann::json::object());
    reject_unknown_keys(analysis,
                        {"trials", "cmi_threshold", "epsilon", "bins", "phases",
                         "mastery_threshold"},
                        "analysis");
    cfg.analysis.trials = get_or<int>(analysis, "trials", 200);
    cfg.analysis.cmi_threshold = get_or<double>(analysis, "cmi_threshold", 0.05);
    cfg.analysis.epsilon = get_or<double>(analysis, "epsilon", 1e-6);
    cfg.analysis.bins = get_or<int>(analysis, "bins", 4);
    cfg.phases = get_or<int>(analysis, "phases", 0);
    cfg.mastery_threshold = get_or<double>(analysis, "mastery_threshold", 0.9);
    cfg.analysis.seed = CounterRng::derive(cfg.seed, 5);

    cfg.resolved = {
        {"seed", cfg.seed},
        {"data",
         {{"generator", cfg.generator},
          {"n", cfg.n},
          {"d", cfg.d},
          {"train_fraction", cfg.train_fraction},
          {"label_noise", cfg.label_noise},
          {"cluster_separation", cfg.cluster_separation},
          {"cluster_stddev", cfg.cluster_stddev},
          {"signal_dims", cfg.signal_dims},
          {"frequency", cfg.frequency},
          {"paths", cfg.cifar_paths},
          {"positive_classes", cfg.positive_classes},
          {"standardize", cfg.standardize_features}}},
        {"boost", {{"rounds", cfg.rounds}}},
        {"mlp",
         {{"hidden_units", cfg.hidden_units},
          {"learning_rate", cfg.schedule.learning_rate},
          {"batch_size", cfg.schedule.batch_size},
          {"loss", loss_name(cfg.schedule.loss)},
          {"schedule", mode},
          {"boundaries", cfg.schedule.boundaries},
          {"checkpoint_every", cfg.schedule.checkpoint_every},
          {"train_output_weights", cfg.schedule.train_output_weights}}},
        {"subnetworks",
         {{"count", cfg.subnetwork_count}, {"rematch_each", cfg.rematch_each}}},
        {"analysis",
         {{"trials", cfg.analysis.trials},
          {"seed", cfg.analysis.seed},
          {"cmi_threshold", cfg.analysis.cmi_threshold},
          {"epsilon", cfg.analysis.epsilon},
          {"bins", cfg.analysis.bins},
          {"phases", cfg.phases},
          {"mastery_threshold", cfg.mastery_threshold}}}};
    return cfg;
}

std::uint64_t data_seed(const ExperimentConfig& cfg) {
    return CounterRng::derive(cfg.seed, 1);
}
std::uint64_t split_seed(const ExperimentConfig& cfg) {
    return CounterRng::derive(cfg.seed, 2);
}
std::uint64_t init_seed(const ExperimentConfig& cfg) {
    return CounterRng::derive(cfg.seed, 3);
}
std::uint64_t train_seed(const ExperimentConfig& cfg) {
    return CounterRng::derive(cfg.seed, 4);
}

PreparedData prepare_data(const ExperimentConfig& cfg) {
    Dataset all;
    if (cfg.generator == "xor") {
        XorClusterConfig g;
        g.n = cfg.n;
        g.d = cfg.d;
        g.cluster_separation = cfg.cluster_separation;
        g.cluster_stddev = cfg.cluster_stddev;
        g.label_noise = cfg.label_noise;
        g.seed = data_seed(cfg);
        all = gen_xor_clusters(g);
    } else if (cfg.generator == "sinusoid") {
        SinusoidConfig g;
        g.n = cfg.n;
        g.d = cfg.d;
        g.signal_dims = cfg.signal_dims;
        g.frequency = cfg.frequency;
        g.label_noise = cfg.label_noise;
        g.seed = data_seed(cfg);
        all = gen_sinusoid(g);
    } else {
        std::set<int> pos(cfg.positive_classes.begin(),
                          cfg.positive_classes.end());
        all = load_cifar10_binary(cfg.cifar_paths, pos);
    }

    auto [train, test] = split(all, cfg.train_fraction, split_seed(cfg));
    if (!cfg.standardize_features) return {std::move(train), std::move(test)};
    auto std_result = standardize(train, test);
    return {std::move(std_result.train), std::move(std_result.test)};
}

std::vector<SubnetworkSpec> make_disjoint_specs(std::size_t hidden_units,
                                                std::size_t count) {
    if (count == 0 || hidden_units % count != 0)
        throw std::invalid_argument(
            "subnetworks: count must divide hidden_units");
    std::size_t block = hidden_units / count;
    std::vector<SubnetworkSpec> specs(count);
    for (std::size_t s = 0; s < count; ++s) {
        specs[s].assigned_round = static_cast<int>(s);
        for (std::size_t j = 0; j < block; ++j)
            specs[s].units.push_back(s * block + j);
    }
    return specs;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return nlohmann::json::parse(in);
}

namespace {

// Collects stage/output progress so a failed run still leaves a manifest of
// what completed.
struct Manifest {
    std::string command;
    std::string out_dir;
    std::vector<std::string> completed;
    std::vector<std::string> outputs;

    void stage(const std::string& name) { completed.push_back(name); }
    void output(const std::string& rel) { outputs.push_back(rel); }

    void write(bool ok, const std::string& error) const {
        nlohmann::json j = {{"command", command},
                            {"ok", ok},
                            {"completed", completed},
                            {"outputs", outputs},
                            {"error", error}};
        write_json_file(j, out_dir + "/manifest.json");
    }
};

template <typename Fn>
void with_manifest(Manifest& m, Fn&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        m.write(false, e.what());
        throw;
    }
    m.write(true, "");
}

std::string checkpoint_name(std::int64_t step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "step_%06lld.ckpt",
                  static_cast<long long>(step));
    return buf;
}

double masked_mastery(double v) { return std::isfinite(v) ? v : -1.0; }

nlohmann::json learning_order_json(const LearningOrderCurves& c) {
    nlohmann::json j;
    j["f_bin_acc"] = c.f_bin_acc;
    j["g_bin_acc"] = c.g_bin_acc;
    j["f_mastery"] = nlohmann::json::array();
    j["g_mastery"] = nlohmann::json::array();
    for (double v : c.f_mastery) j["f_mastery"].push_back(masked_mastery(v));
    for (double v : c.g_mastery) j["g_mastery"].push_back(masked_mastery(v));
    j["rank_agreement"] = c.rank_agreement;
    j["degenerate"] = c.degenerate;
    j["note"] = c.note;
    return j;
}

nlohmann::json series_delta_json(const SeriesDelta& d) {
    return {{"max_abs_delta", d.max_abs_delta},
            {"signed_delta", d.signed_delta},
            {"step", d.step}};
}

AnalysisOptions analysis_from_json(const nlohmann::json& a, int threads) {
    AnalysisOptions opt;
    opt.trials = a.at("trials").get<int>();
    opt.seed = a.at("seed").get<std::uint64_t>();
    opt.cmi_threshold = a.at("cmi_threshold").get<double>();
    opt.epsilon = a.at("epsilon").get<double>();
    opt.bins = a.at("bins").get<int>();
    opt.threads = threads;
    return opt;
}

void save_datasets(Manifest& m, const Dataset& train, const Dataset& test) {
    save_dataset(train, m.out_dir + "/train.csv", m.out_dir + "/train.meta.json");
    save_dataset(test, m.out_dir + "/test.csv", m.out_dir + "/test.meta.json");
    m.output("train.csv");
    m.output("train.meta.json");
    m.output("test.csv");
    m.output("test.meta.json");
}

} // namespace

nlohmann::json experiment1_report_from_traces(const nlohmann::json& traces,
                                              int threads) {
    EvalTraces t = eval_traces_from_json(traces);
    AnalysisOptions opt = analysis_from_json(traces.at("analysis"), threads);

    int phases = traces.at("analysis").at("phases").get<int>();
    if (phases <= 0) {
        std::size_t grid = t.g.size() > 0 ? t.g.size() - 1 : 0;
        std::size_t sched =
            t.boundary_steps.size() > 1 ? t.boundary_steps.size() - 1 : 0;
        phases = static_cast<int>(std::min(grid, sched));
        phases = std::max(phases, 1);
    }

    PhaseReport rep = phase_matrix(t, opt);
    select_phase_checkpoints(rep, phases);
    attach_selected_significance(rep, t, opt);

    nlohmann::json j = phase_report_to_json(rep);
    j["kind"] = "experiment1";

    std::vector<int> bins = traces.at("difficulty_bins").get<std::vector<int>>();
    std::vector<DifficultyScore> scores(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) scores[i].bin = bins[i];
    double mastery =
        traces.at("analysis").at("mastery_threshold").get<double>();
    j["learning_order"] =
        learning_order_json(learning_order_curves(t, scores, mastery));

    j["analysis"] = traces.at("analysis");
    j["config"] = traces.at("config");
    return j;
}

nlohmann::json experiment2_report_from_traces(const nlohmann::json& traces) {
    auto steps = traces.at("steps").get<std::vector<std::int64_t>>();
    auto sub_scores =
        traces.at("sub_scores")
            .get<std::vector<std::vector<std::vector<double>>>>();
    auto stump_preds =
        traces.at("stump_preds").get<std::vector<std::vector<double>>>();
    auto labels = traces.at("labels").get<std::vector<int>>();
    bool rematch = traces.at("rematch_each").get<bool>();
    double eps = traces.at("analysis").at("epsilon").get<double>();

    CorrelationTrajectories corr = correlation_trajectories_from_scores(
        steps, sub_scores, stump_preds, rematch);
    ErrorKlTrajectories kl = error_kl_trajectories_from_scores(
        steps, sub_scores, stump_preds, labels, eps);

    auto error_rate = [&](const std::vector<int>& preds) {
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < preds.size(); ++i)
            if (preds[i] != labels[i]) ++wrong;
        return static_cast<double>(wrong) / static_cast<double>(preds.size());
    };
    double ce = error_rate(
        traces.at("final_preds_constrained").get<std::vector<int>>());
    double ve =
        error_rate(traces.at("final_preds_vanilla").get<std::vector<int>>());

    nlohmann::json j;
    j["kind"] = "experiment2";
    j["steps"] = steps;
    j["matched_pairs"] = nlohmann::json::array();
    for (const auto& [s, t] : corr.matched_pairs)
        j["matched_pairs"].push_back({s, t});
    j["mean_matched_corr"] = corr.mean_matched_corr;
    j["mean_pairwise_corr"] = corr.mean_pairwise_corr;
    j["pairwise_defined"] = corr.pairwise_defined;
    j["kendall_matched"] = corr.kendall_matched;
    j["kendall_pairwise"] = corr.kendall_pairwise;
    j["matched_kl_fh"] = kl.matched_kl_fh;
    j["matched_kl_hf"] = kl.matched_kl_hf;
    j["matched_js"] = kl.matched_js;
    j["mean_matched_kl_fh"] = kl.mean_matched_kl_fh;
    j["mean_pairwise_kl"] = kl.mean_pairwise_kl;
    j["matched_change"] = series_delta_json(kl.matched_change);
    j["pairwise_change"] = series_delta_json(kl.pairwise_change);
    j["final_comparison"] = {{"constrained_error", ce},
                             {"vanilla_error", ve},
                             {"gap", ce - ve}};
    j["analysis"] = traces.at("analysis");
    j["config"] = traces.at("config");
    return j;
}

nlohmann::json report_from_traces(const nlohmann::json& traces, int threads) {
    std::string kind = traces.at("kind").get<std::string>();
    if (kind == "experiment1")
        return experiment1_report_from_traces(traces, threads);
    if (kind == "experiment2") return experiment2_report_from_traces(traces);
    throw std::runtime_error("traces: unknown kind '" + kind + "'");
}

void validate_report_schema(const nlohmann::json& report,
                            const std::string& kind) {
    auto need = [&](const char* key) {
        if (!report.contains(key))
            throw std::runtime_error("report schema: missing key '" +
                                     std::string(key) + "'");
    };
    need("kind");
    need("config");
    if (report.at("kind").get<std::string>() != kind)
        throw std::runtime_error("report schema: kind mismatch");
    if (kind == "experiment1") {
        for (const char* key :
             {"checkpoint_steps", "stages", "cmi_f_given_g", "cmi_g_given_f",
              "significance", "selected_steps", "learning_order"})
            need(key);
    } else if (kind == "experiment2") {
        for (const char* key :
             {"steps", "matched_pairs", "mean_matched_corr",
              "mean_matched_kl_fh", "final_comparison"})
            need(key);
    } else {
        throw std::runtime_error("report schema: unknown kind '" + kind + "'");
    }
}

void run_gen(const ExperimentConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    Manifest m{"gen", out_dir, {}, {}};
    with_manifest(m, [&] {
        write_json_file(cfg.resolved, out_dir + "/config.json");
        m.output("config.json");
        PreparedData data = prepare_data(cfg);
        m.stage("data");
        save_datasets(m, data.train, data.test);
    });
}

void run_experiment1(const ExperimentConfig& cfg, const std::string& out_dir,
                     int threads) {
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/checkpoints");
    Manifest m{"experiment1", out_dir, {}, {}};
    with_manifest(m, [&] {
        write_json_file(cfg.resolved, out_dir + "/config.json");
        m.output("config.json");

        PreparedData data = prepare_data(cfg);
        m.stage("data");
        save_datasets(m, data.train, data.test);

        BoostEnsemble ensemble = run_adaboost(data.train, cfg.rounds);
        m.stage("boost");
        save_ensemble(ensemble, out_dir + "/ensemble.json",
                      out_dir + "/ensemble_distributions.bin");
        m.output("ensemble.json");
        m.output("ensemble_distributions.bin");

        MlpModel init;
        {
            CounterRng rng(init_seed(cfg));
            init = MlpModel::random_init(cfg.hidden_units, data.train.d, rng);
        }
        CheckpointSeries series = train(init, data.train, &data.test,
                                        cfg.schedule, &ensemble, train_seed(cfg));
        if (series.aborted)
            throw std::runtime_error("training aborted: " + series.abort_reason);
        m.stage("train");
        save_curve_csv(series, out_dir + "/curve.csv");
        m.output("curve.csv");
        for (const auto& c : series.checkpoints) {
            std::string name = checkpoint_name(c.step);
            save_checkpoint(c, out_dir + "/checkpoints/" + name);
            m.output("checkpoints/" + name);
        }

        EvalTraces traces = make_eval_traces(series, ensemble, data.test,
                                             cfg.schedule.boundaries);
        auto difficulty =
            difficulty_scores(series.final_checkpoint().model, data.test,
                              cfg.analysis.bins);
        nlohmann::json tj = eval_traces_to_json(traces);
        tj["kind"] = "experiment1";
        tj["difficulty_bins"] = nlohmann::json::array();
        for (const auto& s : difficulty) tj["difficulty_bins"].push_back(s.bin);
        tj["analysis"] = cfg.resolved.at("analysis");
        tj["config"] = cfg.resolved;
        write_json_file(tj, out_dir + "/traces.json");
        m.output("traces.json");
        m.stage("traces");

        nlohmann::json report = experiment1_report_from_traces(tj, threads);
        validate_report_schema(report, "experiment1");
        write_json_file(report, out_dir + "/report.json");
        m.output("report.json");
        m.stage("analysis");

        // tables + plots, straight from the report grid
        auto steps_keys =
            report.at("checkpoint_steps").get<std::vector<std::int64_t>>();
        auto stage_keys = report.at("stages").get<std::vector<int>>();
        auto fg = report.at("cmi_f_given_g").get<Matrix>();
        auto gf = report.at("cmi_g_given_f").get<Matrix>();
        write_matrix_csv(fg, steps_keys, stage_keys,
                         out_dir + "/cmi_f_given_g.csv");
        write_matrix_csv(gf, steps_keys, stage_keys,
                         out_dir + "/cmi_g_given_f.csv");
        m.output("cmi_f_given_g.csv");
        m.output("cmi_g_given_f.csv");

        std::vector<std::string> row_labels, col_labels;
        for (auto s : steps_keys) row_labels.push_back(std::to_string(s));
        for (int s : stage_keys) col_labels.push_back("G_" + std::to_string(s));
        write_heatmap_svg(out_dir + "/cmi_f_given_g.svg", "I(F;Y|G) bits", fg,
                          row_labels, col_labels);
        write_heatmap_svg(out_dir + "/cmi_g_given_f.svg", "I(G;Y|F) bits", gf,
                          row_labels, col_labels);
        m.output("cmi_f_given_g.svg");
        m.output("cmi_g_given_f.svg");

        std::vector<LineSeries> curve(2);
        curve[0].name = "train acc";
        curve[1].name = "test acc";
        for (const auto& c : series.checkpoints) {
            curve[0].x.push_back(static_cast<double>(c.step));
            curve[0].y.push_back(c.train_acc);
            curve[1].x.push_back(static_cast<double>(c.step));
            curve[1].y.push_back(c.test_acc);
        }
        write_line_chart_svg(out_dir + "/curve.svg", "Accuracy", "step",
                             "accuracy", curve);
        m.output("curve.svg");

        std::vector<LineSeries> order;
        const auto& lo = report.at("learning_order");
        auto f_bin_acc =
            lo.at("f_bin_acc").get<std::vector<std::vector<double>>>();
        if (!f_bin_acc.empty()) {
            order.resize(f_bin_acc[0].size());
            for (std::size_t b = 0; b < order.size(); ++b)
                order[b].name = "bin " + std::to_string(b);
            for (std::size_t t = 0; t < f_bin_acc.size(); ++t)
                for (std::size_t b = 0; b < order.size(); ++b) {
                    order[b].x.push_back(
                        static_cast<double>(series.checkpoints[t].step));
                    order[b].y.push_back(f_bin_acc[t][b]);
                }
        }
        write_line_chart_svg(out_dir + "/learning_order.svg",
                             "Per-difficulty-bin accuracy", "step", "accuracy",
                             order);
        m.output("learning_order.svg");
        m.stage("plots");
    });
}

void run_experiment2(const ExperimentConfig& cfg, const std::string& out_dir,
                     int threads) {
    fs::create_directories(out_dir);
    Manifest m{"experiment2", out_dir, {}, {}};
    with_manifest(m, [&] {
        write_json_file(cfg.resolved, out_dir + "/config.json");
        m.output("config.json");

        PreparedData data = prepare_data(cfg);
        m.stage("data");
        save_datasets(m, data.train, data.test);

        BoostEnsemble ensemble = run_adaboost(data.train, cfg.rounds);
        m.stage("boost");
        save_ensemble(ensemble, out_dir + "/ensemble.json",
                      out_dir + "/ensemble_distributions.bin");
        m.output("ensemble.json");
        m.output("ensemble_distributions.bin");

        std::size_t count = cfg.subnetwork_count ? cfg.subnetwork_count
                                                 : ensemble.rounds();
        if (count > ensemble.rounds())
            throw std::runtime_error("subnetworks: more specs than rounds");
        auto specs = make_disjoint_specs(cfg.hidden_units, count);

        MlpModel init;
        {
            CounterRng rng(init_seed(cfg));
            init = MlpModel::random_init(cfg.hidden_units, data.train.d, rng);
        }
        CheckpointSeries constrained =
            train_subnetworks(init, data.train, &data.test, specs, ensemble,
                              cfg.schedule, train_seed(cfg));
        if (constrained.aborted)
            throw std::runtime_error("training aborted: " +
                                     constrained.abort_reason);
        PhaseSchedule vanilla_schedule = cfg.schedule;
        vanilla_schedule.mode = SamplingMode::Uniform;
        CheckpointSeries vanilla = train(init, data.train, &data.test,
                                         vanilla_schedule, nullptr,
                                         train_seed(cfg));
        m.stage("train");
        save_curve_csv(constrained, out_dir + "/curve.csv");
        save_curve_csv(vanilla, out_dir + "/vanilla_curve.csv");
        m.output("curve.csv");
        m.output("vanilla_curve.csv");

        nlohmann::json tj;
        tj["kind"] = "experiment2";
        tj["labels"] = data.test.labels;
        tj["steps"] = nlohmann::json::array();
        tj["sub_scores"] = nlohmann::json::array();
        for (const auto& c : constrained.checkpoints) {
            tj["steps"].push_back(c.step);
            tj["sub_scores"].push_back(subclassifier_scores(
                c.model, data.test, SubclassifierMode::Subnetwork, specs));
        }
        tj["stump_preds"] = stump_prediction_rows(ensemble, data.test);
        auto final_preds = [&](const CheckpointSeries& s) {
            std::vector<int> preds(data.test.n);
            for (std::size_t i = 0; i < data.test.n; ++i)
                preds[i] = sign_pm1(
                    s.final_checkpoint().model.output(data.test.row(i)));
            return preds;
        };
        tj["final_preds_constrained"] = final_preds(constrained);
        tj["final_preds_vanilla"] = final_preds(vanilla);
        tj["rematch_each"] = cfg.rematch_each;
        tj["analysis"] = cfg.resolved.at("analysis");
        tj["config"] = cfg.resolved;
        write_json_file(tj, out_dir + "/traces.json");
        m.output("traces.json");
        m.stage("traces");

        nlohmann::json report = experiment2_report_from_traces(tj);
        validate_report_schema(report, "experiment2");
        write_json_file(report, out_dir + "/report.json");
        m.output("report.json");
        m.stage("analysis");
        (void)threads;

        std::vector<LineSeries> corr_plot(1);
        corr_plot[0].name = "mean matched corr";
        auto steps = report.at("steps").get<std::vector<std::int64_t>>();
        auto matched = report.at("mean_matched_corr").get<std::vector<double>>();
        for (std::size_t i = 0; i < steps.size(); ++i) {
            corr_plot[0].x.push_back(static_cast<double>(steps[i]));
            corr_plot[0].y.push_back(matched[i]);
        }
        if (report.at("pairwise_defined").get<bool>()) {
            LineSeries pw;
            pw.name = "mean pairwise corr";
            auto v = report.at("mean_pairwise_corr").get<std::vector<double>>();
            for (std::size_t i = 0; i < steps.size(); ++i) {
                pw.x.push_back(static_cast<double>(steps[i]));
                pw.y.push_back(v[i]);
            }
            corr_plot.push_back(std::move(pw));
        }
        write_line_chart_svg(out_dir + "/correlation.svg",
                             "Sub-network / stump correlation", "step",
                             "pearson r", corr_plot);
        m.output("correlation.svg");

        std::vector<LineSeries> kl_plot(1);
        kl_plot[0].name = "mean matched KL";
        auto mk = report.at("mean_matched_kl_fh").get<std::vector<double>>();
        for (std::size_t i = 0; i < steps.size(); ++i) {
            kl_plot[0].x.push_back(static_cast<double>(steps[i]));
            kl_plot[0].y.push_back(mk[i]);
        }
        write_line_chart_svg(out_dir + "/error_kl.svg",
                             "Matched error-distribution KL", "step", "bits",
                             kl_plot);
        m.output("error_kl.svg");
        m.stage("plots");
    });
}

void run_vc(const nlohmann::json& doc, const std::string& out_dir) {
    reject_unknown_keys(doc, {"seed", "vc"}, "");
    nlohmann::json vc = doc.value("vc", nlohmann::json::object());
    reject_unknown_keys(vc, {"d_base", "k_max", "units", "connections", "target"},
                        "vc");
    std::int64_t d_base = get_or<std::int64_t>(vc, "d_base", 3);
    std::int64_t k_max = get_or<std::int64_t>(vc, "k_max", 10);
    if (d_base < 1 || k_max < 1)
        throw std::invalid_argument("vc: d_base and k_max must be >= 1");

    fs::create_directories(out_dir);
    Manifest m{"vc", out_dir, {}, {}};
    with_manifest(m, [&] {
        std::ofstream out(out_dir + "/vc_boost.csv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot open vc_boost.csv");
        out << "k,bound\n";
        for (std::int64_t k = 1; k <= k_max; ++k)
            out << k << ',' << format_double(vc_bound_boost(d_base, k)) << '\n';
        out.close();
        m.output("vc_boost.csv");

        nlohmann::json j = {{"d_base", d_base}, {"k_max", k_max}};
        if (vc.contains("units") && vc.contains("connections")) {
            auto [e2, e2v2] =
                vc_bound_mlp(vc.at("units").get<std::int64_t>(),
                             vc.at("connections").get<std::int64_t>());
            // constants-free orders of magnitude, not exact dimension counts
            j["mlp_order_lower"] = e2;
            j["mlp_order_upper"] = e2v2;
        }
        if (vc.contains("target"))
            j["matched_rounds"] =
                conjecture_map(vc.at("target").get<double>(), d_base);
        write_json_file(j, out_dir + "/vc.json");
        m.output("vc.json");
        m.stage("tables");
    });
}

void run_report(const std::string& traces_path, const std::string& out_dir,
                int threads) {
    fs::create_directories(out_dir);
    Manifest m{"report", out_dir, {}, {}};
    with_manifest(m, [&] {
        nlohmann::json traces = read_json_file(traces_path);
        nlohmann::json report = report_from_traces(traces, threads);
        validate_report_schema(report, traces.at("kind").get<std::string>());
        write_json_file(report, out_dir + "/report.json");
        m.output("report.json");
        m.stage("analysis");
    });
}

} // namespace phaselab
