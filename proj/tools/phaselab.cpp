#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "phaselab/experiment.hpp"
#include "phaselab/toml_lite.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "run";
    std::string traces_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
};

phaselab::ExperimentConfig load_config(const CommonOpts& opts) {
    nlohmann::json doc = opts.config_path.empty()
                             ? nlohmann::json::object()
                             : phaselab::load_config_file(opts.config_path);
    if (opts.seed_set) doc["seed"] = opts.seed;
    return phaselab::parse_experiment_config(doc);
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
    auto* config = cmd->add_option("--config", opts.config_path,
                                   "TOML or JSON configuration file");
    if (needs_config) config->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "override the config seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--threads", opts.threads, "analysis worker cap")
        ->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"boosting/MLP co-training lab"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* gen = app.add_subcommand("gen", "generate and persist datasets");
    add_common(gen, opts, true);
    auto* boost = app.add_subcommand("boost", "fit the stump ensemble");
    add_common(boost, opts, true);
    auto* train = app.add_subcommand("train", "train the MLP on its own");
    add_common(train, opts, true);
    auto* exp1 = app.add_subcommand(
        "experiment1", "phase matrix + checkpoint selection pipeline");
    add_common(exp1, opts, true);
    auto* exp2 = app.add_subcommand(
        "experiment2", "sub-network specialization pipeline");
    add_common(exp2, opts, true);
    auto* vc = app.add_subcommand("vc", "capacity bound tables");
    add_common(vc, opts, false);
    auto* report = app.add_subcommand(
        "report", "regenerate a report from persisted traces");
    add_common(report, opts, false);
    report->add_option("--traces", opts.traces_path, "traces.json path")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            phaselab::run_gen(load_config(opts), opts.out_dir);
        } else if (boost->parsed()) {
            auto cfg = load_config(opts);
            namespace fs = std::filesystem;
            fs::create_directories(opts.out_dir);
            phaselab::write_json_file(cfg.resolved, opts.out_dir + "/config.json");
            auto data = phaselab::prepare_data(cfg);
            auto ensemble = phaselab::run_adaboost(data.train, cfg.rounds);
            phaselab::save_ensemble(ensemble, opts.out_dir + "/ensemble.json",
                                    opts.out_dir + "/ensemble_distributions.bin");
            for (std::size_t stage = 1; stage <= ensemble.rounds(); ++stage)
                std::cout << "G_" << stage << " train error "
                          << phaselab::staged_training_error(ensemble, stage,
                                                             data.train)
                          << '\n';
        } else if (train->parsed()) {
            auto cfg = load_config(opts);
            namespace fs = std::filesystem;
            fs::create_directories(opts.out_dir);
            phaselab::write_json_file(cfg.resolved, opts.out_dir + "/config.json");
            auto data = phaselab::prepare_data(cfg);
            const phaselab::BoostEnsemble* ens_ptr = nullptr;
            phaselab::BoostEnsemble ensemble;
            if (cfg.schedule.mode == phaselab::SamplingMode::BoostingAligned) {
                ensemble = phaselab::run_adaboost(data.train, cfg.rounds);
                ens_ptr = &ensemble;
            }
            phaselab::CounterRng rng(phaselab::init_seed(cfg));
            auto init = phaselab::MlpModel::random_init(cfg.hidden_units,
                                                        data.train.d, rng);
            auto series = phaselab::train(init, data.train, &data.test,
                                          cfg.schedule, ens_ptr,
                                          phaselab::train_seed(cfg));
            phaselab::save_curve_csv(series, opts.out_dir + "/curve.csv");
            phaselab::save_checkpoint(series.final_checkpoint(),
                                      opts.out_dir + "/final.ckpt");
            if (series.aborted) {
                std::cerr << "training aborted: " << series.abort_reason << '\n';
                return 1;
            }
        } else if (exp1->parsed()) {
            phaselab::run_experiment1(load_config(opts), opts.out_dir,
                                      opts.threads);
        } else if (exp2->parsed()) {
            phaselab::run_experiment2(load_config(opts), opts.out_dir,
                                      opts.threads);
        } else if (vc->parsed()) {
            nlohmann::json doc = opts.config_path.empty()
                                     ? nlohmann::json::object()
                                     : phaselab::load_config_file(opts.config_path);
            phaselab::run_vc(doc, opts.out_dir);
        } else if (report->parsed()) {
            phaselab::run_report(opts.traces_path, opts.out_dir, opts.threads);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
