#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "phaselab/analysis.hpp"
#include "phaselab/train.hpp"

namespace phaselab {

// Parsed + validated run configuration. Unknown keys anywhere in the source
// document are rejected with a message naming the offending key; the resolved
// document (defaults filled in) is written alongside every run's outputs.
struct ExperimentConfig {
    std::uint64_t seed = 0;

    // data section
    std::string generator = "xor"; // "xor", "sinusoid", or "cifar10"
    std::size_t n = 2000;
    std::size_t d = 10;
    double train_fraction = 0.8;
    double label_noise = 0.0;
    double cluster_separation = 2.0; // xor
    double cluster_stddev = 0.5;     // xor
    std::size_t signal_dims = 1;     // sinusoid
    double frequency = 1.0;          // sinusoid
    std::vector<std::string> cifar_paths;
    std::vector<int> positive_classes; // raw CIFAR classes mapped to +1
    bool standardize_features = true;

    // boost section
    std::size_t rounds = 4;

    // mlp section (schedule carries lr, batch, loss, boundaries, mode)
    std::size_t hidden_units = 64;
    PhaseSchedule schedule;

    // subnetworks section (experiment2)
    std::size_t subnetwork_count = 0; // 0 = derived from rounds
    bool rematch_each = false;

    // analysis section
    AnalysisOptions analysis;
    int phases = 0; // selection depth; 0 = derived from grid shape
    double mastery_threshold = 0.9;

    nlohmann::json resolved; // full document with defaults applied
};

ExperimentConfig parse_experiment_config(const nlohmann::json& doc);

// Derived per-purpose seeds so stages draw from independent streams.
std::uint64_t data_seed(const ExperimentConfig& cfg);
std::uint64_t split_seed(const ExperimentConfig& cfg);
std::uint64_t init_seed(const ExperimentConfig& cfg);
std::uint64_t train_seed(const ExperimentConfig& cfg);

// Generates (or loads), splits, and optionally standardizes the data.
struct PreparedData {
    Dataset train;
    Dataset test;
};
PreparedData prepare_data(const ExperimentConfig& cfg);

// Equal contiguous blocks of hidden units, block s assigned to round s.
std::vector<SubnetworkSpec> make_disjoint_specs(std::size_t hidden_units,
                                                std::size_t count);

// Reports are pure functions of the persisted trace documents; the runner and
// the report subcommand call the same function, so regeneration is
// byte-identical by construction.
nlohmann::json experiment1_report_from_traces(const nlohmann::json& traces,
                                              int threads);
nlohmann::json experiment2_report_from_traces(const nlohmann::json& traces);
nlohmann::json report_from_traces(const nlohmann::json& traces, int threads);

// Pipeline commands. Each writes its declared outputs under out_dir plus a
// manifest listing what completed; on a stage failure the manifest records
// the partial progress and the error is rethrown.
void run_gen(const ExperimentConfig& cfg, const std::string& out_dir);
void run_experiment1(const ExperimentConfig& cfg, const std::string& out_dir,
                     int threads);
void run_experiment2(const ExperimentConfig& cfg, const std::string& out_dir,
                     int threads);
void run_vc(const nlohmann::json& doc, const std::string& out_dir);
void run_report(const std::string& traces_path, const std::string& out_dir,
                int threads);

// Minimal structural check used for the exit-code contract: required keys
// present with the right JSON types. Throws std::runtime_error on violation.
void validate_report_schema(const nlohmann::json& report,
                            const std::string& kind);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

} // namespace phaselab
