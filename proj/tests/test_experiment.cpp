#include "doctest.h"

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <string>

#include "phaselab/experiment.hpp"
#include "phaselab/vc_bounds.hpp"

using namespace phaselab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

std::string fresh_dir(const std::string& name) {
    std::string path = "/tmp/phaselab_exp_" + name;
    fs::remove_all(path);
    return path;
}

nlohmann::json tiny_experiment1_doc() {
    return {
        {"seed", 11},
        {"data",
         {{"generator", "xor"}, {"n", 150}, {"d", 3}, {"train_fraction", 0.8}}},
        {"boost", {{"rounds", 2}}},
        {"mlp",
         {{"hidden_units", 8},
          {"learning_rate", 0.05},
          {"batch_size", 8},
          {"boundaries", {0, 30, 60}}}},
        {"analysis", {{"trials", 100}}}};
}

nlohmann::json tiny_experiment2_doc() {
    return {
        {"seed", 12},
        {"data",
         {{"generator", "xor"}, {"n", 150}, {"d", 3}, {"train_fraction", 0.8}}},
        {"boost", {{"rounds", 2}}},
        {"mlp",
         {{"hidden_units", 8},
          {"learning_rate", 0.05},
          {"batch_size", 8},
          {"warmup_steps", 10},
          {"steps_per_phase", 20}}},
        {"subnetworks", {{"count", 2}}},
        {"analysis", {{"trials", 100}}}};
}

} // namespace

TEST_CASE("defaults fill in from an empty document") {
    ExperimentConfig cfg = parse_experiment_config(nlohmann::json::object());
    CHECK(cfg.seed == 0);
    CHECK(cfg.generator == "xor");
    CHECK(cfg.rounds == 4);
    CHECK(cfg.hidden_units == 64);
    // derived boundaries: warmup 0 plus 200 per phase, one phase per round
    CHECK(cfg.schedule.boundaries ==
          std::vector<std::int64_t>{0, 200, 400, 600, 800});
    CHECK(cfg.resolved.contains("analysis"));
}

TEST_CASE("unknown keys are rejected by name") {
    try {
        parse_experiment_config({{"sede", 1}});
        FAIL("expected throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("'sede'") != std::string::npos);
    }
    try {
        parse_experiment_config({{"data", {{"generator", "xor"}, {"nn", 5}}}});
        FAIL("expected throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("'data.nn'") != std::string::npos);
    }
}

TEST_CASE("invalid values are rejected") {
    CHECK_THROWS_AS(
        parse_experiment_config({{"data", {{"train_fraction", 1.0}}}}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        parse_experiment_config({{"data", {{"train_fraction", 0.0}}}}),
        std::invalid_argument);
    CHECK_THROWS_AS(parse_experiment_config({{"data", {{"generator", "mnist"}}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        parse_experiment_config({{"data", {{"generator", "cifar10"}}}}),
        std::invalid_argument); // needs paths
    CHECK_THROWS_AS(parse_experiment_config({{"boost", {{"rounds", 0}}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_experiment_config({{"mlp", {{"loss", "mse"}}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_experiment_config({{"mlp", {{"schedule", "warm"}}}}),
                    std::invalid_argument);
    // explicit boundaries conflict with the warmup/per-phase form
    CHECK_THROWS_AS(parse_experiment_config(
                        {{"mlp", {{"boundaries", {0, 10}}, {"warmup_steps", 5}}}}),
                    std::invalid_argument);
}

TEST_CASE("warmup and steps_per_phase derive the boundary grid") {
    ExperimentConfig cfg = parse_experiment_config(
        {{"boost", {{"rounds", 3}}},
         {"mlp", {{"warmup_steps", 50}, {"steps_per_phase", 100}}}});
    CHECK(cfg.schedule.boundaries ==
          std::vector<std::int64_t>{50, 150, 250, 350});
}

TEST_CASE("purpose-specific seeds are distinct derivations of the run seed") {
    ExperimentConfig cfg = parse_experiment_config({{"seed", 99}});
    CHECK(data_seed(cfg) == CounterRng::derive(99, 1));
    CHECK(split_seed(cfg) == CounterRng::derive(99, 2));
    CHECK(init_seed(cfg) == CounterRng::derive(99, 3));
    CHECK(train_seed(cfg) == CounterRng::derive(99, 4));
    CHECK(cfg.analysis.seed == CounterRng::derive(99, 5));
    CHECK(data_seed(cfg) != split_seed(cfg));
}

TEST_CASE("prepare_data splits and standardizes") {
    ExperimentConfig cfg = parse_experiment_config(
        {{"seed", 3},
         {"data", {{"n", 100}, {"d", 4}, {"train_fraction", 0.8}}}});
    PreparedData data = prepare_data(cfg);
    CHECK(data.train.n == 80);
    CHECK(data.test.n == 20);
    for (std::size_t j = 0; j < data.train.d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < data.train.n; ++i)
            mean += data.train.row(i)[j];
        mean /= static_cast<double>(data.train.n);
        CHECK(std::abs(mean) < 1e-10);
    }
}

TEST_CASE("disjoint specs partition the hidden layer by round") {
    auto specs = make_disjoint_specs(8, 2);
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].units == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(specs[1].units == std::vector<std::size_t>{4, 5, 6, 7});
    CHECK(specs[0].assigned_round == 0);
    CHECK(specs[1].assigned_round == 1);
    CHECK_THROWS_AS(make_disjoint_specs(8, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_disjoint_specs(8, 0), std::invalid_argument);
}

TEST_CASE("gen writes identical bytes on identical configs") {
    ExperimentConfig cfg = parse_experiment_config(
        {{"seed", 21}, {"data", {{"n", 60}, {"d", 3}}}});
    std::string a = fresh_dir("gen_a"), b = fresh_dir("gen_b");
    run_gen(cfg, a);
    run_gen(cfg, b);
    for (const char* f :
         {"config.json", "train.csv", "train.meta.json", "test.csv",
          "test.meta.json", "manifest.json"}) {
        INFO(f);
        CHECK(slurp(a + "/" + f) != "");
        CHECK(slurp(a + "/" + f) == slurp(b + "/" + f));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("experiment1 run emits its outputs and a regenerable report") {
    ExperimentConfig cfg = parse_experiment_config(tiny_experiment1_doc());
    std::string dir = fresh_dir("e1");
    run_experiment1(cfg, dir, 1);

    for (const char* f :
         {"config.json", "train.csv", "test.csv", "ensemble.json",
          "ensemble_distributions.bin", "curve.csv", "traces.json",
          "report.json", "cmi_f_given_g.csv", "cmi_g_given_f.csv",
          "cmi_f_given_g.svg", "curve.svg", "learning_order.svg",
          "manifest.json"})
        CHECK(fs::exists(dir + "/" + std::string(f)));
    CHECK(fs::exists(dir + "/checkpoints/step_000000.ckpt"));
    CHECK(fs::exists(dir + "/checkpoints/step_000060.ckpt"));

    nlohmann::json manifest = read_json_file(dir + "/manifest.json");
    CHECK(manifest["ok"] == true);
    CHECK(manifest["command"] == "experiment1");

    nlohmann::json report = read_json_file(dir + "/report.json");
    CHECK_NOTHROW(validate_report_schema(report, "experiment1"));
    CHECK(report["checkpoint_steps"].size() == 3);
    CHECK(report["stages"] == nlohmann::json::array({1, 2}));

    // the report subcommand regenerates the same bytes from the traces
    std::string regen = fresh_dir("e1_regen");
    run_report(dir + "/traces.json", regen, 1);
    CHECK(slurp(regen + "/report.json") == slurp(dir + "/report.json"));

    // a rerun of the whole pipeline is also byte-identical
    std::string rerun = fresh_dir("e1_rerun");
    run_experiment1(cfg, rerun, 1);
    CHECK(slurp(rerun + "/report.json") == slurp(dir + "/report.json"));
    CHECK(slurp(rerun + "/traces.json") == slurp(dir + "/traces.json"));

    fs::remove_all(dir);
    fs::remove_all(regen);
    fs::remove_all(rerun);
}

TEST_CASE("experiment2 run emits its outputs and a regenerable report") {
    ExperimentConfig cfg = parse_experiment_config(tiny_experiment2_doc());
    std::string dir = fresh_dir("e2");
    run_experiment2(cfg, dir, 1);

    for (const char* f :
         {"config.json", "ensemble.json", "curve.csv", "vanilla_curve.csv",
          "traces.json", "report.json", "correlation.svg", "error_kl.svg",
          "manifest.json"})
        CHECK(fs::exists(dir + "/" + std::string(f)));

    nlohmann::json report = read_json_file(dir + "/report.json");
    CHECK_NOTHROW(validate_report_schema(report, "experiment2"));
    CHECK(report["matched_pairs"].size() == 2);
    CHECK(report["final_comparison"].contains("gap"));
    double gap = report["final_comparison"]["gap"].get<double>();
    CHECK(gap == doctest::Approx(
                     report["final_comparison"]["constrained_error"].get<double>() -
                     report["final_comparison"]["vanilla_error"].get<double>()));

    std::string regen = fresh_dir("e2_regen");
    run_report(dir + "/traces.json", regen, 1);
    CHECK(slurp(regen + "/report.json") == slurp(dir + "/report.json"));

    fs::remove_all(dir);
    fs::remove_all(regen);
}

TEST_CASE("more sub-networks than rounds is an error") {
    nlohmann::json doc = tiny_experiment2_doc();
    doc["subnetworks"]["count"] = 4;
    ExperimentConfig cfg = parse_experiment_config(doc);
    std::string dir = fresh_dir("e2_bad");
    CHECK_THROWS_AS(run_experiment2(cfg, dir, 1), std::runtime_error);
    nlohmann::json manifest = read_json_file(dir + "/manifest.json");
    CHECK(manifest["ok"] == false);
    CHECK(manifest["error"] != "");
    fs::remove_all(dir);
}

TEST_CASE("vc tables round-trip the library values") {
    std::string dir = fresh_dir("vc");
    nlohmann::json doc = {{"vc",
                           {{"d_base", 3},
                            {"k_max", 5},
                            {"units", 36},
                            {"connections", 324},
                            {"target", 100.0}}}};
    run_vc(doc, dir);

    std::string csv = slurp(dir + "/vc_boost.csv");
    CHECK(csv.find("k,bound") == 0);
    std::string expect = "5," + format_double(vc_bound_boost(3, 5));
    CHECK(csv.find(expect) != std::string::npos);

    nlohmann::json j = read_json_file(dir + "/vc.json");
    CHECK(j["d_base"] == 3);
    CHECK(j["matched_rounds"] == conjecture_map(100.0, 3));
    CHECK(j["mlp_order_lower"].get<double>() <=
          j["mlp_order_upper"].get<double>());

    CHECK_THROWS_AS(run_vc({{"vc", {{"d_base", 0}}}}, dir),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_vc({{"vc", {{"dbase", 3}}}}, dir),
                    std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("report schema validation catches structural problems") {
    nlohmann::json good = {{"kind", "experiment2"},
                           {"config", nlohmann::json::object()},
                           {"steps", nlohmann::json::array()},
                           {"matched_pairs", nlohmann::json::array()},
                           {"mean_matched_corr", nlohmann::json::array()},
                           {"mean_matched_kl_fh", nlohmann::json::array()},
                           {"final_comparison", nlohmann::json::object()}};
    CHECK_NOTHROW(validate_report_schema(good, "experiment2"));

    nlohmann::json missing = good;
    missing.erase("steps");
    CHECK_THROWS_AS(validate_report_schema(missing, "experiment2"),
                    std::runtime_error);
    CHECK_THROWS_AS(validate_report_schema(good, "experiment1"),
                    std::runtime_error); // kind mismatch
    nlohmann::json odd = good;
    odd["kind"] = "experiment9";
    CHECK_THROWS_AS(validate_report_schema(odd, "experiment9"),
                    std::runtime_error);
}

TEST_CASE("unknown trace kinds leave a failure manifest") {
    std::string dir = fresh_dir("report_bad");
    fs::create_directories(dir);
    write_json_file({{"kind", "experiment9"}}, dir + "/traces.json");
    CHECK_THROWS_AS(run_report(dir + "/traces.json", dir, 1),
                    std::runtime_error);
    nlohmann::json manifest = read_json_file(dir + "/manifest.json");
    CHECK(manifest["ok"] == false);
    fs::remove_all(dir);
}
