#include "phaselab/adaboost.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace phaselab {

double BoostEnsemble::staged_margin(std::size_t stage,
                                    std::span<const double> x) const {
    if (stage < 1 || stage > rounds())
        throw std::out_of_range("staged_margin: stage out of range");
    double margin = 0.0;
    for (std::size_t t = 0; t < stage; ++t)
        margin += alphas[t] * stumps[t].predict(x);
    return margin;
}

std::pair<double, int> BoostEnsemble::staged_predict(
    std::size_t stage, std::span<const double> x) const {
    double m = staged_margin(stage, x);
    return {m, sign_pm1(m)};
}

BoostEnsemble run_adaboost(const Dataset& ds, std::size_t k) {
    ds.validate();
    if (k < 1) throw std::invalid_argument("run_adaboost: k must be >= 1");

    const std::size_t n = ds.n;
    const double eps_floor = 1.0 / (2.0 * static_cast<double>(n));

    BoostEnsemble e;
    std::vector<double> dist(n, 1.0 / static_cast<double>(n));

    for (std::size_t t = 0; t < k; ++t) {
        StumpFit fit = fit_stump(ds, dist);
        double eps = fit.weighted_error;
        if (eps >= 0.5) {
            e.stopped_early = true;
            e.stop_reason = "round " + std::to_string(t + 1) +
                            ": weighted error " + std::to_string(eps) +
                            " >= 0.5, no weak learner available";
            break;
        }
        double alpha = 0.5 * std::log((1.0 - std::max(eps, eps_floor)) /
                                      std::max(eps, eps_floor));

        e.round_distributions.push_back(dist);
        e.stumps.push_back(fit.stump);
        e.alphas.push_back(alpha);
        e.round_errors.push_back(eps);

        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int h = fit.stump.predict(ds.row(i));
            dist[i] *= std::exp(-alpha * ds.labels[i] * h);
            z += dist[i];
        }
        for (double& w : dist) w /= z;
    }
    return e;
}

double staged_training_error(const BoostEnsemble& e, std::size_t stage,
                             const Dataset& ds) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < ds.n; ++i)
        if (e.staged_predict(stage, ds.row(i)).second != ds.labels[i]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(ds.n);
}

void save_ensemble(const BoostEnsemble& e, const std::string& json_path,
                   const std::string& dist_path) {
    nlohmann::json j;
    j["alphas"] = e.alphas;
    j["round_errors"] = e.round_errors;
    j["stopped_early"] = e.stopped_early;
    j["stop_reason"] = e.stop_reason;
    j["stumps"] = nlohmann::json::array();
    for (const auto& s : e.stumps)
        j["stumps"].push_back({{"feature", s.feature},
                               {"threshold", s.threshold},
                               {"polarity", s.polarity}});
    j["n"] = e.round_distributions.empty() ? 0 : e.round_distributions[0].size();
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + json_path);
    out << j.dump(2) << '\n';

    std::ofstream bin(dist_path, std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open " + dist_path);
    for (const auto& dist : e.round_distributions)
        bin.write(reinterpret_cast<const char*>(dist.data()),
                  static_cast<std::streamsize>(dist.size() * sizeof(double)));
}

BoostEnsemble load_ensemble(const std::string& json_path,
                            const std::string& dist_path) {
    std::ifstream in(json_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + json_path);
    nlohmann::json j = nlohmann::json::parse(in);

    BoostEnsemble e;
    e.alphas = j.at("alphas").get<std::vector<double>>();
    e.round_errors = j.at("round_errors").get<std::vector<double>>();
    e.stopped_early = j.at("stopped_early").get<bool>();
    e.stop_reason = j.at("stop_reason").get<std::string>();
    for (const auto& s : j.at("stumps"))
        e.stumps.push_back(Stump{s.at("feature").get<std::size_t>(),
                                 s.at("threshold").get<double>(),
                                 s.at("polarity").get<int>()});
    auto n = j.at("n").get<std::size_t>();

    std::ifstream bin(dist_path, std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open " + dist_path);
    for (std::size_t t = 0; t < e.stumps.size(); ++t) {
        std::vector<double> dist(n);
        bin.read(reinterpret_cast<char*>(dist.data()),
                 static_cast<std::streamsize>(n * sizeof(double)));
        if (!bin) throw std::runtime_error("distribution sidecar truncated");
        e.round_distributions.push_back(std::move(dist));
    }
    return e;
}

} // namespace phaselab
