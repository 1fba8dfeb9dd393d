#pragma once

#include <string>
#include <utility>
#include <vector>

#include "phaselab/stump.hpp"

namespace phaselab {

// Adaboost over decision stumps. Keeps every round's sample distribution so
// later stages can replay the reweighting schedule.
struct BoostEnsemble {
    std::vector<Stump> stumps;
    std::vector<double> alphas;
    std::vector<std::vector<double>> round_distributions; // D_1..D_k
    std::vector<double> round_errors;                     // eps_t
    bool stopped_early = false;
    std::string stop_reason;

    std::size_t rounds() const { return stumps.size(); }

    // margin of the staged prefix G_stage (1-based, uses the first `stage` stumps)
    double staged_margin(std::size_t stage, std::span<const double> x) const;
    std::pair<double, int> staged_predict(std::size_t stage,
                                          std::span<const double> x) const;
};

// Classical Freund-Schapire loop: D_1 uniform, alpha_t = 0.5*ln((1-eps)/eps),
// D_{t+1}(i) proportional to D_t(i)*exp(-alpha_t*y_i*h_t(x_i)).
// eps_t = 0 caps alpha at the eps_floor = 1/(2n) value and continues;
// eps_t >= 0.5 rejects the round and stops early.
BoostEnsemble run_adaboost(const Dataset& ds, std::size_t k);

// Training error of G_stage on ds.
double staged_training_error(const BoostEnsemble& e, std::size_t stage,
                             const Dataset& ds);

// JSON for stumps/alphas/errors plus a little-endian f64 sidecar holding the
// round distributions.
void save_ensemble(const BoostEnsemble& e, const std::string& json_path,
                   const std::string& dist_path);
BoostEnsemble load_ensemble(const std::string& json_path,
                            const std::string& dist_path);

} // namespace phaselab
