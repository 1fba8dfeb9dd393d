#include "phaselab/stump.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace phaselab {

namespace {

StumpFit trivial_stump(const Dataset& ds, int label) {
    double lo = ds.at(0, 0);
    for (std::size_t i = 1; i < ds.n; ++i) lo = std::min(lo, ds.at(i, 0));
    // every x has x[0] > threshold, so the stump predicts `label` everywhere
    return {Stump{0, lo - 1.0, label}, 0.0};
}

} // namespace

StumpFit fit_stump(const Dataset& ds, std::span<const double> weights) {
    ds.validate();
    if (weights.size() != ds.n)
        throw std::invalid_argument("fit_stump: weight length mismatch");
    double total_w = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("fit_stump: negative weight");
        total_w += w;
    }
    if (std::fabs(total_w - 1.0) >= 1e-8)
        throw std::invalid_argument("fit_stump: weights must sum to 1");

    bool all_same = std::all_of(ds.labels.begin(), ds.labels.end(),
                                [&](int y) { return y == ds.labels[0]; });
    if (all_same) return trivial_stump(ds, ds.labels[0]);

    bool found = false;
    Stump best;
    double best_err = 0.0;

    std::vector<std::size_t> order(ds.n);
    for (std::size_t f = 0; f < ds.d; ++f) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ds.at(a, f) < ds.at(b, f);
        });

        double total_neg = 0.0;
        for (std::size_t i = 0; i < ds.n; ++i)
            if (ds.labels[i] == -1) total_neg += weights[i];

        // err_plus(p): predict +1 for x > t with t between order[p-1], order[p]
        double below_pos = 0.0;  // weight of +1 labels at or below threshold
        double below_neg = 0.0;
        for (std::size_t p = 1; p < ds.n; ++p) {
            std::size_t prev = order[p - 1];
            if (ds.labels[prev] == 1) below_pos += weights[prev];
            else below_neg += weights[prev];

            double lo = ds.at(prev, f), hi = ds.at(order[p], f);
            if (!(lo < hi)) continue;
            double threshold = lo + (hi - lo) / 2.0;

            double err_plus = below_pos + (total_neg - below_neg);
            for (int polarity : {1, -1}) {
                double err = polarity == 1 ? err_plus : total_w - err_plus;
                if (!found || err < best_err) {
                    found = true;
                    best_err = err;
                    best = Stump{f, threshold, polarity};
                }
            }
        }
    }

    if (!found) {
        // every feature is constant: fall back to the weighted majority label
        double score = 0.0;
        for (std::size_t i = 0; i < ds.n; ++i)
            score += weights[i] * ds.labels[i];
        int label = sign_pm1(score);
        double err = 0.0;
        for (std::size_t i = 0; i < ds.n; ++i)
            if (ds.labels[i] != label) err += weights[i];
        StumpFit fit = trivial_stump(ds, label);
        fit.weighted_error = err;
        return fit;
    }
    return {best, std::max(best_err, 0.0)};
}

} // namespace phaselab
