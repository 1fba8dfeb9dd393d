#pragma once

#include <span>

#include "phaselab/dataset.hpp"

namespace phaselab {

// Axis-aligned decision stump: polarity * sign(x[feature] - threshold).
struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    int polarity = 1; // -1 or +1

    int predict(std::span<const double> x) const {
        return polarity * sign_pm1(x[feature] - threshold);
    }
};

struct StumpFit {
    Stump stump;
    double weighted_error = 0.0;
};

// Weighted-0/1-error minimizer over all (feature, threshold between
// consecutive distinct sorted values, polarity) candidates. Ties break to
// the lowest feature index, then lowest threshold, then polarity +1.
// All-identical labels return a trivial always-correct stump with error 0.
StumpFit fit_stump(const Dataset& ds, std::span<const double> weights);

} // namespace phaselab
