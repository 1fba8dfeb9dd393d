#include "phaselab/vc_bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace phaselab {

double vc_bound_boost(std::int64_t d_base, std::int64_t k) {
    if (d_base < 1 || k < 1)
        throw std::invalid_argument("vc_bound_boost: inputs must be >= 1");
    double kd = static_cast<double>(k);
    return 2.0 * kd * static_cast<double>(d_base) * (1.0 + std::log(kd));
}

std::pair<double, double> vc_bound_mlp(std::int64_t num_units,
                                       std::int64_t num_connections) {
    if (num_units < 1 || num_connections < 1)
        throw std::invalid_argument("vc_bound_mlp: inputs must be >= 1");
    double e2 = static_cast<double>(num_connections) *
                static_cast<double>(num_connections);
    double v2 = static_cast<double>(num_units) * static_cast<double>(num_units);
    return {e2, e2 * v2};
}

std::int64_t conjecture_map(double target_vc, std::int64_t d_base) {
    if (!(target_vc > 0.0))
        throw std::invalid_argument("conjecture_map: target_vc must be > 0");
    if (d_base < 1)
        throw std::invalid_argument("conjecture_map: d_base must be >= 1");
    std::int64_t k = 1;
    while (vc_bound_boost(d_base, k) < target_vc) ++k;
    return k;
}

} // namespace phaselab
