#pragma once

#include <cstdint>
#include <utility>

namespace phaselab {

// d_k < 2*k*d*ln(k*e) for k rounds of boosting over a base class of VC
// dimension d. Natural log: the formula pairs log with e so log(e) = 1.
double vc_bound_boost(std::int64_t d_base, std::int64_t k);

// Order-of-magnitude proxies (|E|^2, |E|^2*|V|^2) for a sigmoid MLP with V
// neurons and E connections. Constants-free orders, not counts.
std::pair<double, double> vc_bound_mlp(std::int64_t num_units,
                                       std::int64_t num_connections);

// Smallest k with vc_bound_boost(d_base, k) >= target_vc; one concrete
// instantiation of a complexity-matching map used to size the ensemble.
std::int64_t conjecture_map(double target_vc, std::int64_t d_base);

} // namespace phaselab
