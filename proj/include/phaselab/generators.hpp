#pragma once

#include <cstdint>
#include <utility>

#include "phaselab/dataset.hpp"

namespace phaselab {

struct SinusoidConfig {
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t signal_dims = 0; // informative leading dimensions
    double frequency = 1.0;      // omega
    double label_noise = 0.0;    // eta, flip probability in [0, 0.5)
    std::uint64_t seed = 0;

    void validate() const;
};

struct XorClusterConfig {
    std::size_t n = 0;
    std::size_t d = 0; // must be >= 2 (two orthogonal cluster axes)
    double cluster_separation = 1.0;
    double cluster_stddev = 1.0;
    double label_noise = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// x ~ N(0, I_d); clean label = sign(sin(omega * <u, x_signal>)) for the fixed
// unit direction u = (1,...,1)/sqrt(signal_dims) over the signal dims; the
// label is flipped independently with probability eta.
Dataset gen_sinusoid(const SinusoidConfig& cfg);

// Four isotropic Gaussian clusters at +-sep*e0 (label +1) and +-sep*e1
// (label -1), xor pattern, plus independent label flips.
Dataset gen_xor_clusters(const XorClusterConfig& cfg);

// Seeded shuffle, then sizes (floor(n*f), n - floor(n*f)).
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed);

struct Standardization {
    std::vector<double> mean;   // per feature
    std::vector<double> stddev; // 1.0 for zero-variance features
};

// Centers/scales both sets by TRAIN statistics only.
struct StandardizeResult {
    Dataset train;
    Dataset test;
    Standardization stats;
};
StandardizeResult standardize(const Dataset& train, const Dataset& test);

// Applies previously computed statistics (used by tests and replays).
Dataset apply_standardization(const Dataset& ds, const Standardization& st);

} // namespace phaselab
