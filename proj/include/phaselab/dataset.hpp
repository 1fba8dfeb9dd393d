#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace phaselab {

// Feature matrix with ±1 labels and an optional per-example weight
// distribution. meta carries provenance (generator, seed, parameters).
struct Dataset {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> features; // row-major, n*d
    std::vector<int> labels;      // values in {-1,+1}
    std::vector<double> weights;  // empty, or length n summing to 1
    nlohmann::json meta;

    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * d, d};
    }
    double at(std::size_t i, std::size_t j) const { return features[i * d + j]; }

    // throws std::invalid_argument on any violated invariant
    void validate() const;
};

// sign convention used across the project: sign(0) = +1
inline int sign_pm1(double x) { return x >= 0.0 ? 1 : -1; }

// round-trip-exact double formatting for CSV/report output
std::string format_double(double x);

// CSV (label,f0,...,fd-1 per row) plus a JSON sidecar for meta
void save_dataset(const Dataset& ds, const std::string& csv_path,
                  const std::string& meta_path);
Dataset load_dataset(const std::string& csv_path, const std::string& meta_path);

} // namespace phaselab
