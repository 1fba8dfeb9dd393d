#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace phaselab {

// Counter-based generator: the stream is a pure function of (seed, position),
// so training code can record the position in a checkpoint and resume the
// exact stream later.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t position = 0)
        : seed_(seed), pos_(position) {}

    std::uint64_t next_u64() { return mix(seed_, ++pos_); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // standard normal, Box-Muller; always consumes exactly two draws
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // index in [0, n)
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % n);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t position() const { return pos_; }

    // independent substream seed; used for per-trial / per-stage streams
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        return mix(seed ^ 0x9e3779b97f4a7c15ull, stream + 1);
    }

private:
    static std::uint64_t mix(std::uint64_t s, std::uint64_t c) {
        std::uint64_t z = s + c * 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t pos_;
};

// Samples one index from a discrete distribution given its cumulative sums.
// Binary search keeps the draw order-independent of the distribution shape.
inline std::size_t sample_cumulative(CounterRng& rng, const std::vector<double>& cumulative) {
    double u = rng.next_double() * cumulative.back();
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (cumulative[mid] > u) hi = mid; else lo = mid + 1;
    }
    return lo;
}

inline std::vector<double> cumulative_sums(const std::vector<double>& w) {
    std::vector<double> c(w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        c[i] = acc;
    }
    return c;
}

} // namespace phaselab
