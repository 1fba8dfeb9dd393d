#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <vector>

#include "phaselab/rng.hpp"

using namespace phaselab;

TEST_CASE("same seed gives the same stream") {
    CounterRng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
    CounterRng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u64() == b.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("resuming from a recorded position continues the stream exactly") {
    CounterRng full(7);
    std::vector<std::uint64_t> ref;
    for (int i = 0; i < 50; ++i) ref.push_back(full.next_u64());

    CounterRng head(7);
    for (int i = 0; i < 20; ++i) head.next_u64();
    CounterRng tail(7, head.position());
    for (int i = 20; i < 50; ++i) CHECK(tail.next_u64() == ref[i]);
}

TEST_CASE("derived substreams differ from the parent and each other") {
    std::uint64_t a = CounterRng::derive(5, 0);
    std::uint64_t b = CounterRng::derive(5, 1);
    CHECK(a != b);
    CHECK(a != 5);
}

TEST_CASE("next_double stays in [0,1) and next_gaussian looks standard") {
    CounterRng rng(3);
    double sum = 0.0, sum2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < n; ++i) {
        double g = rng.next_gaussian();
        CHECK(std::isfinite(g));
        sum += g;
        sum2 += g * g;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 0.05);
    CHECK(std::fabs(var - 1.0) < 0.1);
}

TEST_CASE("sample_cumulative matches a linear-scan oracle") {
    CounterRng weights_rng(11);
    std::vector<double> w(17);
    for (auto& x : w) x = weights_rng.next_double() + 0.01;
    auto cum = cumulative_sums(w);

    CounterRng a(99), b(99);
    for (int trial = 0; trial < 2000; ++trial) {
        std::size_t got = sample_cumulative(a, cum);
        double u = b.next_double() * cum.back();
        std::size_t expect = 0;
        while (expect + 1 < cum.size() && cum[expect] <= u) ++expect;
        CHECK(got == expect);
    }
}

TEST_CASE("sample_cumulative respects the distribution") {
    std::vector<double> cum = cumulative_sums({0.2, 0.8});
    CounterRng rng(13);
    int hits = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
        if (sample_cumulative(rng, cum) == 1) ++hits;
    CHECK(hits > 7700);
    CHECK(hits < 8300);
}
