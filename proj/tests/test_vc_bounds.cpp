#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "phaselab/rng.hpp"
#include "phaselab/vc_bounds.hpp"

using namespace phaselab;

TEST_CASE("pinned values of the boosting bound") {
    CHECK(vc_bound_boost(3, 5) == doctest::Approx(30.0 * (1.0 + std::log(5.0))));
    CHECK(vc_bound_boost(3, 5) == doctest::Approx(78.283).epsilon(1e-4));
    CHECK(vc_bound_boost(7, 1) == doctest::Approx(14.0)); // 2d ln(e) = 2d
}

TEST_CASE("bound is monotone in both rounds and base dimension") {
    for (std::int64_t d = 1; d <= 20; ++d)
        for (std::int64_t k = 1; k <= 20; ++k) {
            CHECK(vc_bound_boost(d, k + 1) > vc_bound_boost(d, k));
            CHECK(vc_bound_boost(d + 1, k) > vc_bound_boost(d, k));
        }
}

TEST_CASE("bound rejects non-positive inputs") {
    CHECK_THROWS_AS(vc_bound_boost(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(vc_bound_boost(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(vc_bound_mlp(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(conjecture_map(0.0, 3), std::invalid_argument);
}

TEST_CASE("mlp order proxies") {
    auto [lo, hi] = vc_bound_mlp(3, 6);
    CHECK(lo == 36.0);
    CHECK(hi == 324.0);

    auto [lo2, hi2] = vc_bound_mlp(3, 12);
    CHECK(lo2 == 4.0 * lo);
    CHECK(hi2 == 4.0 * hi);
    CHECK(hi >= lo);
}

TEST_CASE("conjecture_map returns the smallest sufficient round count") {
    CHECK(conjecture_map(2.0 * 3.0, 3) == 1);
    CHECK(conjecture_map(78.28, 3) == 5);

    CounterRng rng(44);
    for (int trial = 0; trial < 100; ++trial) {
        std::int64_t d = 1 + static_cast<std::int64_t>(rng.next_index(10));
        double target = rng.next_double() * 500.0 + 0.1;
        std::int64_t k = conjecture_map(target, d);
        CHECK(vc_bound_boost(d, k) >= target);
        if (k > 1) CHECK(vc_bound_boost(d, k - 1) < target);
    }
}
