#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <limits>

#include "phaselab/dataset.hpp"

using namespace phaselab;

namespace {

Dataset small() {
    Dataset ds;
    ds.n = 2;
    ds.d = 2;
    ds.features = {0.5, -1.25, 3.0, 0.1};
    ds.labels = {1, -1};
    ds.meta = {{"generator", "test"}};
    return ds;
}

} // namespace

TEST_CASE("validate accepts a well-formed dataset") {
    CHECK_NOTHROW(small().validate());
}

TEST_CASE("validate rejects bad labels") {
    Dataset ds = small();
    ds.labels[0] = 0;
    CHECK_THROWS_AS(ds.validate(), std::invalid_argument);
}

TEST_CASE("validate rejects non-finite features") {
    Dataset ds = small();
    ds.features[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(ds.validate(), std::invalid_argument);
}

TEST_CASE("validate rejects weights that do not sum to 1") {
    Dataset ds = small();
    ds.weights = {0.7, 0.2};
    CHECK_THROWS_AS(ds.validate(), std::invalid_argument);
    ds.weights = {0.5, 0.5};
    CHECK_NOTHROW(ds.validate());
    ds.weights = {1.2, -0.2};
    CHECK_THROWS_AS(ds.validate(), std::invalid_argument);
}

TEST_CASE("validate rejects empty datasets") {
    Dataset ds;
    CHECK_THROWS_AS(ds.validate(), std::invalid_argument);
}

TEST_CASE("sign convention: sign(0) = +1") {
    CHECK(sign_pm1(0.0) == 1);
    CHECK(sign_pm1(-0.0) == 1);
    CHECK(sign_pm1(1e-300) == 1);
    CHECK(sign_pm1(-1e-300) == -1);
}

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345.6789, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("save/load round-trips a dataset bit-exactly") {
    Dataset ds = small();
    ds.features[0] = 1.0 / 3.0;
    std::string csv = "/tmp/phaselab_test_ds.csv";
    std::string meta = "/tmp/phaselab_test_ds.meta.json";
    save_dataset(ds, csv, meta);
    Dataset back = load_dataset(csv, meta);
    CHECK(back.n == ds.n);
    CHECK(back.d == ds.d);
    CHECK(back.features == ds.features);
    CHECK(back.labels == ds.labels);
    CHECK(back.meta == ds.meta);
    std::remove(csv.c_str());
    std::remove(meta.c_str());
}
