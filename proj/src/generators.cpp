#include "phaselab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "phaselab/rng.hpp"

namespace phaselab {

void SinusoidConfig::validate() const {
    if (n < 1) throw std::invalid_argument("sinusoid: n must be >= 1");
    if (d < 1) throw std::invalid_argument("sinusoid: d must be >= 1");
    if (signal_dims < 1 || signal_dims > d)
        throw std::invalid_argument("sinusoid: signal_dims must be in [1, d]");
    if (!(frequency > 0.0) || !std::isfinite(frequency))
        throw std::invalid_argument("sinusoid: frequency must be positive and finite");
    if (label_noise < 0.0 || label_noise >= 0.5)
        throw std::invalid_argument("sinusoid: label_noise must be in [0, 0.5)");
}

void XorClusterConfig::validate() const {
    if (n < 1) throw std::invalid_argument("xor_clusters: n must be >= 1");
    if (d < 2) throw std::invalid_argument("xor_clusters: d must be >= 2");
    if (!(cluster_separation > 0.0) || !std::isfinite(cluster_separation))
        throw std::invalid_argument("xor_clusters: cluster_separation must be > 0");
    if (!(cluster_stddev > 0.0) || !std::isfinite(cluster_stddev))
        throw std::invalid_argument("xor_clusters: cluster_stddev must be > 0");
    if (label_noise < 0.0 || label_noise >= 0.5)
        throw std::invalid_argument("xor_clusters: label_noise must be in [0, 0.5)");
}

Dataset gen_sinusoid(const SinusoidConfig& cfg) {
    cfg.validate();
    CounterRng rng(cfg.seed);
    Dataset ds;
    ds.n = cfg.n;
    ds.d = cfg.d;
    ds.features.resize(cfg.n * cfg.d);
    ds.labels.resize(cfg.n);

    const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(cfg.signal_dims));
    for (std::size_t i = 0; i < cfg.n; ++i) {
        double proj = 0.0;
        for (std::size_t j = 0; j < cfg.d; ++j) {
            double x = rng.next_gaussian();
            ds.features[i * cfg.d + j] = x;
            if (j < cfg.signal_dims) proj += inv_sqrt_s * x;
        }
        int label = sign_pm1(std::sin(cfg.frequency * proj));
        double u = rng.next_double();
        if (u < cfg.label_noise) label = -label;
        ds.labels[i] = label;
    }

    ds.meta = {{"generator", "sinusoid"},
               {"seed", cfg.seed},
               {"n", cfg.n},
               {"d", cfg.d},
               {"signal_dims", cfg.signal_dims},
               {"frequency", cfg.frequency},
               {"label_noise", cfg.label_noise}};
    return ds;
}

Dataset gen_xor_clusters(const XorClusterConfig& cfg) {
    cfg.validate();
    CounterRng rng(cfg.seed);
    Dataset ds;
    ds.n = cfg.n;
    ds.d = cfg.d;
    ds.features.resize(cfg.n * cfg.d);
    ds.labels.resize(cfg.n);

    for (std::size_t i = 0; i < cfg.n; ++i) {
        std::size_t cluster = std::min<std::size_t>(
            3, static_cast<std::size_t>(rng.next_double() * 4.0));
        double c0 = 0.0, c1 = 0.0;
        int label;
        switch (cluster) {
            case 0: c0 = cfg.cluster_separation; label = 1; break;
            case 1: c0 = -cfg.cluster_separation; label = 1; break;
            case 2: c1 = cfg.cluster_separation; label = -1; break;
            default: c1 = -cfg.cluster_separation; label = -1; break;
        }
        for (std::size_t j = 0; j < cfg.d; ++j) {
            double center = (j == 0) ? c0 : (j == 1 ? c1 : 0.0);
            ds.features[i * cfg.d + j] = center + cfg.cluster_stddev * rng.next_gaussian();
        }
        double u = rng.next_double();
        if (u < cfg.label_noise) label = -label;
        ds.labels[i] = label;
    }

    ds.meta = {{"generator", "xor_clusters"},
               {"seed", cfg.seed},
               {"n", cfg.n},
               {"d", cfg.d},
               {"cluster_separation", cfg.cluster_separation},
               {"cluster_stddev", cfg.cluster_stddev},
               {"label_noise", cfg.label_noise}};
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed) {
    ds.validate();
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw std::invalid_argument("split: train_fraction must be in (0, 1)");

    std::vector<std::size_t> idx(ds.n);
    std::iota(idx.begin(), idx.end(), 0);
    CounterRng rng(seed);
    for (std::size_t i = ds.n - 1; i > 0; --i)
        std::swap(idx[i], idx[rng.next_index(i + 1)]);

    auto n_train = static_cast<std::size_t>(
        std::floor(static_cast<double>(ds.n) * train_fraction));
    n_train = std::min(std::max<std::size_t>(n_train, 1), ds.n - 1);

    auto take = [&](std::size_t lo, std::size_t hi, const char* part) {
        Dataset out;
        out.n = hi - lo;
        out.d = ds.d;
        out.features.reserve(out.n * ds.d);
        out.labels.reserve(out.n);
        for (std::size_t p = lo; p < hi; ++p) {
            auto r = ds.row(idx[p]);
            out.features.insert(out.features.end(), r.begin(), r.end());
            out.labels.push_back(ds.labels[idx[p]]);
        }
        out.meta = {{"generator", "split"},
                    {"part", part},
                    {"seed", seed},
                    {"train_fraction", train_fraction},
                    {"parent", ds.meta}};
        return out;
    };
    return {take(0, n_train, "train"), take(n_train, ds.n, "test")};
}

StandardizeResult standardize(const Dataset& train, const Dataset& test) {
    train.validate();
    Standardization st;
    st.mean.resize(train.d);
    st.stddev.resize(train.d);
    for (std::size_t j = 0; j < train.d; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < train.n; ++i) sum += train.at(i, j);
        double mean = sum / static_cast<double>(train.n);
        double var = 0.0;
        for (std::size_t i = 0; i < train.n; ++i) {
            double c = train.at(i, j) - mean;
            var += c * c;
        }
        var /= static_cast<double>(train.n);
        st.mean[j] = mean;
        st.stddev[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    StandardizeResult out;
    out.train = apply_standardization(train, st);
    out.test = apply_standardization(test, st);
    out.stats = st;
    return out;
}

Dataset apply_standardization(const Dataset& ds, const Standardization& st) {
    if (st.mean.size() != ds.d || st.stddev.size() != ds.d)
        throw std::invalid_argument("standardize: statistics dimension mismatch");
    Dataset out = ds;
    for (std::size_t i = 0; i < ds.n; ++i)
        for (std::size_t j = 0; j < ds.d; ++j)
            out.features[i * ds.d + j] = (ds.at(i, j) - st.mean[j]) / st.stddev[j];
    out.meta = {{"generator", "standardized"}, {"parent", ds.meta}};
    return out;
}

} // namespace phaselab
