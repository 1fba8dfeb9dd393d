#include "phaselab/info.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "phaselab/rng.hpp"

namespace phaselab {

namespace {

inline int bit(int v) { return v == 1 ? 1 : 0; }

double entropy_from_counts(const std::vector<double>& counts, double total) {
    double h = 0.0;
    for (double c : counts) {
        if (c <= 0.0) continue;
        double p = c / total;
        h -= p * std::log2(p);
    }
    return h;
}

void check_alphabet(const std::vector<int>& v, const char* what) {
    for (int x : v)
        if (x != 1 && x != -1)
            throw std::invalid_argument(std::string(what) + ": value not in {-1,+1}");
}

} // namespace

void PredictionTrace::validate() const {
    check_alphabet(preds, "trace");
    if (!scores.empty() && scores.size() != preds.size())
        throw std::invalid_argument("trace: score length mismatch");
}

double mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("mutual_information: length mismatch");
    check_alphabet(a, "mi");
    check_alphabet(b, "mi");

    std::vector<double> joint(4, 0.0), ma(2, 0.0), mb(2, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[bit(a[i]) * 2 + bit(b[i])] += 1.0;
        ma[bit(a[i])] += 1.0;
        mb[bit(b[i])] += 1.0;
    }
    double m = static_cast<double>(a.size());
    double value = entropy_from_counts(ma, m) + entropy_from_counts(mb, m) -
                   entropy_from_counts(joint, m);
    return value < 0.0 ? 0.0 : value;
}

double mutual_information(const PredictionTrace& a, const PredictionTrace& b) {
    return mutual_information(a.preds, b.preds);
}

double conditional_mi(const std::vector<int>& f, const std::vector<int>& y,
                      const std::vector<int>& g) {
    if (f.size() != y.size() || g.size() != y.size() || y.empty())
        throw std::invalid_argument("conditional_mi: length mismatch");
    check_alphabet(f, "cmi");
    check_alphabet(y, "cmi");
    check_alphabet(g, "cmi");

    std::vector<double> fg(4, 0.0), gy(4, 0.0), gm(2, 0.0), fgy(8, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        int bf = bit(f[i]), bg = bit(g[i]), by = bit(y[i]);
        fg[bf * 2 + bg] += 1.0;
        gy[bg * 2 + by] += 1.0;
        gm[bg] += 1.0;
        fgy[bf * 4 + bg * 2 + by] += 1.0;
    }
    double m = static_cast<double>(y.size());
    double value = entropy_from_counts(fg, m) + entropy_from_counts(gy, m) -
                   entropy_from_counts(gm, m) - entropy_from_counts(fgy, m);
    return value < 0.0 ? 0.0 : value;
}

double conditional_mi(const PredictionTrace& f, const std::vector<int>& y,
                      const PredictionTrace& g) {
    return conditional_mi(f.preds, y, g.preds);
}

PredictionTrace random_classifier(const std::vector<int>& y, double accuracy,
                                  std::uint64_t seed) {
    if (accuracy < 0.0 || accuracy > 1.0)
        throw std::invalid_argument("random_classifier: accuracy must be in [0,1]");
    check_alphabet(y, "random_classifier");
    CounterRng rng(seed);
    PredictionTrace t;
    t.source = "random_classifier(a=" + std::to_string(accuracy) + ")";
    t.preds.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        t.preds[i] = rng.next_double() < accuracy ? y[i] : -y[i];
    return t;
}

CmiSignificance cmi_significance(const PredictionTrace& f,
                                 const std::vector<int>& y,
                                 const PredictionTrace& g, int trials,
                                 std::uint64_t seed, int threads) {
    if (trials < 100)
        throw std::invalid_argument("cmi_significance: trials must be >= 100");
    f.validate();
    g.validate();
    if (f.preds.size() != y.size() || g.preds.size() != y.size())
        throw std::invalid_argument("cmi_significance: length mismatch");

    CmiSignificance out;
    out.trials = trials;
    out.observed = conditional_mi(f.preds, y, g.preds);
    out.observed_mi = mutual_information(f.preds, y);

    std::size_t agree = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (f.preds[i] == y[i]) ++agree;
    out.matched_accuracy = static_cast<double>(agree) / static_cast<double>(y.size());

    std::vector<double> baseline(trials), baseline_mi(trials);
    auto run_trial = [&](int t) {
        PredictionTrace r = random_classifier(
            y, out.matched_accuracy,
            CounterRng::derive(seed, static_cast<std::uint64_t>(t)));
        baseline[t] = conditional_mi(r.preds, y, g.preds);
        baseline_mi[t] = mutual_information(r.preds, y);
    };
    if (threads <= 1) {
        for (int t = 0; t < trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> pool;
        int per = (trials + threads - 1) / threads;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (int t = w * per; t < std::min(trials, (w + 1) * per); ++t)
                    run_trial(t);
            });
        for (auto& th : pool) th.join();
    }

    double mean = 0.0, mi_mean = 0.0;
    int at_or_below = 0;
    for (int t = 0; t < trials; ++t) {
        mean += baseline[t];
        mi_mean += baseline_mi[t];
        if (baseline[t] <= out.observed) ++at_or_below;
    }
    mean /= trials;
    mi_mean /= trials;
    double var = 0.0;
    for (int t = 0; t < trials; ++t) {
        double c = baseline[t] - mean;
        var += c * c;
    }
    var /= trials;

    out.baseline_mean = mean;
    out.baseline_mi_mean = mi_mean;
    out.baseline_stddev = std::sqrt(var);
    out.z_score = out.baseline_stddev > 1e-15
                      ? (out.observed - mean) / out.baseline_stddev
                      : 0.0;
    out.empirical_p = static_cast<double>(at_or_below) / trials;
    return out;
}

ErrorDistribution error_distribution(const std::vector<double>& scores,
                                     const std::vector<int>& y, double eps) {
    if (scores.size() != y.size() || y.empty())
        throw std::invalid_argument("error_distribution: length mismatch");
    if (!(eps > 0.0))
        throw std::invalid_argument("error_distribution: eps must be > 0");
    ErrorDistribution out;
    out.smoothing = eps;
    out.probs.resize(y.size());
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(scores[i]))
            throw std::invalid_argument("error_distribution: non-finite score");
        out.probs[i] = std::fabs(scores[i] - y[i]) + eps;
        total += out.probs[i];
    }
    for (double& p : out.probs) p /= total;
    return out;
}

double kl_divergence(const ErrorDistribution& p, const ErrorDistribution& q) {
    if (p.probs.size() != q.probs.size() || p.probs.empty())
        throw std::invalid_argument("kl_divergence: length mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        if (!(p.probs[i] > 0.0) || !(q.probs[i] > 0.0))
            throw std::invalid_argument("kl_divergence: zero entry (unsmoothed input)");
        kl += p.probs[i] * std::log2(p.probs[i] / q.probs[i]);
    }
    return kl;
}

double js_divergence(const ErrorDistribution& p, const ErrorDistribution& q) {
    if (p.probs.size() != q.probs.size() || p.probs.empty())
        throw std::invalid_argument("js_divergence: length mismatch");
    ErrorDistribution m;
    m.probs.resize(p.probs.size());
    for (std::size_t i = 0; i < p.probs.size(); ++i)
        m.probs[i] = 0.5 * (p.probs[i] + q.probs[i]);
    return 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m);
}

} // namespace phaselab
