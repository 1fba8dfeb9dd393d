#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phaselab {

// Discrete predictions of one model/ensemble checkpoint over a fixed
// evaluation set, plus optional real scores.
struct PredictionTrace {
    std::string source;
    std::vector<int> preds;    // values in {-1,+1}
    std::vector<double> scores; // optional, same length when present

    void validate() const;
};

// Simplex over evaluation examples built from per-example errors.
struct ErrorDistribution {
    std::vector<double> probs;
    double smoothing = 0.0;
};

// Plug-in estimate from the empirical 2x2 joint; base-2 log, 0*log 0 = 0.
double mutual_information(const PredictionTrace& a, const PredictionTrace& b);
double mutual_information(const std::vector<int>& a, const std::vector<int>& b);

// I(F;Y|G) = H(F,G) + H(G,Y) - H(G) - H(F,G,Y); negative rounding is
// clamped to 0.
double conditional_mi(const PredictionTrace& f, const std::vector<int>& y,
                      const PredictionTrace& g);
double conditional_mi(const std::vector<int>& f, const std::vector<int>& y,
                      const std::vector<int>& g);

// Each prediction equals y_i with probability `accuracy`, independently.
PredictionTrace random_classifier(const std::vector<int>& y, double accuracy,
                                  std::uint64_t seed);

struct CmiSignificance {
    double observed = 0.0;
    double matched_accuracy = 0.0;
    double baseline_mean = 0.0;
    double baseline_stddev = 0.0;
    double z_score = 0.0;
    double empirical_p = 0.0; // fraction of baselines <= observed
    int trials = 0;
    // Theorem-style matching is on accuracy; both MI values are reported so a
    // gap > 0.01 bits can be flagged downstream.
    double observed_mi = 0.0;
    double baseline_mi_mean = 0.0;
};

// Baseline = conditional_mi(r, y, g) over `trials` random classifiers with
// accuracy matched to f's empirical accuracy; trial t uses the derived seed
// hash(seed, t) so parallel evaluation cannot change results.
CmiSignificance cmi_significance(const PredictionTrace& f,
                                 const std::vector<int>& y,
                                 const PredictionTrace& g, int trials,
                                 std::uint64_t seed, int threads = 1);

// e_i = |score_i - y_i|; distribution = (e_i + eps) / sum(e_j + eps).
ErrorDistribution error_distribution(const std::vector<double>& scores,
                                     const std::vector<int>& y, double eps);

// sum p_i log2(p_i / q_i); both inputs must be smoothed (strictly positive)
double kl_divergence(const ErrorDistribution& p, const ErrorDistribution& q);

// symmetric tie-breaker reported alongside both KL directions
double js_divergence(const ErrorDistribution& p, const ErrorDistribution& q);

} // namespace phaselab
