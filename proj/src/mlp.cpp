#include "phaselab/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace phaselab {

MlpModel MlpModel::random_init(std::size_t k, std::size_t d, CounterRng& rng) {
    if (k < 1 || d < 1)
        throw std::invalid_argument("mlp: need k >= 1 and d >= 1");
    MlpModel m;
    m.hidden_units = k;
    m.input_dim = d;
    m.hidden_weights.resize(k * d);
    m.output_weights.resize(k);
    const double w_scale = 1.0 / std::sqrt(static_cast<double>(d));
    const double v_scale = 1.0 / std::sqrt(static_cast<double>(k));
    for (auto& w : m.hidden_weights) w = w_scale * rng.next_gaussian();
    for (auto& v : m.output_weights) v = v_scale * rng.next_gaussian();
    return m;
}

double MlpModel::pre_activation(std::size_t j, std::span<const double> x) const {
    if (x.size() != input_dim)
        throw std::invalid_argument("mlp: input dimension mismatch");
    const double* w = hidden_weights.data() + j * input_dim;
    double s = 0.0;
    for (std::size_t i = 0; i < input_dim; ++i) s += w[i] * x[i];
    return s;
}

double MlpModel::forward(std::span<const double> x, std::span<double> hidden) const {
    if (hidden.size() != hidden_units)
        throw std::invalid_argument("mlp: hidden buffer size mismatch");
    // Kahan-compensated output sum so sub-network partitions re-add exactly
    double sum = 0.0, comp = 0.0;
    for (std::size_t j = 0; j < hidden_units; ++j) {
        double a = pre_activation(j, x);
        hidden[j] = a > 0.0 ? a : 0.0;
        double term = output_weights[j] * hidden[j] - comp;
        double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    return sum;
}

double MlpModel::output(std::span<const double> x) const {
    std::vector<double> hidden(hidden_units);
    return forward(x, hidden);
}

std::vector<double> MlpModel::embed(std::span<const double> x) const {
    std::vector<double> hidden(hidden_units);
    forward(x, hidden);
    return hidden;
}

double MlpModel::subnetwork_output(const SubnetworkSpec& spec,
                                   std::span<const double> x) const {
    if (spec.units.empty())
        throw std::invalid_argument("subnetwork: empty unit set");
    double sum = 0.0, comp = 0.0;
    for (std::size_t j : spec.units) {
        if (j >= hidden_units)
            throw std::out_of_range("subnetwork: unit index out of range");
        double a = pre_activation(j, x);
        double term = output_weights[j] * (a > 0.0 ? a : 0.0) - comp;
        double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    return sum;
}

LossKind parse_loss(const std::string& name) {
    if (name == "hinge") return LossKind::Hinge;
    if (name == "logistic") return LossKind::Logistic;
    throw std::invalid_argument("unknown loss: " + name);
}

std::string loss_name(LossKind loss) {
    return loss == LossKind::Hinge ? "hinge" : "logistic";
}

void Gradients::resize(std::size_t k, std::size_t d) {
    dw.assign(k * d, 0.0);
    dv.assign(k, 0.0);
}

void Gradients::zero() {
    std::fill(dw.begin(), dw.end(), 0.0);
    std::fill(dv.begin(), dv.end(), 0.0);
}

namespace {

// loss value and d(loss)/d(output) for margin m = y*f(x)
inline std::pair<double, double> loss_terms(LossKind loss, double f, int y) {
    double m = y * f;
    // a diverged model must surface as a non-finite loss, not a masked 0
    if (!std::isfinite(m))
        return {std::numeric_limits<double>::infinity(), 0.0};
    if (loss == LossKind::Hinge) {
        if (m < 1.0) return {1.0 - m, static_cast<double>(-y)};
        return {0.0, 0.0}; // subgradient at m == 1 defined as 0
    }
    // logistic: ln(1 + exp(-m)), numerically stable on both tails
    double value = m > 0.0 ? std::log1p(std::exp(-m))
                           : -m + std::log1p(std::exp(m));
    double sigma_neg = 1.0 / (1.0 + std::exp(m)); // sigma(-m)
    return {value, -y * sigma_neg};
}

} // namespace

double loss_and_grad(const MlpModel& m, const Dataset& ds,
                     std::span<const std::size_t> batch, LossKind loss,
                     Gradients& grads,
                     const std::vector<std::size_t>* unit_mask) {
    if (batch.empty())
        throw std::invalid_argument("loss_and_grad: empty batch");
    grads.resize(m.hidden_units, m.input_dim);

    std::vector<std::size_t> all_units;
    if (!unit_mask) {
        all_units.resize(m.hidden_units);
        for (std::size_t j = 0; j < m.hidden_units; ++j) all_units[j] = j;
    }
    const std::vector<std::size_t>& units = unit_mask ? *unit_mask : all_units;

    const double inv_b = 1.0 / static_cast<double>(batch.size());
    std::vector<double> hidden(m.hidden_units);
    double total = 0.0;
    for (std::size_t idx : batch) {
        auto x = ds.row(idx);
        double f = m.forward(x, hidden);
        auto [value, dLdf] = loss_terms(loss, f, ds.labels[idx]);
        total += value;
        if (dLdf == 0.0) continue;
        for (std::size_t j : units) {
            grads.dv[j] += inv_b * dLdf * hidden[j];
            if (hidden[j] > 0.0) {
                double c = inv_b * dLdf * m.output_weights[j];
                double* gw = grads.dw.data() + j * m.input_dim;
                for (std::size_t i = 0; i < m.input_dim; ++i) gw[i] += c * x[i];
            }
        }
    }
    return total * inv_b;
}

std::pair<double, double> evaluate(const MlpModel& m, const Dataset& ds,
                                   LossKind loss) {
    std::vector<double> hidden(m.hidden_units);
    double total = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.n; ++i) {
        double f = m.forward(ds.row(i), hidden);
        total += loss_terms(loss, f, ds.labels[i]).first;
        if (sign_pm1(f) == ds.labels[i]) ++correct;
    }
    return {total / static_cast<double>(ds.n),
            static_cast<double>(correct) / static_cast<double>(ds.n)};
}

} // namespace phaselab
