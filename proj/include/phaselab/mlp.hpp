#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phaselab/dataset.hpp"
#include "phaselab/rng.hpp"

namespace phaselab {

// Hidden-unit index set defining the sub-network restriction of the output
// sum. assigned_round >= 0 ties the spec to a boosting round; -1 means the
// spec samples uniformly.
struct SubnetworkSpec {
    std::vector<std::size_t> units; // 0-based, sorted, non-empty
    int assigned_round = -1;
};

// One-hidden-layer ReLU network without bias terms:
// f(x) = sum_j v_j * ReLU(<w_j, x>).
struct MlpModel {
    std::size_t hidden_units = 0;
    std::size_t input_dim = 0;
    std::vector<double> hidden_weights; // k x d row-major
    std::vector<double> output_weights; // length k

    // w ~ N(0, 1/d), v ~ N(0, 1/k); keeps initial outputs O(1)
    static MlpModel random_init(std::size_t k, std::size_t d, CounterRng& rng);

    double pre_activation(std::size_t j, std::span<const double> x) const;

    // fills hidden (length k) and returns the output; the output sum is
    // compensated so partitions of hidden units re-add to it within 1e-10
    double forward(std::span<const double> x, std::span<double> hidden) const;
    double output(std::span<const double> x) const;

    std::vector<double> embed(std::span<const double> x) const;

    // f^J(x) = sum_{j in J} v_j * ReLU(<w_j, x>)
    double subnetwork_output(const SubnetworkSpec& spec,
                             std::span<const double> x) const;
};

enum class LossKind { Hinge, Logistic };
LossKind parse_loss(const std::string& name);
std::string loss_name(LossKind loss);

struct Gradients {
    std::vector<double> dw; // k x d
    std::vector<double> dv; // k
    void resize(std::size_t k, std::size_t d);
    void zero();
};

// Mean loss and exact subgradients over the batch. ReLU subgradient at 0 is
// 0; hinge subgradient at margin 1 is 0. When unit_mask is given only those
// rows of dw / entries of dv are filled; the rest stay zero.
double loss_and_grad(const MlpModel& m, const Dataset& ds,
                     std::span<const std::size_t> batch, LossKind loss,
                     Gradients& grads,
                     const std::vector<std::size_t>* unit_mask = nullptr);

// Mean loss and 0/1 accuracy (sign of output vs label) over a full dataset.
std::pair<double, double> evaluate(const MlpModel& m, const Dataset& ds,
                                   LossKind loss);

} // namespace phaselab
