#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaselab/adaboost.hpp"
#include "phaselab/mlp.hpp"

namespace phaselab {

enum class SamplingMode { Uniform, BoostingAligned };

// SGD schedule split into phases by step boundaries T_0 < T_1 < ... < T_J.
// Phase i covers steps in (T_i, T_{i+1}]; steps at or before T_0 warm up
// under phase 0's distribution. Snapshots land on every boundary plus every
// checkpoint_every steps.
struct PhaseSchedule {
    std::vector<std::int64_t> boundaries;
    SamplingMode mode = SamplingMode::Uniform;
    double learning_rate = 0.01;
    std::size_t batch_size = 32;
    LossKind loss = LossKind::Hinge;
    std::int64_t checkpoint_every = 0; // 0: boundaries only
    bool train_output_weights = true;

    std::size_t phases() const { return boundaries.size() - 1; }
    std::int64_t total_steps() const { return boundaries.back(); }
    void validate(const BoostEnsemble* ensemble) const;
    int phase_of_step(std::int64_t step) const;
};

struct Checkpoint {
    std::int64_t step = 0;
    int phase = 0;
    MlpModel model;
    std::uint64_t rng_position = 0;
    double train_loss = 0.0, train_acc = 0.0;
    double test_loss = 0.0, test_acc = 0.0;
};

struct CheckpointSeries {
    std::vector<Checkpoint> checkpoints;
    bool aborted = false;
    std::string abort_reason;

    const Checkpoint& final_checkpoint() const { return checkpoints.back(); }
};

// Minibatches are drawn i.i.d. with replacement from the active phase's
// sampling distribution (uniform, or the matching Adaboost round's D_i).
// Deterministic given the seed; divergence aborts with the last finite
// checkpoint preserved. resume continues an earlier run from its recorded
// step and stream position, reproducing the unbroken run bit-exactly.
CheckpointSeries train(const MlpModel& init, const Dataset& train_set,
                       const Dataset* test_set, const PhaseSchedule& schedule,
                       const BoostEnsemble* ensemble, std::uint64_t seed,
                       const Checkpoint* resume = nullptr);

// Round-robin over the specs: each step trains exactly one spec on a batch
// from its assigned round distribution, updating only that spec's units.
CheckpointSeries train_subnetworks(const MlpModel& init, const Dataset& train_set,
                                   const Dataset* test_set,
                                   const std::vector<SubnetworkSpec>& specs,
                                   const BoostEnsemble& ensemble,
                                   const PhaseSchedule& schedule,
                                   std::uint64_t seed,
                                   std::size_t overlap_cap = 0,
                                   const Checkpoint* resume = nullptr);

// header JSON + little-endian f64 parameter block
void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

void save_curve_csv(const CheckpointSeries& s, const std::string& path);

} // namespace phaselab
