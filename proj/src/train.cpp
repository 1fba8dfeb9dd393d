#include "phaselab/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "json.hpp"

namespace phaselab {

void PhaseSchedule::validate(const BoostEnsemble* ensemble) const {
    if (boundaries.size() < 2)
        throw std::invalid_argument("schedule: need at least two phase boundaries");
    for (std::size_t i = 1; i < boundaries.size(); ++i)
        if (boundaries[i] <= boundaries[i - 1])
            throw std::invalid_argument("schedule: boundaries must be strictly increasing");
    if (boundaries.front() < 0)
        throw std::invalid_argument("schedule: boundaries must be non-negative");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw std::invalid_argument("schedule: bad learning rate");
    if (batch_size < 1)
        throw std::invalid_argument("schedule: batch_size must be >= 1");
    if (mode == SamplingMode::BoostingAligned) {
        if (!ensemble)
            throw std::invalid_argument("schedule: boosting-aligned mode needs an ensemble");
        if (phases() > ensemble->rounds())
            throw std::invalid_argument("schedule: more phases than boosting rounds");
    }
}

int PhaseSchedule::phase_of_step(std::int64_t step) const {
    auto it = std::lower_bound(boundaries.begin(), boundaries.end(), step);
    auto idx = static_cast<int>(it - boundaries.begin()) - 1;
    return std::clamp(idx, 0, static_cast<int>(phases()) - 1);
}

namespace {

struct StepPlan {
    const std::vector<double>* cumulative;
    const std::vector<std::size_t>* mask; // nullptr: all units
};

CheckpointSeries run_sgd(const MlpModel& init, const Dataset& train_set,
                         const Dataset* test_set, const PhaseSchedule& schedule,
                         std::uint64_t seed, const Checkpoint* resume,
                         const std::function<StepPlan(std::int64_t)>& plan_for) {
    train_set.validate();

    MlpModel model = resume ? resume->model : init;
    CounterRng rng(seed, resume ? resume->rng_position : 0);
    std::int64_t start_step = resume ? resume->step : 0;

    CheckpointSeries series;
    auto record = [&](std::int64_t step) {
        Checkpoint c;
        c.step = step;
        c.phase = schedule.phase_of_step(std::max<std::int64_t>(step, 1));
        c.model = model;
        c.rng_position = rng.position();
        auto [tl, ta] = evaluate(model, train_set, schedule.loss);
        c.train_loss = tl;
        c.train_acc = ta;
        if (test_set) {
            auto [el, ea] = evaluate(model, *test_set, schedule.loss);
            c.test_loss = el;
            c.test_acc = ea;
        }
        series.checkpoints.push_back(std::move(c));
    };

    auto is_boundary = [&](std::int64_t step) {
        return std::binary_search(schedule.boundaries.begin(),
                                  schedule.boundaries.end(), step);
    };

    if (start_step == 0 && is_boundary(0)) record(0);

    std::vector<std::size_t> batch(schedule.batch_size);
    Gradients grads;
    for (std::int64_t step = start_step + 1; step <= schedule.total_steps(); ++step) {
        StepPlan plan = plan_for(step);
        for (auto& b : batch) b = sample_cumulative(rng, *plan.cumulative);

        double loss = loss_and_grad(model, train_set, batch, schedule.loss,
                                    grads, plan.mask);
        if (!std::isfinite(loss)) {
            series.aborted = true;
            series.abort_reason = "non-finite loss at step " + std::to_string(step);
            break;
        }

        const double lr = schedule.learning_rate;
        if (plan.mask) {
            for (std::size_t j : *plan.mask) {
                double* w = model.hidden_weights.data() + j * model.input_dim;
                const double* g = grads.dw.data() + j * model.input_dim;
                for (std::size_t i = 0; i < model.input_dim; ++i) w[i] -= lr * g[i];
                if (schedule.train_output_weights)
                    model.output_weights[j] -= lr * grads.dv[j];
            }
        } else {
            for (std::size_t i = 0; i < model.hidden_weights.size(); ++i)
                model.hidden_weights[i] -= lr * grads.dw[i];
            if (schedule.train_output_weights)
                for (std::size_t j = 0; j < model.hidden_units; ++j)
                    model.output_weights[j] -= lr * grads.dv[j];
        }

        bool boundary = is_boundary(step);
        bool periodic = schedule.checkpoint_every > 0 &&
                        step % schedule.checkpoint_every == 0;
        if (boundary || periodic) record(step);
    }

    if (series.checkpoints.empty()) record(start_step);
    return series;
}

std::vector<double> uniform_cumulative(std::size_t n) {
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    return cumulative_sums(w);
}

} // namespace

CheckpointSeries train(const MlpModel& init, const Dataset& train_set,
                       const Dataset* test_set, const PhaseSchedule& schedule,
                       const BoostEnsemble* ensemble, std::uint64_t seed,
                       const Checkpoint* resume) {
    schedule.validate(ensemble);
    if (schedule.mode == SamplingMode::BoostingAligned)
        for (const auto& dist : ensemble->round_distributions)
            if (dist.size() != train_set.n)
                throw std::invalid_argument("train: ensemble distribution length mismatch");

    std::vector<std::vector<double>> phase_cumulative;
    for (std::size_t i = 0; i < schedule.phases(); ++i) {
        if (schedule.mode == SamplingMode::BoostingAligned)
            phase_cumulative.push_back(
                cumulative_sums(ensemble->round_distributions[i]));
        else
            phase_cumulative.push_back(uniform_cumulative(train_set.n));
    }

    return run_sgd(init, train_set, test_set, schedule, seed, resume,
                   [&](std::int64_t step) {
                       return StepPlan{
                           &phase_cumulative[schedule.phase_of_step(step)],
                           nullptr};
                   });
}

CheckpointSeries train_subnetworks(const MlpModel& init, const Dataset& train_set,
                                   const Dataset* test_set,
                                   const std::vector<SubnetworkSpec>& specs,
                                   const BoostEnsemble& ensemble,
                                   const PhaseSchedule& schedule,
                                   std::uint64_t seed, std::size_t overlap_cap,
                                   const Checkpoint* resume) {
    schedule.validate(nullptr);
    if (specs.empty())
        throw std::invalid_argument("train_subnetworks: need at least one spec");
    for (const auto& spec : specs) {
        if (spec.units.empty())
            throw std::invalid_argument("train_subnetworks: empty sub-network");
        if (spec.assigned_round >= static_cast<int>(ensemble.rounds()))
            throw std::invalid_argument("train_subnetworks: assigned round out of range");
        for (std::size_t j : spec.units)
            if (j >= init.hidden_units)
                throw std::invalid_argument("train_subnetworks: unit index out of range");
    }
    for (std::size_t a = 0; a < specs.size(); ++a)
        for (std::size_t b = a + 1; b < specs.size(); ++b) {
            std::vector<std::size_t> shared;
            std::set_intersection(specs[a].units.begin(), specs[a].units.end(),
                                  specs[b].units.begin(), specs[b].units.end(),
                                  std::back_inserter(shared));
            if (shared.size() > overlap_cap)
                throw std::invalid_argument(
                    "train_subnetworks: sub-network overlap exceeds cap");
        }

    std::vector<std::vector<double>> spec_cumulative;
    for (const auto& spec : specs) {
        if (spec.assigned_round < 0) {
            spec_cumulative.push_back(uniform_cumulative(train_set.n));
        } else {
            const auto& dist = ensemble.round_distributions[spec.assigned_round];
            if (dist.size() != train_set.n)
                throw std::invalid_argument(
                    "train_subnetworks: round distribution length mismatch");
            spec_cumulative.push_back(cumulative_sums(dist));
        }
    }

    bool all_units = specs.size() == 1 &&
                     specs[0].units.size() == init.hidden_units;
    return run_sgd(init, train_set, test_set, schedule, seed, resume,
                   [&, all_units](std::int64_t step) {
                       std::size_t s = static_cast<std::size_t>(step - 1) % specs.size();
                       return StepPlan{&spec_cumulative[s],
                                       all_units ? nullptr : &specs[s].units};
                   });
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
    nlohmann::json header = {{"step", c.step},
                             {"phase", c.phase},
                             {"hidden_units", c.model.hidden_units},
                             {"input_dim", c.model.input_dim},
                             {"rng_position", c.rng_position},
                             {"train_loss", c.train_loss},
                             {"train_acc", c.train_acc},
                             {"test_loss", c.test_loss},
                             {"test_acc", c.test_acc}};
    std::string h = header.dump();
    std::uint64_t len = h.size();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.write("PLCKPT01", 8);
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    auto write_block = [&](const std::vector<double>& v) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    write_block(c.model.hidden_weights);
    write_block(c.model.output_weights);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "PLCKPT01", 8) != 0)
        throw std::runtime_error("bad checkpoint magic in " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string h(len, '\0');
    in.read(h.data(), static_cast<std::streamsize>(len));
    nlohmann::json header = nlohmann::json::parse(h);

    Checkpoint c;
    c.step = header.at("step").get<std::int64_t>();
    c.phase = header.at("phase").get<int>();
    c.rng_position = header.at("rng_position").get<std::uint64_t>();
    c.train_loss = header.at("train_loss").get<double>();
    c.train_acc = header.at("train_acc").get<double>();
    c.test_loss = header.at("test_loss").get<double>();
    c.test_acc = header.at("test_acc").get<double>();
    c.model.hidden_units = header.at("hidden_units").get<std::size_t>();
    c.model.input_dim = header.at("input_dim").get<std::size_t>();
    c.model.hidden_weights.resize(c.model.hidden_units * c.model.input_dim);
    c.model.output_weights.resize(c.model.hidden_units);
    auto read_block = [&](std::vector<double>& v) {
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    read_block(c.model.hidden_weights);
    read_block(c.model.output_weights);
    if (!in) throw std::runtime_error("truncated checkpoint " + path);
    return c;
}

void save_curve_csv(const CheckpointSeries& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "step,phase,train_loss,test_loss,train_acc,test_acc\n";
    for (const auto& c : s.checkpoints)
        out << c.step << ',' << c.phase << ',' << format_double(c.train_loss)
            << ',' << format_double(c.test_loss) << ','
            << format_double(c.train_acc) << ',' << format_double(c.test_acc)
            << '\n';
}

} // namespace phaselab
