#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qspec/loss/loss.hpp"
#include "qspec/net/network.hpp"
#include "qspec/qsim/circuit.hpp"
#include "qspec/train/dataset.hpp"
#include "qspec/train/optimizer.hpp"

namespace qspec::train {

enum class OptimizerKind { adam, lbfgs };

[[nodiscard]] std::string_view to_string(OptimizerKind k) noexcept;
[[nodiscard]] OptimizerKind parse_optimizer(std::string_view name);
[[nodiscard]] std::string_view to_string(loss::Objective o) noexcept;
/// Accepts phase_aware (alias normalized), unnormalized, vqls_standard.
[[nodiscard]] loss::Objective parse_objective(std::string_view name);
[[nodiscard]] std::string_view to_string(loss::GradientMode m) noexcept;
[[nodiscard]] loss::GradientMode parse_gradient_mode(std::string_view name);

struct TrainConfig {
    loss::Objective objective = loss::Objective::phase_aware;
    OptimizerKind optimizer = OptimizerKind::adam;
    AdamConfig adam;
    LbfgsConfig lbfgs;
    int epochs = 1000;
    loss::GradientMode gradient_mode = loss::GradientMode::adjoint;
    int eval_every = 50;
    double divergence_threshold = 1e6;
    bool record_wall_time = true; ///< false writes 0 so records compare bytewise

    /// Throws ConfigError for epochs < 1, learning_rate <= 0, eval_every < 1.
    void validate() const;
};

struct EpochRow {
    int epoch = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;
    double train_rel_l2 = 0.0;
    double test_rel_l2 = 0.0;
    double test_rel_linf = 0.0;
    double test_mae = 0.0;
    double wall_seconds = 0.0;
};

struct RunRecord {
    std::vector<EpochRow> rows;
    bool diverged = false;
    std::string abort_reason;
    int best_epoch = -1;
    double best_test_rel_l2 = 0.0;
    std::optional<net::Network> best_network; ///< checkpoint at the best test rel L2
};

/// Per-instance errors of a network on one split.
struct SplitEvaluation {
    double loss = 0.0;
    std::vector<spectral::ErrorMetrics> per_instance;
    std::vector<int> phase_warnings; ///< indices with a flagged imaginary residue

    [[nodiscard]] double mean_rel_l2() const;
    [[nodiscard]] double sd_rel_l2() const;
    [[nodiscard]] double mean_rel_linf() const;
    [[nodiscard]] double sd_rel_linf() const;
    [[nodiscard]] double mean_mae() const;
    [[nodiscard]] double best_rel_l2() const;
};

/// One split with its context; truth is read only here.
struct Split {
    const loss::LossContext *context = nullptr;
    const std::vector<Instance> *instances = nullptr;
};

/// States for each instance: program run on the network's angles.
[[nodiscard]] std::vector<qsim::StateVector> predict_states(const qsim::GateProgram &program,
                                                            const net::Network &network,
                                                            const std::vector<Instance> &instances);

[[nodiscard]] SplitEvaluation evaluate_split(loss::Objective objective,
                                             const spectral::SpectralSystem &system,
                                             const qsim::GateProgram &program,
                                             const net::Network &network, const Split &split);

/**
 * @brief Full-batch training of the angle network.
 *
 * Rows are recorded at epoch 0, every eval_every epochs and at the last
 * epoch, each after that epoch's update. Training stops early when the train
 * loss exceeds the divergence threshold or anything turns non-finite; the
 * record keeps the rows so far. The network is updated in place.
 */
[[nodiscard]] RunRecord train(const TrainConfig &config, const spectral::SpectralSystem &system,
                              const qsim::GateProgram &program, net::Network &network,
                              const Split &train_split, const Split &test_split);

/// Header plus one row per record entry, 17 significant digits.
void write_run_record_csv(std::ostream &os, const RunRecord &record);

} // namespace qspec::train
