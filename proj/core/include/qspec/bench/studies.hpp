#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qspec/bench/config.hpp"

namespace qspec::bench {

/// One row of an error table; key is the experiment or directory name.
struct ErrorTableRow {
    std::string key;
    std::string pde;
    std::string bc;
    int n_modes = 0;
    int n_qubits = 0;
    double mean_rel_l2 = 0.0;
    double sd_rel_l2 = 0.0;
    double mean_rel_linf = 0.0;
    double sd_rel_linf = 0.0;
    double mean_mae = 0.0;
    double best_rel_l2 = 0.0;
};

struct RunOutcome {
    train::RunRecord record;
    ErrorTableRow row; ///< test split, best checkpoint
    train::SplitEvaluation test;
    int resampled = 0;
    std::size_t terms_A = 0;
    std::size_t groups_A = 0;
};

/// assemble, decompose, group, generate, train, evaluate.
[[nodiscard]] RunOutcome run_experiment(const ExperimentConfig &config);

struct TruncationRow {
    double threshold = 0.0;
    std::size_t term_count = 0;
    double rel_frobenius = 0.0;
    double condition_number = 0.0;
    double solution_error = 0.0; ///< mean rel L2 of the truncated classical solve
    bool degenerate = false;
};

/// Sweep over config.thresholds using the config's dataset forcings.
[[nodiscard]] std::vector<TruncationRow> truncation_study(const ExperimentConfig &config);

struct ScalingRow {
    std::string pde;
    int n_modes = 0;
    int dimension = 0;
    int n_qubits = 0;
    std::size_t terms_A = 0;
    std::size_t groups_A = 0;
    std::size_t terms_AdagA = 0;
    std::size_t groups_AdagA = 0;
    std::size_t vqls_pairwise = 0;
};

/// Largest system size accepted by the scaling study.
inline constexpr std::size_t kMaxScalingSize = 1024;

/// Counts for the config's PDE family over n_modes x dimensions. Throws
/// ConfigError when N^d exceeds kMaxScalingSize.
[[nodiscard]] std::vector<ScalingRow> scaling_study(const ExperimentConfig &config);
[[nodiscard]] ScalingRow scaling_row(spectral::PdeKind family, const ExperimentConfig &config,
                                     int n_modes, int dimension);

struct SignFlipRow {
    int seed = 0;
    std::string arm;
    double mean_overlap = 0.0; ///< Re<u_unit, u_hat_unit> over test instances
    double min_overlap = 0.0;
    double final_loss = 0.0;
};

struct SignFlipReport {
    std::vector<SignFlipRow> rows;
    double identity_residual_phase_aware = 0.0; ///< max |L(-a) - (2 - L(a))|
    double identity_residual_standard = 0.0;    ///< max |L(-a) - L(a)|
    bool phase_aware_all_positive = false;
    bool standard_any_negative = false;
};

/**
 * @brief Trains from a sign-adversarial start with both objectives.
 *
 * Per seed a network is pretrained with the phase-aware loss, then shifted
 * by 2 pi on one rotation so every predicted state is negated. The standard
 * arm trains from that exact start; the phase-aware arm adds Gaussian noise
 * of size signflip_perturbation to the output biases first.
 */
[[nodiscard]] SignFlipReport sign_flip_demo(const ExperimentConfig &config);

struct TableResult {
    std::vector<ErrorTableRow> rows;
    std::vector<std::string> warnings;
};

/// One row per directory holding an error_table.csv; others are warned about.
[[nodiscard]] TableResult collect_tables(const std::vector<std::filesystem::path> &dirs);

void write_error_table_csv(std::ostream &os, const std::vector<ErrorTableRow> &rows);
[[nodiscard]] std::vector<ErrorTableRow> read_error_table_csv(std::istream &is);
void write_truncation_csv(std::ostream &os, const std::vector<TruncationRow> &rows);
void write_scaling_csv(std::ostream &os, const std::vector<ScalingRow> &rows);
void write_signflip_csv(std::ostream &os, const SignFlipReport &report);

} // namespace qspec::bench
