#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "qspec/net/network.hpp"
#include "qspec/pauli/expansion.hpp"
#include "qspec/pauli/grouping.hpp"
#include "qspec/qsim/circuit.hpp"
#include "qspec/spectral/solve.hpp"

namespace qspec::loss {

using cplx = std::complex<double>;

/// Radicand values at or below this raise DegenerateDenominatorError.
inline constexpr double kBetaTolerance = 1e-12;
/// Relative imaginary residue above which a recovered solution is flagged.
inline constexpr double kImagResidueTolerance = 1e-6;

struct Target {
    Eigen::VectorXcd unit; ///< |F> = F / ||F||
    double raw_norm = 0.0; ///< ||F||
    double wave_number_sq = 0.0;
};

/// Fixed expansions for A(k) = S + k^2 M.
struct ParametricExpansions {
    pauli::PauliExpansion S, M;
    pauli::PauliExpansion SdagS, SdagM, MdagS, MdagM;
};

/**
 * @brief Everything the loss needs besides the trial states.
 *
 * Direct contexts hold the expansions of A and A^dag A. Parametric contexts
 * instead hold the six k-independent expansions and a k^2 per target.
 * Immutable after construction.
 */
class LossContext {
  public:
    [[nodiscard]] static LossContext direct(const Eigen::MatrixXd &A,
                                            const std::vector<Eigen::VectorXd> &forcings);
    [[nodiscard]] static LossContext direct(pauli::PauliExpansion expansion_A,
                                            const std::vector<Eigen::VectorXd> &forcings);
    [[nodiscard]] static LossContext parametric(const Eigen::MatrixXd &S, const Eigen::MatrixXd &M,
                                                const std::vector<Eigen::VectorXd> &forcings,
                                                const std::vector<double> &wave_numbers_sq);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t instance_count() const noexcept { return targets_.size(); }
    [[nodiscard]] bool is_parametric() const noexcept { return parametric_.has_value(); }
    [[nodiscard]] const Target &target(std::size_t i) const { return targets_.at(i); }
    /// Throws ConfigError for parametric contexts.
    [[nodiscard]] const pauli::PauliExpansion &expansion_A() const;
    [[nodiscard]] const pauli::PauliExpansion &expansion_AdagA() const;
    [[nodiscard]] const pauli::MeasurementGrouping &grouping_num() const;
    [[nodiscard]] const pauli::MeasurementGrouping &grouping_den() const;
    /// Throws ConfigError for direct contexts.
    [[nodiscard]] const ParametricExpansions &parametric_expansions() const;

    /// (sum_l c_l P_l) v for instance i (k-dependent for parametric contexts).
    [[nodiscard]] Eigen::VectorXcd apply_A(std::size_t i, const Eigen::VectorXcd &v) const;
    /// A^dag A v for instance i.
    [[nodiscard]] Eigen::VectorXcd apply_AdagA(std::size_t i, const Eigen::VectorXcd &v) const;
    /// A^dag |F_i>, cached at construction.
    [[nodiscard]] const Eigen::VectorXcd &adjoint_target(std::size_t i) const {
        return adjoint_targets_.at(i);
    }

  private:
    int n_qubits_ = 0;
    std::vector<Target> targets_;
    std::vector<Eigen::VectorXcd> adjoint_targets_;
    pauli::PauliExpansion A_, AdagA_;
    pauli::MeasurementGrouping group_num_, group_den_;
    std::optional<ParametricExpansions> parametric_;

    void set_targets(const std::vector<Eigen::VectorXd> &forcings,
                     const std::vector<double> &wave_numbers_sq);
};

/// Numerator gamma = Re <F|A|a>, radicand beta = <a|A^dag A|a>, and the
/// imaginary part of <F|A|a> for diagnostics.
struct OverlapTerms {
    double gamma = 0.0;
    double beta = 0.0;
    double gamma_imag = 0.0;
};

[[nodiscard]] OverlapTerms overlap_terms(const LossContext &ctx, std::size_t instance,
                                         const qsim::StateVector &state);

struct LossValue {
    double total = 0.0;
    std::vector<double> per_instance;
    std::vector<double> gamma;
    std::vector<double> beta;
};

enum class Objective { phase_aware, unnormalized, vqls_standard };

/// 1 - gamma / sqrt(beta), averaged over instances.
[[nodiscard]] LossValue loss_phase_aware(const LossContext &ctx,
                                         std::span<const qsim::StateVector> states);
/// (gamma - sqrt(beta))^2, averaged over instances.
[[nodiscard]] LossValue loss_unnormalized(const LossContext &ctx,
                                          std::span<const qsim::StateVector> states);
/// 1 - |<F|A|a>|^2 / beta, averaged over instances. Blind to a global sign.
[[nodiscard]] LossValue loss_vqls_standard(const LossContext &ctx,
                                           std::span<const qsim::StateVector> states);
/// Phase-aware loss of a parametric context at caller-supplied k^2 values,
/// assembled from the fixed S/M expansions. Throws ConfigError otherwise.
[[nodiscard]] LossValue loss_parametric(const LossContext &ctx,
                                        std::span<const qsim::StateVector> states,
                                        std::span<const double> wave_numbers_sq);

[[nodiscard]] LossValue evaluate(Objective objective, const LossContext &ctx,
                                 std::span<const qsim::StateVector> states);

/// Per-instance loss from its terms.
[[nodiscard]] double instance_loss(Objective objective, const OverlapTerms &t);

enum class GradientMode { adjoint, parameter_shift };

/// dL_i / dtheta for one instance and its angles.
[[nodiscard]] std::vector<double> angle_gradient(Objective objective, GradientMode mode,
                                                 const LossContext &ctx, std::size_t instance,
                                                 const qsim::GateProgram &program,
                                                 std::span<const double> angles);

struct TotalGradient {
    LossValue loss;
    std::vector<double> parameters; ///< d(mean loss)/dw
};

/**
 * @brief Loss and network-parameter gradient over a batch.
 *
 * features[i] feeds the network, whose output angles drive program for
 * instance i of ctx. Instances run in parallel; the mean is folded in index
 * order so the result does not depend on the thread count.
 */
[[nodiscard]] TotalGradient grad_total(Objective objective, GradientMode mode,
                                       const LossContext &ctx, const qsim::GateProgram &program,
                                       const net::Network &network,
                                       const std::vector<std::vector<double>> &features);

struct RecoveredSolution {
    Eigen::VectorXd coefficients;
    double scale = 0.0;
    double imag_residue = 0.0; ///< ||Im a|| / ||a||
    bool phase_warning = false;
};

/// alpha = Re(a) * ||F|| / sqrt(beta). Sets phase_warning when the relative
/// imaginary residue exceeds kImagResidueTolerance.
[[nodiscard]] RecoveredSolution recover_solution(const qsim::StateVector &state,
                                                 const LossContext &ctx, std::size_t instance);

} // namespace qspec::loss
