#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace qspec::qsim {

using cplx = std::complex<double>;

/// Amplitudes over the computational basis; qubit 0 is the most significant bit.
struct StateVector {
    int n_qubits = 0;
    Eigen::VectorXcd amplitudes;

    [[nodiscard]] static StateVector zero(int n_qubits);
    [[nodiscard]] std::size_t dimension() const noexcept {
        return static_cast<std::size_t>(amplitudes.size());
    }
    [[nodiscard]] double norm() const { return amplitudes.norm(); }
};

enum class GateKind { ry, rz, hadamard, cnot };

struct Gate {
    GateKind kind = GateKind::hadamard;
    int target = 0;
    int control = -1; ///< cnot only
    int slot = -1;    ///< ry / rz only
};

/**
 * @brief Ordered gate list acting on |0...0>.
 *
 * Every angle slot must feed exactly one rotation; validate() enforces this
 * together with index ranges.
 */
struct GateProgram {
    int n_qubits = 0;
    int n_angle_slots = 0;
    std::vector<Gate> gates;

    void ry(int target, int slot) { gates.push_back({GateKind::ry, target, -1, slot}); }
    void rz(int target, int slot) { gates.push_back({GateKind::rz, target, -1, slot}); }
    void h(int target) { gates.push_back({GateKind::hadamard, target, -1, -1}); }
    void cnot(int control, int target) { gates.push_back({GateKind::cnot, target, control, -1}); }

    /// Throws ContractViolation on a bad qubit/slot index or a slot that is
    /// unused or used twice.
    void validate() const;
};

/// Per layer R_Y(phi) R_Z(theta) R_Y(omega) on every qubit, then a CNOT ring
/// q -> (q + r) mod n with r = (layer mod (n - 1)) + 1. Slots per qubit are
/// (phi, theta, omega). Throws ConfigError for n < 2 or layers < 1.
[[nodiscard]] GateProgram build_strongly_entangling(int n_qubits, int layers);

/// Hadamard on every qubit, then per layer R_Y per qubit and the ring
/// q -> (q + 1) mod n. All gates are real.
[[nodiscard]] GateProgram build_hardware_efficient_ry(int n_qubits, int layers);

/// Product state (x)_q R_Y(theta_q)|0>.
[[nodiscard]] StateVector build_ry_embedding(std::span<const double> angles);

/// Applies the program to |0...0>. Throws ContractViolation when the angle
/// count differs from n_angle_slots.
[[nodiscard]] StateVector run(const GateProgram &program, std::span<const double> angles);

/// In-place gate application; the inverse flag applies U^dag.
void apply_gate(StateVector &state, const Gate &gate, double angle, bool inverse = false);

/// Dense 2^n x 2^n matrix of one gate (reference implementation).
[[nodiscard]] Eigen::MatrixXcd gate_matrix(int n_qubits, const Gate &gate, double angle);
[[nodiscard]] Eigen::MatrixXcd program_unitary(const GateProgram &program,
                                               std::span<const double> angles);

} // namespace qspec::qsim
